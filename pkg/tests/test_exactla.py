from __future__ import annotations

import random

import pytest

from outhom.chain import SparseIntMat, boundary_contract, matmul
from outhom.exactla import (
    DEFAULT_PRIMES,
    FieldSpec,
    RankOverflowError,
    _dense_rank_gf,
    check_product_zero,
    mat_vec,
    nullspace_blockwise,
    nullspace_of,
    rank_of,
    rank_of_vectors,
)

GF1 = FieldSpec.prime(DEFAULT_PRIMES[0])
GF2 = FieldSpec.prime(DEFAULT_PRIMES[1])
QQ = FieldSpec.rational()


def _random_sparse(rng, rows, cols, fill, lo=-9, hi=9):
    cells = {}
    for _ in range(fill):
        cells[(rng.randrange(rows), rng.randrange(cols))] = rng.randint(lo, hi)
    return SparseIntMat(
        rows, cols, tuple((r, c, v) for (r, c), v in cells.items() if v)
    )


class TestFieldSpec:
    def test_default_primes_are_prime(self):
        for p in DEFAULT_PRIMES:
            FieldSpec.prime(p)

    def test_composite_rejected(self):
        with pytest.raises(ValueError):
            FieldSpec.prime(65520)

    def test_rational_takes_no_prime(self):
        with pytest.raises(ValueError):
            FieldSpec("rational", 7)

    def test_labels(self):
        assert GF1.label() == "65521"
        assert QQ.label() == "rational"


class TestRank:
    def test_identity(self):
        ident = SparseIntMat(3, 3, ((0, 0, 1), (1, 1, 1), (2, 2, 1)))
        assert rank_of(ident, GF1) == 3
        assert rank_of(ident, QQ) == 3

    def test_all_ones_2x2(self):
        ones = SparseIntMat(2, 2, ((0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)))
        assert rank_of(ones, GF1) == 1

    def test_zero_matrix(self):
        assert rank_of(SparseIntMat(4, 3, ()), GF1) == 0
        assert rank_of(SparseIntMat(0, 0, ()), QQ) == 0

    def test_200_random_matrices_match_bareiss(self):
        rng = random.Random(65521)
        for _ in range(200):
            m = _random_sparse(rng, 40, 60, 120)
            r_q = rank_of(m, QQ)
            assert rank_of(m, GF1) == r_q
            assert rank_of(m, GF2) == r_q

    def test_dense_path_matches_bareiss(self):
        rng = random.Random(11)
        for _ in range(25):
            m = _random_sparse(rng, 15, 12, 120)
            assert _dense_rank_gf(m, DEFAULT_PRIMES[0]) == rank_of(m, QQ)


class TestNullspace:
    def test_zero_matrix_identity_like(self):
        ns = nullspace_of(SparseIntMat(5, 4, ()), GF1)
        assert ns.dim == 4
        assert sorted(tuple(col.items()) for col in ns.columns) == [
            ((c, 1),) for c in range(4)
        ]

    def test_all_ones_2x2_kernel(self):
        ones = SparseIntMat(2, 2, ((0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)))
        ns = nullspace_of(ones, GF1)
        assert ns.dim == 1
        (col,) = ns.columns
        p = DEFAULT_PRIMES[0]
        assert (col.get(0, 0) + col.get(1, 0)) % p == 0 and col

    def test_random_nullspaces_verify(self):
        rng = random.Random(99)
        for _ in range(50):
            m = _random_sparse(rng, 20, 30, 70)
            ns = nullspace_of(m, GF1)
            assert ns.dim == 30 - rank_of(m, GF1)
            assert check_product_zero(m, ns, GF1)

    def test_rational_nullspace_exact_integers(self):
        rng = random.Random(5)
        for _ in range(20):
            m = _random_sparse(rng, 8, 12, 30)
            ns = nullspace_of(m, QQ)
            assert ns.dim == 12 - rank_of(m, QQ)
            assert check_product_zero(m, ns, QQ)

    def test_assembled_contraction_boundaries_n4(self, bases_by_rank, store):
        # M.N = 0 entrywise and nullity matches the dense rational oracle
        for p in range(1, 6):
            basis = bases_by_rank[4][p]
            if basis.dim == 0:
                continue
            dc = boundary_contract(basis, store)
            ns = nullspace_of(dc, GF1)
            assert check_product_zero(dc, ns, GF1)
            assert ns.dim == dc.cols - rank_of(dc, QQ)

    def test_blockwise_additivity(self, bases_by_rank, store):
        for p in range(1, 6):
            basis = bases_by_rank[4][p]
            if basis.dim == 0:
                continue
            dc = boundary_contract(basis, store)
            blocks = [basis.blocks[k] for k in sorted(basis.blocks)]
            ns_blocks = nullspace_blockwise(dc, blocks, GF1)
            ns_whole = nullspace_of(dc, GF1)
            assert ns_blocks.dim == ns_whole.dim
            assert check_product_zero(dc, ns_blocks, GF1)


class TestComposite:
    def test_product_rank_matches_direct_application(self, bases_by_rank, store):
        from outhom.chain import boundary_remove

        p_prime = DEFAULT_PRIMES[0]
        for n in (3, 4):
            for p in range(1, 2 * n - 2):
                basis = bases_by_rank[n][p]
                if basis.dim == 0:
                    continue
                dc = boundary_contract(basis, store)
                dr = boundary_remove(basis, bases_by_rank[n][p - 1], store)
                ns = nullspace_of(dc, GF1)
                composite = matmul(dr, ns.to_mat())
                direct = [mat_vec(dr, col) for col in ns.columns]
                assert rank_of(composite, GF1) == rank_of_vectors(direct, p_prime)

    def test_cross_prime_rank_agreement_n_le_4(self, bases_by_rank, store):
        from outhom.chain import boundary_remove

        for n in (2, 3, 4):
            for p in range(2 * n - 2):
                basis = bases_by_rank[n][p]
                if basis.dim == 0:
                    continue
                dc = boundary_contract(basis, store)
                assert rank_of(dc, GF1) == rank_of(dc, GF2)
                if p >= 1:
                    dr = boundary_remove(basis, bases_by_rank[n][p - 1], store)
                    assert rank_of(dr, GF1) == rank_of(dr, GF2)


class TestGuards:
    def test_bareiss_size_guard(self):
        big = SparseIntMat(3000, 3000, ((0, 0, 1),))
        with pytest.raises(RankOverflowError):
            rank_of(big, QQ)

    def test_elimination_fill_cap(self):
        rng = random.Random(1)
        m = _random_sparse(rng, 60, 60, 900)
        from outhom.enumerator import ResourceCapError

        with pytest.raises(ResourceCapError):
            nullspace_of(m, GF1, max_nnz=10)
