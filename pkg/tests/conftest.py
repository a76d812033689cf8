from __future__ import annotations

import pytest

from outhom.chain import ChainBasis, ClassStore, build_chain_basis
from outhom.enumerator import EnumSpec, enumerate_graphs
from outhom.multigraph import Multigraph, canonical_form


@pytest.fixture(scope="session")
def theta():
    return canonical_form(Multigraph(2, ((0, 1), (0, 1), (0, 1))))


@pytest.fixture(scope="session")
def k4():
    return canonical_form(
        Multigraph(4, tuple((a, b) for a in range(4) for b in range(a + 1, 4)))
    )


@pytest.fixture(scope="session")
def doubled_4_cycle():
    return canonical_form(
        Multigraph(4, ((0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (1, 3)))
    )


@pytest.fixture(scope="session")
def trivalent_by_rank():
    return {n: enumerate_graphs(EnumSpec(n)) for n in (2, 3, 4, 5)}


@pytest.fixture(scope="session")
def store():
    return ClassStore()


@pytest.fixture(scope="session")
def bases_by_rank(trivalent_by_rank, store) -> dict[int, list[ChainBasis]]:
    """All filtration bases for n = 2..5, indexed bases_by_rank[n][p]."""
    out = {}
    for n in (2, 3, 4, 5):
        graphs = trivalent_by_rank[n]
        out[n] = [
            build_chain_basis(n, p, graphs, store) for p in range(2 * n - 2)
        ]
    return out
