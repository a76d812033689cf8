"""End-to-end rank profiles and the brute-force full-complex oracle.

The production path works one forest size p at a time inside the filtration:
enumerate trivalent classes once, build the forest basis, assemble both
boundaries, take the kernel of the contraction boundary blockwise, and
record

    a_p  basis size,
    b_p  kernel dimension of the contraction boundary,
    c_p  rank of the removal boundary restricted to that kernel,

from which the homology dimension at p is b_p - c_p - c_{p+1}.

The oracle path (small ranks only) ignores the filtration entirely: it
enumerates graphs of every degree, loops allowed, assembles the full signed
boundary, and reads dimensions off exact rational ranks.  Agreement of the
two paths is an acceptance gate.

Intermediate artifacts are cached as text files so interrupted runs resume,
and a cached run reproduces its report byte for byte.
"""

from __future__ import annotations

import json
import os
import resource
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional, Sequence

from . import chain as chain_mod
from .chain import ChainBasis, ClassStore, SparseIntMat, boundary_contract, boundary_remove, build_chain_basis, matmul
from .enumerator import EnumSpec, ResourceCapError, enumerate_graphs, pairing_classes
from .exactla import (
    DEFAULT_PRIMES,
    FieldSpec,
    NullspaceBasis,
    nullspace_blockwise,
    rank_of,
)
from .forests import ForestedGraph, ForestIndex
from .multigraph import GraphClass, Multigraph, canonical_form
from .parallel import pmap

CACHE_ENV_VAR = "OUTHOM_CACHE_DIR"

DEFAULT_MAX_NNZ = 5_000_000
DEFAULT_MAX_BASIS = 500_000


class NegativeDimensionError(RuntimeError):
    """A homology dimension came out negative: a rank was lost to the prime."""


class CrossPrimeError(RuntimeError):
    """Two prime-field runs disagreed on a rank."""


def default_p_range(n: int) -> list[int]:
    top = 2 * n - 3
    if n <= 5:
        return list(range(top + 1))
    return sorted({0, 1, 2, top - 1, top})


@dataclass
class RankProfile:
    """Per-p ranks for one n, with holes where a resource cap was hit."""

    n: int
    field: str
    primes: list[int]
    p_range: list[int]
    a: list[Optional[int]]
    b: list[Optional[int]]
    c: list[Optional[int]]
    dims: list[Optional[int]]
    holes: list[int]
    timings: dict[str, float]
    maxrss_kb: int
    report_text: Optional[str] = None
    from_cache: bool = False

    @property
    def top(self) -> int:
        return 2 * self.n - 3

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "field": self.field,
            "primes": self.primes,
            "p_range": self.p_range,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "dims": self.dims,
            "holes": self.holes,
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
            "maxrss_kb": self.maxrss_kb,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "RankProfile":
        d = json.loads(text)
        return RankProfile(
            n=d["n"],
            field=d["field"],
            primes=list(d["primes"]),
            p_range=list(d["p_range"]),
            a=list(d["a"]),
            b=list(d["b"]),
            c=list(d["c"]),
            dims=list(d["dims"]),
            holes=list(d["holes"]),
            timings=dict(d["timings"]),
            maxrss_kb=d["maxrss_kb"],
            report_text=text,
            from_cache=True,
        )


def homology_dimensions(rp: RankProfile) -> list[Optional[int]]:
    """dims[p] = b_p - c_p - c_{p+1}; beyond the top filtration c is 0.

    Raises :class:`NegativeDimensionError` if any defined dimension is
    negative, which signals a rank lost to an unlucky prime.
    """
    dims: list[Optional[int]] = [None] * (rp.top + 1)
    negatives = []
    for p in range(rp.top + 1):
        b = rp.b[p]
        c = rp.c[p]
        c_next = 0 if p + 1 > rp.top else rp.c[p + 1]
        if b is None or c is None or c_next is None:
            continue
        d = b - c - c_next
        dims[p] = d
        if d < 0:
            negatives.append(p)
    if negatives:
        raise NegativeDimensionError(
            f"negative homology dimension at p={negatives} for n={rp.n}"
        )
    return dims


# ---------------------------------------------------------------------------
# cache helpers

def _cache_path(cache_dir: Optional[str], name: str) -> Optional[Path]:
    if cache_dir is None:
        return None
    return Path(cache_dir) / name


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="ascii")
    tmp.replace(path)


def load_graphs(path: Path) -> list[GraphClass]:
    out = []
    for line in path.read_text(encoding="ascii").splitlines():
        if line.strip():
            out.append(canonical_form(Multigraph.from_text(line)))
    return out


def _cached_graphs(n: int, cache_dir: Optional[str], max_classes: int, threads: int) -> list[GraphClass]:
    path = _cache_path(cache_dir, f"graphs-n{n}-trivalent.txt")
    if path is not None and path.exists():
        return load_graphs(path)
    graphs = enumerate_trivalent_parallel(n, max_classes, threads)
    if path is not None:
        _write_lines(path, [g.canon.to_text() for g in graphs])
        _write_lines(
            _cache_path(cache_dir, f"graphs-n{n}-trivalent.count"), [str(len(graphs))]
        )
    return graphs


def cached_enumeration(spec: EnumSpec, cache_dir: Optional[str], threads: int) -> list[GraphClass]:
    """Enumerate per spec with the file cache named after the mode."""
    if spec.trivalent and not spec.allow_loops:
        return _cached_graphs(spec.n, cache_dir, spec.max_classes, threads)
    mode = f"maxdeg{spec.max_degree}" + ("-loops" if spec.allow_loops else "")
    path = _cache_path(cache_dir, f"graphs-n{spec.n}-{mode}.txt")
    if path is not None and path.exists():
        return load_graphs(path)
    graphs = enumerate_graphs(spec)
    if path is not None:
        _write_lines(path, [g.canon.to_text() for g in graphs])
        _write_lines(
            _cache_path(cache_dir, f"graphs-n{spec.n}-{mode}.count"),
            [str(len(graphs))],
        )
    return graphs


def _orbit_reps_job(args: tuple[GraphClass, int]):
    cls, p = args
    return ForestIndex(cls).orbit_representatives(p)


def _cached_basis(
    n: int,
    p: int,
    graphs: list[GraphClass],
    store: ClassStore,
    cache_dir: Optional[str],
    max_basis: Optional[int],
    threads: int,
) -> ChainBasis:
    path = _cache_path(cache_dir, f"basis-n{n}-p{p}.txt")
    if path is not None and path.exists():
        elements = []
        for line in path.read_text(encoding="ascii").splitlines():
            if not line.strip():
                continue
            gtext, ftext = line.split(" | F=")
            cls = store.intern(canonical_form(Multigraph.from_text(gtext)))
            forest = tuple(int(x) for x in ftext.split(",")) if ftext else ()
            elements.append(ForestedGraph(cls, forest, store.block_key(cls, forest)))
        return ChainBasis(n=n, p=p, elements=tuple(elements))
    orbit_lists = None
    if threads > 1:
        orbit_lists = pmap(_orbit_reps_job, [(g, p) for g in graphs], threads)
    basis = build_chain_basis(n, p, graphs, store, max_basis, orbit_lists)
    if path is not None:
        _write_lines(path, [el.to_text() for el in basis.elements])
    return basis


def _cached_matrix(
    name: str,
    cache_dir: Optional[str],
    build,
) -> SparseIntMat:
    path = _cache_path(cache_dir, f"{name}.txt")
    rows_path = _cache_path(cache_dir, f"{name}.rows.txt")
    if path is not None and path.exists():
        lines = path.read_text(encoding="ascii").splitlines()
        labels = None
        if rows_path.exists():
            labels = tuple(
                _label_from_text(line)
                for line in rows_path.read_text(encoding="ascii").splitlines()
                if line.strip()
            )
        return SparseIntMat.from_lines(lines, labels)
    mat = build()
    if path is not None:
        _write_lines(path, mat.to_lines())
        if mat.row_labels is not None:
            _write_lines(rows_path, [_label_to_text(k) for k in mat.row_labels])
    return mat


def _label_to_text(key) -> str:
    graph_key, forest = key
    body = ",".join(str(i) for i in forest)
    return f"{graph_key.decode('ascii')} | F={body}"


def _label_from_text(line: str):
    gtext, ftext = line.split(" | F=")
    forest = tuple(int(x) for x in ftext.split(",")) if ftext else ()
    return (gtext.encode("ascii"), forest)


# ---------------------------------------------------------------------------
# parallel enumeration wrapper

def _children_job(parent: Multigraph) -> list[tuple[bytes, GraphClass]]:
    from .enumerator import _insert_edge

    out = []
    e_cnt = parent.edge_count
    for e in range(e_cnt):
        for f in range(e, e_cnt):
            cls = canonical_form(_insert_edge(parent, e, f))
            out.append((cls.canonical_key, cls))
    return out


def enumerate_trivalent_parallel(n: int, max_classes: int, threads: int) -> list[GraphClass]:
    """Trivalent admissible classes; parallel over parents when asked."""
    if threads <= 1:
        return enumerate_graphs(EnumSpec(n, max_classes=max_classes))
    from .enumerator import _theta, _passes

    level = {c.canonical_key: c for c in [canonical_form(_theta())]}
    for _ in range(3, n + 1):
        parents = [level[k].canon for k in sorted(level)]
        nxt: dict[bytes, GraphClass] = {}
        for batch in pmap(_children_job, parents, threads):
            for key, cls in batch:
                nxt.setdefault(key, cls)
        if len(nxt) > max_classes:
            raise ResourceCapError(f"class cap {max_classes} exceeded", partial=len(nxt))
        level = nxt
    spec = EnumSpec(n, max_classes=max_classes)
    out = [cls for cls in level.values() if _passes(cls.canon, spec)]
    out.sort(key=lambda c: c.canonical_key)
    return out


# ---------------------------------------------------------------------------
# the profile computation

def _nullspace_job(args):
    sub, f, max_nnz = args
    from .exactla import nullspace_of

    return nullspace_of(sub, f, max_nnz)


def _blockwise_nullspace(
    mat: SparseIntMat,
    basis: ChainBasis,
    f: FieldSpec,
    max_nnz: Optional[int],
    threads: int,
) -> NullspaceBasis:
    from .exactla import _column_submatrix

    block_keys = sorted(basis.blocks)
    col_blocks = [basis.blocks[k] for k in block_keys]
    if threads > 1 and len(col_blocks) > 1:
        subs = [(_column_submatrix(mat, cols), f, max_nnz) for cols in col_blocks]
        results = pmap(_nullspace_job, subs, threads)
        columns: list[dict[int, int]] = []
        for cols, ns in zip(col_blocks, results):
            for vec in ns.columns:
                columns.append({cols[i]: v for i, v in vec.items()})
        return NullspaceBasis(mat.cols, len(columns), tuple(columns))
    return nullspace_blockwise(mat, col_blocks, f, max_nnz)


def compute_rank_profile(
    n: int,
    p_range: Optional[Sequence[int]] = None,
    f: Optional[FieldSpec] = None,
    cache_dir: Optional[str] = None,
    threads: int = 1,
    max_nnz: int = DEFAULT_MAX_NNZ,
    max_basis: int = DEFAULT_MAX_BASIS,
    second_prime: Optional[int] = None,
    max_classes: int = 10_000_000,
) -> RankProfile:
    """Compute a_p, b_p, c_p and homology dimensions for one n.

    ``c_p`` needs the basis one level down, so it is computed only when
    ``p - 1`` is also in range (or p = 0, where it is zero).  Resource caps
    leave explicit holes instead of aborting the whole profile.
    """
    if n < 2:
        raise ValueError("rank must be >= 2")
    if f is None:
        f = FieldSpec.prime(DEFAULT_PRIMES[0])
    p_list = sorted(set(default_p_range(n) if p_range is None else p_range))
    top = 2 * n - 3
    if p_list and not (0 <= p_list[0] and p_list[-1] <= top):
        raise ValueError(f"p_range must lie within [0, {top}]")

    cached = _load_cached_report(n, p_list, f, cache_dir)
    if cached is not None:
        return cached

    timings: dict[str, float] = {}
    t0 = time.monotonic()
    graphs = _cached_graphs(n, cache_dir, max_classes, threads)
    timings["graphs"] = time.monotonic() - t0

    store = ClassStore()
    size = top + 1
    a: list[Optional[int]] = [None] * size
    b: list[Optional[int]] = [None] * size
    c: list[Optional[int]] = [None] * size
    holes: list[int] = []
    bases: dict[int, ChainBasis] = {}
    nullspaces: dict[int, NullspaceBasis] = {}

    def run_level(p: int, fld: FieldSpec) -> None:
        # The basis survives a later-stage cap so c at p+1 stays computable.
        t = time.monotonic()
        basis = bases.get(p)
        if basis is None:
            try:
                basis = _cached_basis(n, p, graphs, store, cache_dir, max_basis, threads)
            except ResourceCapError as exc:
                print(f"n={n} p={p}: {exc}; leaving a hole")
                holes.append(p)
                return
            bases[p] = basis
            timings[f"basis-p{p}"] = time.monotonic() - t
        a[p] = basis.dim
        ns: Optional[NullspaceBasis] = None
        try:
            t = time.monotonic()
            dc = _cached_matrix(
                f"dc-n{n}-p{p}", cache_dir, lambda: boundary_contract(basis, store)
            )
            timings[f"dc-p{p}"] = time.monotonic() - t
            t = time.monotonic()
            ns = _blockwise_nullspace(dc, basis, fld, max_nnz, threads)
            nullspaces[p] = ns
            b[p] = ns.dim
            timings[f"nullspace-p{p}"] = time.monotonic() - t
            if cache_dir is not None:
                _write_lines(
                    _cache_path(cache_dir, f"ns-n{n}-p{p}-f{fld.label()}.txt"),
                    [f"field={fld.label()}"] + ns.to_mat().to_lines(),
                )
        except ResourceCapError as exc:
            print(f"n={n} p={p}: {exc}; leaving a hole")
            holes.append(p)
        if p == 0:
            c[p] = 0
            return
        if ns is None or (p - 1) not in bases:
            return
        try:
            t = time.monotonic()
            dr = _cached_matrix(
                f"dr-n{n}-p{p}",
                cache_dir,
                lambda: boundary_remove(basis, bases[p - 1], store),
            )
            composite = matmul(dr, ns.to_mat())
            c[p] = rank_of(composite, fld, max_nnz)
            timings[f"c-p{p}"] = time.monotonic() - t
        except ResourceCapError as exc:
            print(f"n={n} p={p}: {exc}; leaving a hole")
            if p not in holes:
                holes.append(p)

    for p in p_list:
        run_level(p, f)

    profile = RankProfile(
        n=n,
        field=f.label(),
        primes=[f.p] if f.kind == "prime" else [],
        p_range=p_list,
        a=a,
        b=b,
        c=c,
        dims=[None] * size,
        holes=sorted(holes),
        timings=timings,
        maxrss_kb=resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    )
    try:
        profile.dims = homology_dimensions(profile)
    except NegativeDimensionError:
        profile = _retry_negative(profile, bases, store, f, second_prime, max_nnz, threads)
    profile.report_text = profile.to_json()
    path = _cache_path(cache_dir, f"report-n{n}.json")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(profile.report_text, encoding="ascii")
    return profile


def _retry_negative(
    profile: RankProfile,
    bases: dict[int, ChainBasis],
    store: ClassStore,
    f: FieldSpec,
    second_prime: Optional[int],
    max_nnz: int,
    threads: int,
) -> RankProfile:
    """Retry policy: recompute everything with the second prime, then fall
    back to the rationals if the matrices are small enough."""
    fallbacks = []
    if f.kind == "prime":
        alt = second_prime or next(q for q in DEFAULT_PRIMES if q != f.p)
        fallbacks.append(FieldSpec.prime(alt))
    fallbacks.append(FieldSpec.rational())
    for fld in fallbacks:
        try:
            for p in sorted(bases):
                basis = bases[p]
                dc = boundary_contract(basis, store)
                ns = _blockwise_nullspace(dc, basis, fld, max_nnz, threads)
                profile.b[p] = ns.dim
                if p == 0:
                    profile.c[p] = 0
                elif (p - 1) in bases:
                    dr = boundary_remove(basis, bases[p - 1], store)
                    profile.c[p] = rank_of(matmul(dr, ns.to_mat()), fld, max_nnz)
            profile.dims = homology_dimensions(profile)
            profile.field = fld.label()
            profile.primes = [fld.p] if fld.kind == "prime" else []
            return profile
        except NegativeDimensionError:
            continue
        except Exception:
            continue
    raise NegativeDimensionError(
        f"negative dimensions persisted for n={profile.n} after prime retry"
    )


def _load_cached_report(
    n: int, p_list: list[int], f: FieldSpec, cache_dir: Optional[str]
) -> Optional[RankProfile]:
    path = _cache_path(cache_dir, f"report-n{n}.json")
    if path is None or not path.exists():
        return None
    try:
        profile = RankProfile.from_json(path.read_text(encoding="ascii"))
    except (ValueError, KeyError):
        return None
    if profile.p_range == p_list and profile.field == f.label():
        return profile
    return None


def cross_prime_profile(
    n: int,
    p_range: Optional[Sequence[int]] = None,
    primes: tuple[int, int] = DEFAULT_PRIMES,
    **kwargs,
) -> RankProfile:
    """Run the profile under two primes; any rank disagreement aborts."""
    first = compute_rank_profile(n, p_range, FieldSpec.prime(primes[0]), **kwargs)
    second = compute_rank_profile(
        n,
        p_range,
        FieldSpec.prime(primes[1]),
        **{**kwargs, "cache_dir": None},
    )
    if first.b != second.b or first.c != second.c:
        raise CrossPrimeError(
            f"rank disagreement between GF({primes[0]}) and GF({primes[1]}) at n={n}: "
            f"b {first.b} vs {second.b}; c {first.c} vs {second.c}"
        )
    first.primes = list(primes)
    first.report_text = first.to_json()
    return first


# ---------------------------------------------------------------------------
# full-complex oracle (small ranks)

def oracle_graphs(n: int) -> list[GraphClass]:
    """Every connected bridgeless min-valence-3 graph of rank n, loops
    allowed: this is the contraction closure of the trivalent classes."""
    spec = EnumSpec(n, max_degree=2 * n - 3, allow_loops=True)
    classes = pairing_classes(spec)
    return [classes[k] for k in sorted(classes)]


def oracle_full_complex(n: int, verify_d_squared: bool = True) -> list[int]:
    """Homology dimensions of the full signed complex, exactly over Q.

    Only ranks 2 and 3 are allowed; beyond that the graph counts blow up.
    """
    if n not in (2, 3):
        raise ValueError("full-complex oracle is limited to ranks 2 and 3")
    graphs = oracle_graphs(n)
    store = ClassStore()
    for g in graphs:
        store.intern(g)
    bases: list[ChainBasis] = []
    k = 0
    while True:
        basis = build_chain_basis(n, k, graphs, store)
        if k > 0 and basis.dim == 0:
            break
        bases.append(basis)
        k += 1
    mats: list[SparseIntMat] = []
    for k in range(1, len(bases)):
        mats.append(_oracle_boundary(bases[k], bases[k - 1], store))
    if verify_d_squared:
        for k in range(1, len(mats)):
            square = matmul(mats[k - 1], mats[k])
            if square.entries:
                raise AssertionError(f"oracle boundary squared nonzero at k={k + 1}")
    rational = FieldSpec.rational()
    ranks = [rank_of(m, rational) for m in mats] + [0]
    dims = []
    for k, basis in enumerate(bases):
        up = ranks[k] if k < len(ranks) else 0
        down = ranks[k - 1] if k >= 1 else 0
        dims.append(basis.dim - up - down)
    top = 2 * n - 3
    dims += [0] * (top + 1 - len(dims))
    return dims[: top + 1]


def _oracle_boundary(b: ChainBasis, target: ChainBasis, store: ClassStore) -> SparseIntMat:
    """Combined boundary (contraction minus removal) into the lower basis."""
    acc: dict[tuple[int, int], int] = {}
    for col, el in enumerate(b.elements):
        src = store.intern(el.graph)
        fi = store.forest_index(src)
        forest = el.forest
        for i, pos in enumerate(forest, start=1):
            sgn = -1 if i & 1 else 1
            target_cls, pos_map = store.contract_one(src, pos)
            mapped = [pos_map[x] for x in forest if x != pos]
            ref = store.forest_index(target_cls).normalize(mapped)
            if ref.sign != 0:
                row = target.index.get(ref.key)
                if row is None:
                    raise chain_mod.InconsistencyError(
                        f"oracle contraction target missing: {ref.key}"
                    )
                acc[(row, col)] = acc.get((row, col), 0) + sgn * ref.sign
            ref = fi.normalize([x for x in forest if x != pos])
            if ref.sign != 0:
                row = target.index.get(ref.key)
                if row is None:
                    raise chain_mod.InconsistencyError(
                        f"oracle removal target missing: {ref.key}"
                    )
                acc[(row, col)] = acc.get((row, col), 0) - sgn * ref.sign
    entries = tuple(
        sorted((r, c, v) for (r, c), v in acc.items() if v != 0)
    )
    return SparseIntMat(target.dim, b.dim, entries, tuple(e.key for e in target.elements))


def oracle_euler_characteristic(n: int) -> int:
    """Alternating sum of full-complex dimensions (equals that of homology)."""
    graphs = oracle_graphs(n)
    store = ClassStore()
    total = 0
    k = 0
    while True:
        basis = build_chain_basis(n, k, graphs, store)
        if k > 0 and basis.dim == 0:
            break
        total += basis.dim if k % 2 == 0 else -basis.dim
        k += 1
    return total
