"""Multigraphs with positionally identified edges.

A graph is stored as a vertex count plus a sorted list of endpoint pairs;
parallel edges appear as repeated pairs and are distinguished by their
position in the list.  Loops (u, u) are representable because edge
contraction produces them, even though they are never admissible.

The canonical labeling here is a small self-contained partition-refinement
canonicalizer: graphs in this project have at most ~2 dozen vertices, so a
plain backtracking search over refined partitions is entirely adequate.  It
returns, besides the canonical form, generators of the automorphism group
acting on vertices and on edge positions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

Edge = tuple[int, int]


@dataclass(frozen=True)
class Multigraph:
    """An undirected multigraph; edges sorted, parallel edges kept distinct."""

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be >= 0")
        norm = tuple(sorted((u, v) if u <= v else (v, u) for u, v in self.edges))
        object.__setattr__(self, "edges", norm)
        for u, v in norm:
            if not (0 <= u <= v < self.vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range for V={self.vertex_count}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def valences(self) -> list[int]:
        """Valence of each vertex; a loop contributes 2 to its vertex."""
        val = [0] * self.vertex_count
        for u, v in self.edges:
            val[u] += 1
            val[v] += 1
        return val

    def multiplicity(self) -> dict[Edge, int]:
        mult: dict[Edge, int] = {}
        for e in self.edges:
            mult[e] = mult.get(e, 0) + 1
        return mult

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return False
        seen = {0}
        stack = [0]
        adj = self.neighbors()
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def to_text(self) -> str:
        """Line format used by every cache file: ``V=<k> E=<u>-<v>,...``."""
        body = ",".join(f"{u}-{v}" for u, v in self.edges)
        return f"V={self.vertex_count} E={body}"

    @staticmethod
    def from_text(line: str) -> "Multigraph":
        line = line.strip()
        try:
            vpart, epart = line.split(" ", 1)
            assert vpart.startswith("V=") and epart.startswith("E=")
            v = int(vpart[2:])
            body = epart[2:]
            edges = []
            if body:
                for tok in body.split(","):
                    a, b = tok.split("-")
                    edges.append((int(a), int(b)))
        except (ValueError, AssertionError) as exc:
            raise ValueError(f"bad graph line: {line!r}") from exc
        return Multigraph(v, tuple(edges))


@dataclass(frozen=True)
class GraphFacts:
    """Result of :func:`classify`: admissibility flags for a fixed rank."""

    connected: bool
    bridgeless: bool
    loopless: bool
    min_valence_ok: bool
    rank: Optional[int]
    degree: int
    admissible: bool


def classify(g: Multigraph, n: int) -> GraphFacts:
    """Admissibility of ``g`` for rank ``n``.

    Admissible means: connected, bridgeless, loopless, every valence >= 3,
    and first Betti number E - V + 1 equal to ``n``.  The degree is the
    total excess valence over trivalent, summed over vertices.
    """
    connected = g.is_connected()
    loopless = all(u != v for u, v in g.edges)
    val = g.valences()
    min_valence_ok = bool(val) and min(val) >= 3
    degree = sum(d - 3 for d in val)
    rank = g.edge_count - g.vertex_count + 1 if connected else None
    bridgeless = connected and not _has_bridge(g)
    admissible = (
        connected and bridgeless and loopless and min_valence_ok and rank == n
    )
    return GraphFacts(connected, bridgeless, loopless, min_valence_ok, rank, degree, admissible)


def _has_bridge(g: Multigraph) -> bool:
    # Brute force: graphs here are tiny.  An edge with a parallel partner is
    # never a bridge; loops never are.
    mult = g.multiplicity()
    for pos, (u, v) in enumerate(g.edges):
        if u == v or mult[(u, v)] > 1:
            continue
        if not _connected_without(g, pos):
            return True
    return False


def _connected_without(g: Multigraph, skip: int) -> bool:
    if g.vertex_count == 0:
        return False
    adj: list[list[int]] = [[] for _ in range(g.vertex_count)]
    for pos, (u, v) in enumerate(g.edges):
        if pos == skip:
            continue
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.vertex_count


def contract_edges(g: Multigraph, which: Iterable[int]) -> Multigraph:
    """Contract the edges at the given positions to points."""
    return contract_edges_mapped(g, which)[0]


def contract_edges_mapped(
    g: Multigraph, which: Iterable[int]
) -> tuple[Multigraph, tuple[Optional[int], ...]]:
    """Contract edges; also return the old-position -> new-position map.

    Contracted positions map to ``None``.  Merged vertices are relabeled by
    order of first appearance in the original vertex order, so the result is
    deterministic.  Parallel partners of a contracted edge become loops.
    """
    which = set(which)
    for pos in which:
        if not (0 <= pos < g.edge_count):
            raise IndexError(f"edge position {pos} out of range")
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pos in which:
        u, v = g.edges[pos]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)

    relabel: dict[int, int] = {}
    for v in range(g.vertex_count):
        r = find(v)
        if r not in relabel:
            relabel[r] = len(relabel)
    new_v = len(relabel)

    kept: list[tuple[Edge, int]] = []
    for pos, (u, v) in enumerate(g.edges):
        if pos in which:
            continue
        a, b = relabel[find(u)], relabel[find(v)]
        kept.append(((min(a, b), max(a, b)), pos))
    kept.sort(key=lambda t: (t[0], t[1]))
    pos_map: list[Optional[int]] = [None] * g.edge_count
    for new_pos, (_, old_pos) in enumerate(kept):
        pos_map[old_pos] = new_pos
    return Multigraph(new_v, tuple(e for e, _ in kept)), tuple(pos_map)


def apply_vertex_perm(g: Multigraph, perm: Sequence[int]) -> Multigraph:
    """Relabel vertices by ``perm`` (old label -> new label)."""
    return Multigraph(g.vertex_count, tuple((perm[u], perm[v]) for u, v in g.edges))


@dataclass(frozen=True)
class GraphClass:
    """Canonical form of a multigraph plus automorphism generators.

    ``vertex_perm_generators`` generate the automorphism group of ``canon``;
    ``edge_perm_generators`` are the induced permutations of edge positions,
    extended by the transpositions within each parallel class (those are
    automorphisms fixing all vertices).  ``canonical_key`` is shared by all
    graphs isomorphic to ``canon``.
    """

    canon: Multigraph
    vertex_perm_generators: tuple[tuple[int, ...], ...]
    edge_perm_generators: tuple[tuple[int, ...], ...]
    canonical_key: bytes


def canonical_form(g: Multigraph) -> GraphClass:
    """Canonicalize ``g``; deterministic and invariant under relabeling."""
    return canonical_form_mapped(g)[0]


def canonical_form_mapped(
    g: Multigraph,
) -> tuple[GraphClass, tuple[int, ...], tuple[int, ...]]:
    """Canonicalize ``g``; also return the vertex and edge position maps.

    The vertex map sends old labels to canonical labels.  The edge map sends
    old positions to canonical positions; within a parallel class the k-th
    position (in ascending order) maps to the k-th position of the image
    class, which is the completion convention used throughout.
    """
    if g.vertex_count < 1:
        raise ValueError("canonical_form requires at least one vertex")
    best_edges, best_perms = _canonical_search(g)
    canon = Multigraph(g.vertex_count, best_edges)
    perm0 = best_perms[0]
    vertex_gens = []
    seen = set()
    for perm in best_perms[1:]:
        aut = _compose(perm, _invert(perm0))
        if aut not in seen and not _is_identity(aut):
            seen.add(aut)
            vertex_gens.append(aut)
    edge_gens = [_induced_edge_perm(canon, aut) for aut in vertex_gens]
    edge_gens.extend(_parallel_class_transpositions(canon))
    dedup: list[tuple[int, ...]] = []
    for p in edge_gens:
        if p not in dedup and not _is_identity(p):
            dedup.append(p)
    cls = GraphClass(
        canon=canon,
        vertex_perm_generators=tuple(vertex_gens),
        edge_perm_generators=tuple(dedup),
        canonical_key=canon.to_text().encode("ascii"),
    )
    edge_map = _edge_map_under(g, canon, perm0)
    return cls, perm0, edge_map


def _canonical_search(
    g: Multigraph,
) -> tuple[tuple[Edge, ...], list[tuple[int, ...]]]:
    """Backtracking over refined partitions; returns the minimal edge list
    and every leaf permutation achieving it."""
    v_cnt = g.vertex_count
    mult = [[0] * v_cnt for _ in range(v_cnt)]
    loops = [0] * v_cnt
    for u, v in g.edges:
        if u == v:
            loops[u] += 1
        else:
            mult[u][v] += 1
            mult[v][u] += 1
    val = g.valences()
    adj = [[v for v in range(v_cnt) if mult[u][v]] for u in range(v_cnt)]

    def refine(cells: list[list[int]]) -> list[list[int]]:
        while True:
            cell_of = [0] * v_cnt
            for ci, cell in enumerate(cells):
                for v in cell:
                    cell_of[v] = ci
            new_cells: list[list[int]] = []
            changed = False
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    continue
                sigs: dict[tuple, list[int]] = {}
                for v in cell:
                    sig = (
                        tuple(sorted((cell_of[u], mult[v][u]) for u in adj[v])),
                        loops[v],
                    )
                    sigs.setdefault(sig, []).append(v)
                if len(sigs) > 1:
                    changed = True
                for sig in sorted(sigs):
                    new_cells.append(sigs[sig])
            cells = new_cells
            if not changed:
                return cells

    best: list[Optional[tuple[Edge, ...]]] = [None]
    best_perms: list[tuple[int, ...]] = []

    def leaf(cells: list[list[int]]) -> None:
        perm = [0] * v_cnt
        for pos, cell in enumerate(cells):
            perm[cell[0]] = pos
        edges = tuple(sorted(
            (perm[u], perm[v]) if perm[u] <= perm[v] else (perm[v], perm[u])
            for u, v in g.edges
        ))
        if best[0] is None or edges < best[0]:
            best[0] = edges
            best_perms.clear()
            best_perms.append(tuple(perm))
        elif edges == best[0]:
            best_perms.append(tuple(perm))

    def search(cells: list[list[int]]) -> None:
        cells = refine(cells)
        target = None
        for ci, cell in enumerate(cells):
            if len(cell) > 1:
                target = ci
                break
        if target is None:
            leaf(cells)
            return
        cell = cells[target]
        for v in cell:
            rest = [u for u in cell if u != v]
            search(cells[:target] + [[v], rest] + cells[target + 1:])

    initial: dict[tuple[int, int], list[int]] = {}
    for v in range(v_cnt):
        initial.setdefault((val[v], loops[v]), []).append(v)
    search([initial[k] for k in sorted(initial)])
    assert best[0] is not None
    return best[0], best_perms


def _invert(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def _compose(outer: Sequence[int], inner: Sequence[int]) -> tuple[int, ...]:
    # (outer . inner)(x) = outer[inner[x]]
    return tuple(outer[inner[x]] for x in range(len(inner)))


def _is_identity(perm: Sequence[int]) -> bool:
    return all(p == i for i, p in enumerate(perm))


def _class_positions(g: Multigraph) -> dict[Edge, list[int]]:
    classes: dict[Edge, list[int]] = {}
    for pos, e in enumerate(g.edges):
        classes.setdefault(e, []).append(pos)
    return classes


def _induced_edge_perm(g: Multigraph, sigma: Sequence[int]) -> tuple[int, ...]:
    """Edge position permutation induced by a vertex automorphism, completed
    within parallel classes in ascending order."""
    classes = _class_positions(g)
    out = [0] * g.edge_count
    for (u, v), positions in classes.items():
        a, b = sigma[u], sigma[v]
        image = classes[(min(a, b), max(a, b))]
        for src, dst in zip(positions, image):
            out[src] = dst
    return tuple(out)


def _parallel_class_transpositions(g: Multigraph) -> list[tuple[int, ...]]:
    gens = []
    for positions in _class_positions(g).values():
        for i in range(len(positions) - 1):
            p = list(range(g.edge_count))
            a, b = positions[i], positions[i + 1]
            p[a], p[b] = p[b], p[a]
            gens.append(tuple(p))
    return gens


def _edge_map_under(
    g: Multigraph, canon: Multigraph, perm: Sequence[int]
) -> tuple[int, ...]:
    src_classes = _class_positions(g)
    dst_classes = _class_positions(canon)
    out = [0] * g.edge_count
    for (u, v), positions in src_classes.items():
        a, b = perm[u], perm[v]
        image = dst_classes[(min(a, b), max(a, b))]
        for src, dst in zip(positions, image):
            out[src] = dst
    return tuple(out)
