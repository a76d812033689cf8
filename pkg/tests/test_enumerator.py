from __future__ import annotations

import pytest

from outhom.enumerator import (
    EnumSpec,
    ResourceCapError,
    cubic_level,
    enumerate_graphs,
    pairing_classes,
)
from outhom.multigraph import classify


class TestSpec:
    def test_rank_too_small(self):
        with pytest.raises(ValueError):
            EnumSpec(1)

    def test_degree_bound(self):
        with pytest.raises(ValueError):
            EnumSpec(2, max_degree=2)  # 2n-3 = 1

    def test_trivalent_flag(self):
        assert EnumSpec(3).trivalent
        assert not EnumSpec(3, max_degree=1).trivalent


class TestTrivalentEnumeration:
    def test_n2_is_exactly_theta(self):
        graphs = enumerate_graphs(EnumSpec(2))
        assert len(graphs) == 1
        assert graphs[0].canon.to_text() == "V=2 E=0-1,0-1,0-1"
        # brute-force oracle over all pairings of 6 half-edges
        oracle = pairing_classes(EnumSpec(2))
        assert set(oracle) == {graphs[0].canonical_key}

    @pytest.mark.parametrize("n", [3, 4])
    def test_counts_match_pairing_oracle(self, n):
        main = {g.canonical_key for g in enumerate_graphs(EnumSpec(n))}
        oracle = set(pairing_classes(EnumSpec(n)))
        assert main == oracle

    def test_outputs_are_admissible_trivalent(self, trivalent_by_rank):
        for n, graphs in trivalent_by_rank.items():
            for cls in graphs:
                facts = classify(cls.canon, n)
                assert facts.admissible and facts.degree == 0
                assert cls.canon.vertex_count == 2 * n - 2
                assert cls.canon.edge_count == 3 * n - 3

    def test_sorted_and_duplicate_free(self, trivalent_by_rank):
        for graphs in trivalent_by_rank.values():
            keys = [g.canonical_key for g in graphs]
            assert keys == sorted(keys)
            assert len(keys) == len(set(keys))

    def test_known_class_counts(self, trivalent_by_rank):
        assert [len(trivalent_by_rank[n]) for n in (2, 3, 4, 5)] == [1, 2, 5, 16]

    def test_resource_cap(self):
        with pytest.raises(ResourceCapError) as err:
            cubic_level(4, max_classes=1)
        assert err.value.partial is not None


class TestAllDegreeEnumeration:
    def test_loop_allowed_rank2(self):
        spec = EnumSpec(2, max_degree=1, allow_loops=True)
        found = sorted(pairing_classes(spec))
        assert found == [b"V=1 E=0-0,0-0", b"V=2 E=0-1,0-1,0-1"]

    def test_admissible_rank3_degree1(self):
        # loopless bridgeless degree <= 1: the two trivalent classes plus
        # the double-double graph on 3 vertices
        spec = EnumSpec(3, max_degree=1)
        found = pairing_classes(spec)
        degrees = sorted(
            classify(cls.canon, 3).degree for cls in found.values()
        )
        assert degrees == [0, 0, 1]

    def test_enumerate_graphs_dispatches_to_pairing(self):
        spec = EnumSpec(3, max_degree=1, allow_loops=True)
        graphs = enumerate_graphs(spec)
        keys = [g.canonical_key for g in graphs]
        assert keys == sorted(keys)
        assert set(keys) == set(pairing_classes(spec))
