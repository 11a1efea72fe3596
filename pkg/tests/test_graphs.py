"""
Tests for stable graph enumeration, labelling and automorphism orders.
"""
import sys
from pathlib import Path

import pytest

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.graphs import DecoratedGraph, automorphism_order, enumerate_graphs, stable_topologies


# ---------------------------------------------------------------------------
# Tests — Topologies
# ---------------------------------------------------------------------------

class TestStableTopologies:
    @pytest.mark.parametrize("g, n, count", [
        (0, 3, 1),
        (0, 4, 4),
        (1, 1, 2),
        (1, 2, 5),
        (2, 0, 7),
    ])
    def test_counts(self, g, n, count):
        assert len(stable_topologies(g, n)) == count

    def test_genus_two_automorphisms(self):
        orders = sorted(t.automorphisms for t in stable_topologies(2, 0))
        assert orders == [1, 2, 2, 2, 8, 8, 12]

    def test_all_stable_and_connected(self):
        for t in stable_topologies(1, 2):
            assert t.genus == 1
            assert t.is_stable()
            assert t.is_connected()

    def test_unstable_type(self):
        assert stable_topologies(1, 0) == []


# ---------------------------------------------------------------------------
# Tests — Decorated graphs
# ---------------------------------------------------------------------------

class TestEnumerateGraphs:
    def test_two_point_family(self):
        graphs = enumerate_graphs(0, 2)
        assert len(graphs) == 16
        assert all(g.automorphisms == 1 for g in graphs)

    def test_genus_one_no_markings_is_empty(self):
        assert enumerate_graphs(1, 0) == []

    @pytest.mark.parametrize("g, n, count", [
        (0, 3, 4),
        (1, 1, 8),
        (0, 4, 52),
    ])
    def test_decorated_counts(self, g, n, count):
        assert len(enumerate_graphs(g, n)) == count

    def test_fewer_points(self):
        assert len(enumerate_graphs(0, 3, n_points=2)) == 2

    @pytest.mark.parametrize("g, n", [(3, 0), (0, 5), (-1, 2)])
    def test_out_of_range(self, g, n):
        with pytest.raises(ValueError):
            enumerate_graphs(g, n)


class TestAutomorphisms:
    def test_self_edge_flip(self):
        loop = DecoratedGraph((0,), ((0, 0),), (0,))
        assert automorphism_order(loop) == 2

    def test_labels_break_symmetry(self):
        theta = DecoratedGraph((0, 0), ((0, 1), (0, 1), (0, 1)), ())
        assert automorphism_order(theta) == 12
        assert automorphism_order(theta.decorate((0, 1))) == 6
