"""
Decorated Localization Graphs
Stable graphs (V, E, N, g) with fixed-point labels p: V -> points, deduplicated
up to isomorphism and counted with automorphism orders using networkx.
"""
import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Dict, List, Optional, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

logger = logging.getLogger(__name__)

MAX_GENUS = 2
MAX_MARKINGS = 4


@dataclass(frozen=True)
class DecoratedGraph:
    """
    genera[v] is the vertex genus, edges are vertex pairs (u <= v, self-edges
    allowed), legs[i] is the vertex carrying marking i + 1 and labels[v] the
    fixed point of vertex v (None for a bare topology).
    """

    genera: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    legs: Tuple[int, ...]
    labels: Optional[Tuple[int, ...]] = None
    automorphisms: int = 1

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    @property
    def h1(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def valence(self, v: int) -> int:
        out = sum(1 for leg in self.legs if leg == v)
        for a, b in self.edges:
            out += (a == v) + (b == v)
        return out

    def flags(self, v: int) -> List[Tuple[str, int, int]]:
        """
        Flags at v in a fixed order: ("leg", i, 0) for marking i and
        ("edge", e, side) for each end of edge e at v.
        """
        out = [("leg", i, 0) for i, leg in enumerate(self.legs) if leg == v]
        for e, (a, b) in enumerate(self.edges):
            if a == v:
                out.append(("edge", e, 0))
            if b == v:
                out.append(("edge", e, 1))
        return out

    def is_stable(self) -> bool:
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.genera))

    def is_connected(self) -> bool:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges)
        return nx.is_connected(graph)

    def incidence_graph(self) -> nx.Graph:
        """
        Vertices, half-edges, edges and legs as nodes, so that graph
        automorphisms (including flips of self-edges and swaps of parallel
        edges) are node-coloured automorphisms.
        """
        graph = nx.Graph()
        for v, g in enumerate(self.genera):
            label = self.labels[v] if self.labels is not None else None
            graph.add_node(("v", v), kind="vertex", genus=g, label=label)
        for e, (a, b) in enumerate(self.edges):
            graph.add_node(("e", e), kind="edge")
            for side, end in enumerate((a, b)):
                graph.add_node(("h", e, side), kind="half")
                graph.add_edge(("e", e), ("h", e, side))
                graph.add_edge(("h", e, side), ("v", end))
        for i, v in enumerate(self.legs):
            graph.add_node(("l", i), kind="leg", marking=i)
            graph.add_edge(("l", i), ("v", v))
        return graph

    def decorate(self, labels: Tuple[int, ...]) -> "DecoratedGraph":
        return DecoratedGraph(self.genera, self.edges, self.legs, tuple(labels))


def _node_match(a: Dict, b: Dict) -> bool:
    return a == b


def _wl_hash(graph: nx.Graph) -> str:
    for node, data in graph.nodes(data=True):
        data["key"] = "|".join(f"{k}={data[k]}" for k in sorted(data) if k != "key")
    return nx.weisfeiler_lehman_graph_hash(graph, node_attr="key")


def automorphism_order(graph: DecoratedGraph) -> int:
    incidence = graph.incidence_graph()
    matcher = GraphMatcher(incidence, incidence, node_match=_node_match)
    return sum(1 for _ in matcher.isomorphisms_iter())


def _deduplicate(candidates: List[DecoratedGraph]) -> List[DecoratedGraph]:
    buckets: Dict[str, List[Tuple[DecoratedGraph, nx.Graph]]] = {}
    unique = []
    for cand in candidates:
        incidence = cand.incidence_graph()
        bucket = buckets.setdefault(_wl_hash(incidence), [])
        if any(nx.is_isomorphic(incidence, other, node_match=_node_match) for _, other in bucket):
            continue
        bucket.append((cand, incidence))
        unique.append(cand)
    return unique


def _with_automorphisms(graph: DecoratedGraph) -> DecoratedGraph:
    return DecoratedGraph(graph.genera, graph.edges, graph.legs, graph.labels, automorphism_order(graph))


def _genus_splits(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for tail in _genus_splits(total - first, parts - 1):
            yield (first,) + tail


def stable_topologies(g: int, n: int) -> List[DecoratedGraph]:
    """
    All connected stable graphs of genus g with n markings, one per
    isomorphism class, with automorphism orders.
    """
    if 2 * g - 2 + n <= 0:
        return []
    candidates = []
    for n_vertices in range(1, 2 * g - 2 + n + 1):
        pairs = [(a, b) for a in range(n_vertices) for b in range(a, n_vertices)]
        for h1 in range(g + 1):
            n_edges = h1 + n_vertices - 1
            for genera in _genus_splits(g - h1, n_vertices):
                for edges in combinations_with_replacement(pairs, n_edges):
                    for legs in product(range(n_vertices), repeat=n):
                        cand = DecoratedGraph(genera, tuple(edges), tuple(legs))
                        if cand.is_stable() and cand.is_connected():
                            candidates.append(cand)
    topologies = [_with_automorphisms(t) for t in _deduplicate(candidates)]
    logger.debug("(%d, %d): %d candidates, %d topologies", g, n, len(candidates), len(topologies))
    return topologies


def _unstable_two_point(n_points: int) -> List[DecoratedGraph]:
    """Two vertices joined by one edge, one marking on each."""
    bare = DecoratedGraph((0, 0), ((0, 1),), (0, 1))
    return [_with_automorphisms(bare.decorate(labels)) for labels in product(range(n_points), repeat=2)]


def enumerate_graphs(g: int, n: int, n_points: int = 4) -> List[DecoratedGraph]:
    """
    Duplicate-free decorated graphs of type (g, n) with vertex labels in
    range(n_points), each carrying its automorphism order.

    (0, 2) returns the unstable two-vertex family; other unstable types
    return an empty list.

    Raises:
        ValueError: if g or n exceeds the supported range
    """
    if g > MAX_GENUS or n > MAX_MARKINGS or g < 0 or n < 0:
        raise ValueError(f"graph enumeration supports g <= {MAX_GENUS}, n <= {MAX_MARKINGS}")
    if (g, n) == (0, 2):
        return _unstable_two_point(n_points)
    decorated = []
    for topology in stable_topologies(g, n):
        labelled = [topology.decorate(labels) for labels in product(range(n_points), repeat=topology.n_vertices)]
        decorated.extend(_with_automorphisms(d) for d in _deduplicate(labelled))
    logger.info("(%d, %d): %d decorated graphs", g, n, len(decorated))
    return decorated
