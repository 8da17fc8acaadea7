"""Hashtag co-occurrence networks and their disparity-filter backbone.

Builds undirected weighted co-occurrence graphs from tweets, keeps the
statistically significant edges under the uniform null model, extracts the
largest connected component as the topic network, and computes summary
statistics and significance-level sweeps. Also holds the GraphML and
edge-list export formats.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable
from xml.etree import ElementTree as ET

from .corpus import Tweet, extract_hashtags


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected weighted graph over hashtag labels.

    Edges are keyed by canonically ordered pairs (u < v) with positive integer
    weights; node_usage counts the tweets each hashtag appeared in.
    """

    nodes: frozenset[str]
    edges: dict[tuple[str, str], int]
    node_usage: dict[str, int]

    def __post_init__(self) -> None:
        for (u, v), weight in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u > v:
                raise ValueError(f"edge ({u!r}, {v!r}) is not canonically ordered")
            if weight < 1:
                raise ValueError(f"edge ({u!r}, {v!r}) has non-positive weight {weight}")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u!r}, {v!r}) references a missing node")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[str, dict[str, int]]:
        adj: dict[str, dict[str, int]] = {node: {} for node in self.nodes}
        for (u, v), weight in self.edges.items():
            adj[u][v] = weight
            adj[v][u] = weight
        return adj

    def degree(self, node: str) -> int:
        return sum(1 for (u, v) in self.edges if node in (u, v))

    @classmethod
    def empty(cls) -> "WeightedGraph":
        return cls(frozenset(), {}, {})


@dataclass(frozen=True)
class BackboneStats:
    """Size and clustering summary of a topic network against its source graph."""

    nodes: int
    pct_original_nodes: float
    edges: int
    clustering: float


@dataclass(frozen=True, eq=False)
class TopicNetwork:
    """Largest connected component of the backbone, annotated for reporting."""

    graph: WeightedGraph
    alpha: float
    community: dict[str, int]
    centrality: dict[str, dict[str, float]]  # measure name -> node -> score
    node_size: dict[str, float]  # display radius, proportional to sqrt(usage)


def _canonical(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


def build_cooccurrence(tweets: Iterable[Tweet], anchors: Iterable[str] = ()) -> WeightedGraph:
    """Co-occurrence graph of the distinct non-anchor hashtags per tweet.

    Each unordered hashtag pair of a tweet adds weight 1 (repeats within one
    tweet are de-duplicated); node usage counts tweets containing the tag.
    """
    anchor_set = set(anchors)
    edges: dict[tuple[str, str], int] = {}
    usage: dict[str, int] = {}
    for tweet in tweets:
        tags = sorted(set(extract_hashtags(tweet.text)) - anchor_set)
        for tag in tags:
            usage[tag] = usage.get(tag, 0) + 1
        for u, v in combinations(tags, 2):
            edges[(u, v)] = edges.get((u, v), 0) + 1
    return WeightedGraph(nodes=frozenset(usage), edges=edges, node_usage=usage)


def disparity_significance(normalized_weight: float, degree: int) -> float:
    """Probability of an edge at least this strong under the uniform null model.

    Closed form of (k-1) * integral_0^p (1-x)^(k-2) dx subtracted from 1.
    Degree-1 nodes always return 1: they cannot certify their own edge.
    """
    if degree < 2:
        return 1.0
    return (1.0 - normalized_weight) ** (degree - 1)


def disparity_filter(graph: WeightedGraph, alpha: float) -> WeightedGraph:
    """Keep edges significant at level alpha from at least one endpoint.

    An edge survives when (1 - w/strength)^(degree-1) < alpha on either side.
    Kept edges retain their original weights; nodes left isolated are dropped.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    adj = graph.adjacency()
    strength = {node: float(sum(nbrs.values())) for node, nbrs in adj.items()}
    degree = {node: len(nbrs) for node, nbrs in adj.items()}
    kept: dict[tuple[str, str], int] = {}
    for (u, v), weight in graph.edges.items():
        significant = any(
            disparity_significance(weight / strength[end], degree[end]) < alpha
            for end in (u, v)
        )
        if significant:
            kept[(u, v)] = weight
    surviving = {node for edge in kept for node in edge}
    return WeightedGraph(
        nodes=frozenset(surviving),
        edges=kept,
        node_usage={node: graph.node_usage[node] for node in sorted(surviving)},
    )


def connected_components(graph: WeightedGraph) -> list[list[str]]:
    """Components as sorted node lists, ordered by size desc then smallest member."""
    adj = graph.adjacency()
    seen: set[str] = set()
    components: list[list[str]] = []
    for start in sorted(graph.nodes):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        members = []
        while stack:
            node = stack.pop()
            members.append(node)
            for nbr in adj[node]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        components.append(sorted(members))
    components.sort(key=lambda ms: (-len(ms), ms[0]))
    return components


def largest_component(graph: WeightedGraph) -> WeightedGraph:
    """Induced subgraph on the largest component (ties: smallest member node)."""
    components = connected_components(graph)
    if not components:
        return WeightedGraph.empty()
    keep = set(components[0])
    return WeightedGraph(
        nodes=frozenset(keep),
        edges={edge: w for edge, w in graph.edges.items() if edge[0] in keep and edge[1] in keep},
        node_usage={node: graph.node_usage[node] for node in sorted(keep)},
    )


def average_clustering(graph: WeightedGraph) -> float:
    """Mean over nodes of triangles / (k choose 2); degree < 2 contributes 0."""
    if not graph.nodes:
        return 0.0
    adj = graph.adjacency()
    coefficients = []
    for node in graph.nodes:
        neighbors = sorted(adj[node])
        k = len(neighbors)
        if k < 2:
            coefficients.append(0.0)
            continue
        triangles = sum(1 for a, b in combinations(neighbors, 2) if b in adj[a])
        coefficients.append(triangles / (k * (k - 1) / 2))
    return sum(coefficients) / len(coefficients)


def network_stats(original: WeightedGraph, topic: WeightedGraph) -> BackboneStats:
    pct = 100.0 * topic.node_count / original.node_count if original.node_count else 0.0
    return BackboneStats(
        nodes=topic.node_count,
        pct_original_nodes=pct,
        edges=topic.edge_count,
        clustering=average_clustering(topic),
    )


def alpha_sweep(graph: WeightedGraph, alphas: list[float] | None = None) -> list[tuple[float, float]]:
    """Topic-network node retention (percent of original nodes) per alpha."""
    if alphas is None:
        alphas = DEFAULT_SWEEP
    if alphas != sorted(alphas):
        raise ValueError("alphas must be sorted ascending")
    results = []
    for alpha in alphas:
        topic = largest_component(disparity_filter(graph, alpha))
        pct = 100.0 * topic.node_count / graph.node_count if graph.node_count else 0.0
        results.append((alpha, pct))
    return results


DEFAULT_ALPHA = 0.03
DEFAULT_SWEEP = [round(0.01 * i, 2) for i in range(1, 11)]


def export_edgelist_csv(graph: WeightedGraph) -> str:
    """Plain edge list `source,target,weight`, sorted by source then target."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["source", "target", "weight"])
    for (u, v), weight in sorted(graph.edges.items()):
        writer.writerow([u, v, weight])
    return buffer.getvalue()


def export_graphml(net: TopicNetwork) -> str:
    """GraphML document with usage/community/centrality/size node attributes."""
    root = ET.Element("graphml", xmlns="http://graphml.graphdrawing.org/xmlns")
    keys = [
        ("usage", "node", "usage", "int"),
        ("community", "node", "community", "int"),
    ]
    for measure in sorted(net.centrality):
        keys.append((measure, "node", measure, "double"))
    keys.append(("size", "node", "size", "double"))
    keys.append(("weight", "edge", "weight", "int"))
    for key_id, domain, name, kind in keys:
        ET.SubElement(
            root,
            "key",
            attrib={"id": key_id, "for": domain, "attr.name": name, "attr.type": kind},
        )
    graph_el = ET.SubElement(root, "graph", id="topic", edgedefault="undirected")
    for node in sorted(net.graph.nodes):
        node_el = ET.SubElement(graph_el, "node", id=node)
        values: list[tuple[str, str]] = [
            ("usage", str(net.graph.node_usage[node])),
            ("community", str(net.community[node])),
        ]
        for measure in sorted(net.centrality):
            values.append((measure, repr(net.centrality[measure][node])))
        values.append(("size", repr(net.node_size[node])))
        for key_id, text in values:
            data = ET.SubElement(node_el, "data", key=key_id)
            data.text = text
    for (u, v), weight in sorted(net.graph.edges.items()):
        edge_el = ET.SubElement(graph_el, "edge", source=u, target=v)
        data = ET.SubElement(edge_el, "data", key="weight")
        data.text = str(weight)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def backbone_stats_csv(rows: list[tuple[str, str, BackboneStats]]) -> str:
    """Summary CSV: one row per (anchor, window) with the backbone statistics."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["anchor", "window", "nodes", "pct_original_nodes", "edges", "clustering"])
    for anchor, window, stats in rows:
        writer.writerow(
            [
                anchor,
                window,
                stats.nodes,
                f"{stats.pct_original_nodes:.4f}",
                stats.edges,
                f"{stats.clustering:.4f}",
            ]
        )
    return buffer.getvalue()
