"""Centrality measures and community detection over topic networks.

Shortest-path betweenness (hop counts), current-flow (random walk)
betweenness via the graph Laplacian, PageRank power iteration on the
weighted walk, and two-phase Louvain modularity maximization. All
algorithms are deterministic: node orderings are sorted, ties break
lexicographically, and Louvain's visit order comes from a caller seed.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections import deque
from dataclasses import dataclass

import numpy as np

from .hashnet import (
    TopicNetwork,
    WeightedGraph,
    connected_components,
    disparity_filter,
    largest_component,
)

DENSE_SOLVER_LIMIT = 500  # above this, current-flow falls back to conjugate gradients


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach tolerance within its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class CentralityTable:
    measure: str
    scores: dict[str, float]
    ranking: tuple[str, ...]  # descending score, lexicographic tie-break


@dataclass(frozen=True)
class CommunityAssignment:
    labels: dict[str, int]
    modularity: float
    phase_modularities: tuple[float, ...]


def _rank(scores: dict[str, float]) -> tuple[str, ...]:
    return tuple(sorted(scores, key=lambda node: (-scores[node], node)))


def _pair_scale(n: int) -> float:
    return 2.0 / ((n - 1) * (n - 2))


def betweenness(graph: WeightedGraph) -> CentralityTable:
    """Shortest-path betweenness on hop counts, normalized to [0, 1].

    Edge weights are ignored for path length (co-occurrence weights are
    similarities, not distances). Graphs with fewer than 3 nodes have no
    intermediaries and score all zeros.
    """
    nodes = sorted(graph.nodes)
    n = len(nodes)
    scores = {node: 0.0 for node in nodes}
    if n < 3:
        return CentralityTable("betweenness", scores, _rank(scores))
    adj = graph.adjacency()
    for source in nodes:
        # Brandes: BFS pass then dependency accumulation
        order: list[str] = []
        preds: dict[str, list[str]] = {node: [] for node in nodes}
        sigma = {node: 0.0 for node in nodes}
        dist = {node: -1 for node in nodes}
        sigma[source] = 1.0
        dist[source] = 0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            order.append(node)
            for nbr in adj[node]:
                if dist[nbr] < 0:
                    dist[nbr] = dist[node] + 1
                    queue.append(nbr)
                if dist[nbr] == dist[node] + 1:
                    sigma[nbr] += sigma[node]
                    preds[nbr].append(node)
        delta = {node: 0.0 for node in nodes}
        for node in reversed(order):
            for pred in preds[node]:
                delta[pred] += sigma[pred] / sigma[node] * (1.0 + delta[node])
            if node != source:
                scores[node] += delta[node]
    # each unordered pair was accumulated from both endpoints
    half_scale = _pair_scale(n) / 2.0
    scores = {node: value * half_scale for node, value in scores.items()}
    return CentralityTable("betweenness", scores, _rank(scores))


def _edge_arrays(graph: WeightedGraph, index: dict[str, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    edges = sorted(graph.edges.items())
    ui = np.array([index[u] for (u, _), _ in edges], dtype=np.intp)
    vi = np.array([index[v] for (_, v), _ in edges], dtype=np.intp)
    w = np.array([weight for _, weight in edges], dtype=np.float64)
    return ui, vi, w


def _grounded_cg(
    ui: np.ndarray,
    vi: np.ndarray,
    w: np.ndarray,
    strength: np.ndarray,
    rhs: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 10000,
) -> np.ndarray:
    """Solve the Laplacian system grounded at node 0 by conjugate gradients."""

    def matvec(x_reduced: np.ndarray) -> np.ndarray:
        x = np.concatenate(([0.0], x_reduced))
        y = strength * x
        np.subtract.at(y, ui, w * x[vi])
        np.subtract.at(y, vi, w * x[ui])
        return y[1:]

    b = rhs[1:]
    x = np.zeros_like(b)
    r = b - matvec(x)
    p = r.copy()
    rs = float(r @ r)
    scale = float(b @ b) or 1.0
    for _ in range(max_iter):
        if rs <= tol * tol * scale:
            break
        ap = matvec(p)
        alpha = rs / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    else:
        raise ConvergenceError("conjugate gradient did not converge", math.sqrt(rs / scale))
    return np.concatenate(([0.0], x))


def random_walk_betweenness(graph: WeightedGraph, solver: str | None = None) -> CentralityTable:
    """Current-flow betweenness: average current through a node over all pairs.

    For each source-target pair a unit current is injected and extracted, the
    Laplacian is solved for potentials, and every non-endpoint node accrues
    half the sum of its absolute incident currents; totals are scaled by
    2/((n-1)(n-2)). Dense pseudo-inverse up to DENSE_SOLVER_LIMIT nodes,
    per-pair conjugate-gradient solves beyond.
    """
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if n == 0:
        raise ValueError("graph is empty")
    if len(connected_components(graph)) > 1:
        raise ValueError("graph is disconnected; run per connected component")
    scores = {node: 0.0 for node in nodes}
    if n < 3:
        return CentralityTable("random_walk_betweenness", scores, _rank(scores))
    if solver is None:
        solver = "dense" if n <= DENSE_SOLVER_LIMIT else "cg"
    if solver not in ("dense", "cg"):
        raise ValueError(f"unknown solver {solver!r}")

    index = {node: i for i, node in enumerate(nodes)}
    ui, vi, w = _edge_arrays(graph, index)
    strength = np.zeros(n)
    np.add.at(strength, ui, w)
    np.add.at(strength, vi, w)

    if solver == "dense":
        laplacian = np.diag(strength)
        laplacian[ui, vi] -= w
        laplacian[vi, ui] -= w
        inverse = np.linalg.pinv(laplacian)
    else:
        inverse = None

    totals = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            if inverse is not None:
                potentials = inverse[:, s] - inverse[:, t]
            else:
                rhs = np.zeros(n)
                rhs[s] = 1.0
                rhs[t] = -1.0
                potentials = _grounded_cg(ui, vi, w, strength, rhs)
            edge_current = w * np.abs(potentials[ui] - potentials[vi])
            throughflow = np.zeros(n)
            np.add.at(throughflow, ui, edge_current)
            np.add.at(throughflow, vi, edge_current)
            throughflow *= 0.5
            throughflow[s] = 0.0
            throughflow[t] = 0.0
            totals += throughflow
    totals *= _pair_scale(n)
    scores = {node: float(totals[index[node]]) for node in nodes}
    return CentralityTable("random_walk_betweenness", scores, _rank(scores))


def pagerank(
    graph: WeightedGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> CentralityTable:
    """Power iteration on the weighted random walk with uniform teleport.

    Transition probability out of a node is proportional to edge weight;
    nodes without edges spread their mass uniformly. Stops when the L1
    change drops below tol; raises ConvergenceError with the residual if
    max_iter is exhausted first.
    """
    if not graph.nodes:
        raise ValueError("graph is empty")
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    nodes = sorted(graph.nodes)
    n = len(nodes)
    index = {node: i for i, node in enumerate(nodes)}
    ui, vi, w = _edge_arrays(graph, index)
    strength = np.zeros(n)
    np.add.at(strength, ui, w)
    np.add.at(strength, vi, w)
    dangling = strength == 0.0
    safe_strength = np.where(dangling, 1.0, strength)

    rank = np.full(n, 1.0 / n)
    residual = math.inf
    for _ in range(max_iter):
        outflow = rank / safe_strength
        new_rank = np.zeros(n)
        np.add.at(new_rank, vi, w * outflow[ui])
        np.add.at(new_rank, ui, w * outflow[vi])
        dangling_mass = float(rank[dangling].sum())
        new_rank = damping * (new_rank + dangling_mass / n) + (1.0 - damping) / n
        residual = float(np.abs(new_rank - rank).sum())
        rank = new_rank
        if residual < tol:
            break
    else:
        raise ConvergenceError(
            f"pagerank did not converge in {max_iter} iterations (residual {residual:.3e})",
            residual,
        )
    scores = {node: float(rank[index[node]]) for node in nodes}
    return CentralityTable("pagerank", scores, _rank(scores))


def modularity(graph: WeightedGraph, labels: dict[str, int]) -> float:
    """Weighted Newman-Girvan modularity of a node labeling."""
    m = float(sum(graph.edges.values()))
    if m == 0.0:
        return 0.0
    strength: dict[str, float] = {node: 0.0 for node in graph.nodes}
    intra: dict[int, float] = {}
    for (u, v), weight in graph.edges.items():
        strength[u] += weight
        strength[v] += weight
        if labels[u] == labels[v]:
            intra[labels[u]] = intra.get(labels[u], 0.0) + weight
    degree_sum: dict[int, float] = {}
    for node, value in strength.items():
        community = labels[node]
        degree_sum[community] = degree_sum.get(community, 0.0) + value
    return math.fsum(
        intra.get(community, 0.0) / m - (degree_sum[community] / (2.0 * m)) ** 2
        for community in degree_sum
    )


def louvain(graph: WeightedGraph, seed: int = 0) -> CommunityAssignment:
    """Two-phase Louvain at resolution 1.

    Local phase: visit nodes in a seed-shuffled order and move each to the
    neighboring community with the largest modularity gain (ties go to the
    lowest community id; no move unless the gain is strictly positive).
    Aggregation phase: collapse communities to super-nodes and repeat until
    no move improves modularity.
    """
    if not graph.nodes:
        raise ValueError("graph is empty")
    node_names = sorted(graph.nodes)
    n0 = len(node_names)
    if not graph.edges:
        labels = {node: i for i, node in enumerate(node_names)}
        return CommunityAssignment(labels=labels, modularity=0.0, phase_modularities=())

    index = {node: i for i, node in enumerate(node_names)}
    adj: list[dict[int, float]] = [{} for _ in range(n0)]
    for (u, v), weight in graph.edges.items():
        adj[index[u]][index[v]] = float(weight)
        adj[index[v]][index[u]] = float(weight)
    self_weight = [0.0] * n0
    membership = list(range(n0))  # original node index -> current super-node
    rng = random.Random(seed)
    two_m = float(sum(sum(nbrs.values()) for nbrs in adj))  # = 2 * total weight
    phase_scores: list[float] = []

    while True:
        n = len(adj)
        k = [sum(adj[i].values()) + 2.0 * self_weight[i] for i in range(n)]
        community = list(range(n))
        total_degree = k.copy()
        order = list(range(n))
        rng.shuffle(order)

        moved_any = False
        while True:
            moves = 0
            for i in order:
                current = community[i]
                neighbor_weight: dict[int, float] = {}
                for j, weight in adj[i].items():
                    c = community[j]
                    neighbor_weight[c] = neighbor_weight.get(c, 0.0) + weight
                total_degree[current] -= k[i]
                stay_gain = neighbor_weight.get(current, 0.0) - total_degree[current] * k[i] / two_m
                best_community = current
                best_gain = stay_gain
                for c in sorted(neighbor_weight):
                    if c == current:
                        continue
                    gain = neighbor_weight[c] - total_degree[c] * k[i] / two_m
                    if gain > best_gain:
                        best_gain = gain
                        best_community = c
                community[i] = best_community
                total_degree[best_community] += k[i]
                if best_community != current:
                    moves += 1
            if moves == 0:
                break
            moved_any = True
        if not moved_any:
            break

        # flatten to original nodes and record this phase's modularity
        renumber: dict[int, int] = {}
        for c in sorted(set(community)):
            renumber[c] = len(renumber)
        membership = [renumber[community[super_node]] for super_node in membership]
        flat = {node_names[i]: membership[i] for i in range(n0)}
        phase_scores.append(modularity(graph, flat))

        # aggregate communities into super-nodes
        count = len(renumber)
        new_adj: list[dict[int, float]] = [{} for _ in range(count)]
        new_self = [0.0] * count
        for i in range(n):
            ci = renumber[community[i]]
            new_self[ci] += self_weight[i]
            for j, weight in adj[i].items():
                if j < i:
                    continue
                cj = renumber[community[j]]
                if ci == cj:
                    new_self[ci] += weight
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + weight
                    new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + weight
        adj = new_adj
        self_weight = new_self

    # final labels, renumbered by first appearance over sorted node names
    final: dict[str, int] = {}
    renumber = {}
    for i, node in enumerate(node_names):
        c = membership[i]
        if c not in renumber:
            renumber[c] = len(renumber)
        final[node] = renumber[c]
    return CommunityAssignment(
        labels=final,
        modularity=modularity(graph, final),
        phase_modularities=tuple(phase_scores),
    )


def build_topic_network(
    graph: WeightedGraph,
    alpha: float,
    seed: int = 0,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
    size_scale: float = 1.0,
) -> TopicNetwork:
    """Filter, take the largest component, and annotate it for reporting."""
    topic = largest_component(disparity_filter(graph, alpha))
    if not topic.nodes:
        return TopicNetwork(graph=topic, alpha=alpha, community={}, centrality={}, node_size={})
    measures = {
        "betweenness": betweenness(topic).scores,
        "random_walk_betweenness": random_walk_betweenness(topic).scores,
        "pagerank": pagerank(topic, damping=damping, tol=tol, max_iter=max_iter).scores,
    }
    assignment = louvain(topic, seed=seed)
    sizes = {
        node: size_scale * math.sqrt(topic.node_usage[node]) for node in sorted(topic.nodes)
    }
    return TopicNetwork(
        graph=topic,
        alpha=alpha,
        community=assignment.labels,
        centrality=measures,
        node_size=sizes,
    )


def centrality_table(net: TopicNetwork, k: int = 10) -> list[tuple[str, int, str, float]]:
    """Top-k rows per measure: (measure, rank, node, score)."""
    rows = []
    for measure in sorted(net.centrality):
        scores = net.centrality[measure]
        for rank_no, node in enumerate(_rank(scores)[:k], start=1):
            rows.append((measure, rank_no, node, scores[node]))
    return rows


def centrality_csv(rows: list[tuple[str, int, str, float]]) -> str:
    """CSV `measure,rank,node,score` with scores at 4 decimal places."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["measure", "rank", "node", "score"])
    for measure, rank_no, node, score in rows:
        writer.writerow([measure, rank_no, node, f"{score:.4f}"])
    return buffer.getvalue()
