"""Independent reference implementations used to cross-check the package.

These deliberately take different computational routes from the library:
high-precision mpmath summation for divergences, numeric quadrature for the
edge null model, matrix-power path counting for shortest-path betweenness,
per-pair grounded linear solves for current flow, and exhaustive partition
search for modularity. Keep them separate from the code under test.
"""

from __future__ import annotations

import itertools
from collections import deque

import mpmath
import numpy as np
from scipy.integrate import quad


def brute_jsd(
    p: dict[str, float], q: dict[str, float], pi_p: float, pi_q: float, dps: int = 60
) -> tuple[float, dict[str, tuple[float, str]]]:
    """Direct high-precision evaluation of the mixture divergence.

    Returns (total_bits, {token: (contribution_bits, side)}) where side is
    "p", "q", or "zero". Total is computed from the two KL terms, each term
    summed independently of the per-word decomposition path.
    """
    with mpmath.workdps(dps):
        w1, w2 = mpmath.mpf(pi_p), mpmath.mpf(pi_q)
        union = sorted(set(p) | set(q))
        mixed = {t: w1 * mpmath.mpf(p.get(t, 0.0)) + w2 * mpmath.mpf(q.get(t, 0.0)) for t in union}
        log2 = mpmath.log(2)

        def kl(dist: dict[str, float]) -> mpmath.mpf:
            total = mpmath.mpf(0)
            for token, prob in dist.items():
                x = mpmath.mpf(prob)
                if x > 0:
                    total += x * mpmath.log(x / mixed[token]) / log2
            return total

        total = w1 * kl(p) + w2 * kl(q)

        contributions: dict[str, tuple[float, str]] = {}
        for token in union:
            pi, qi = p.get(token, 0.0), q.get(token, 0.0)
            if pi == qi:
                contributions[token] = (0.0, "zero")
                continue
            m = mixed[token]
            term = mpmath.mpf(0)
            if m > 0:
                term -= m * mpmath.log(m) / log2
            if pi > 0:
                term += w1 * mpmath.mpf(pi) * mpmath.log(mpmath.mpf(pi)) / log2
            if qi > 0:
                term += w2 * mpmath.mpf(qi) * mpmath.log(mpmath.mpf(qi)) / log2
            contributions[token] = (float(term), "p" if pi > qi else "q")
        return float(total), contributions


def numeric_disparity(normalized_weight: float, degree: int) -> float:
    """Null-model edge significance via numeric quadrature of the density."""
    if degree < 2:
        return 1.0
    integral, _ = quad(lambda x: (1.0 - x) ** (degree - 2), 0.0, normalized_weight)
    return 1.0 - (degree - 1) * integral


def _bfs_distances(adj: list[list[int]], source: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for nbr in adj[node]:
            if dist[nbr] < 0:
                dist[nbr] = dist[node] + 1
                queue.append(nbr)
    return dist


def betweenness_oracle(n: int, edges: list[tuple[int, int]]) -> np.ndarray:
    """Shortest-path betweenness by matrix-power path counting.

    Shortest s-t paths are exactly the walks of minimal length, so their
    count is (A^d)[s, t]; paths through v factor as walks s->v times v->t
    when the distances add up.
    """
    adjacency = np.zeros((n, n), dtype=np.int64)
    neighbor_lists: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adjacency[u, v] = adjacency[v, u] = 1
        neighbor_lists[u].append(v)
        neighbor_lists[v].append(u)
    dist = np.array([_bfs_distances(neighbor_lists, s) for s in range(n)])
    powers = [np.eye(n, dtype=np.int64)]
    for _ in range(n):
        powers.append(powers[-1] @ adjacency)
    scores = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            d = dist[s][t]
            if d < 0:
                continue
            sigma = powers[d][s, t]
            for v in range(n):
                if v in (s, t):
                    continue
                if dist[s][v] >= 0 and dist[v][t] >= 0 and dist[s][v] + dist[v][t] == d:
                    scores[v] += powers[dist[s][v]][s, v] * powers[dist[v][t]][v, t] / sigma
    if n >= 3:
        scores *= 2.0 / ((n - 1) * (n - 2))
    return scores


def current_flow_oracle(n: int, edges: list[tuple[int, int, float]]) -> np.ndarray:
    """Current-flow betweenness by per-pair grounded Laplacian solves.

    For every pair a dedicated linear system (node 0 grounded) is solved with
    numpy.linalg.solve; node throughflow is half the absolute incident
    current, endpoints excluded.
    """
    laplacian = np.zeros((n, n))
    for u, v, w in edges:
        laplacian[u, u] += w
        laplacian[v, v] += w
        laplacian[u, v] -= w
        laplacian[v, u] -= w
    reduced = laplacian[1:, 1:]
    scores = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            rhs = np.zeros(n)
            rhs[s], rhs[t] = 1.0, -1.0
            potentials = np.zeros(n)
            potentials[1:] = np.linalg.solve(reduced, rhs[1:])
            for v in range(n):
                if v in (s, t):
                    continue
                flow = 0.5 * sum(
                    w * abs(potentials[a] - potentials[b])
                    for a, b, w in edges
                    if v in (a, b)
                )
                scores[v] += flow
    if n >= 3:
        scores *= 2.0 / ((n - 1) * (n - 2))
    return scores


def modularity_matrix(n: int, edges: list[tuple[int, int, float]], labels: list[int]) -> float:
    """Dense-matrix modularity: (1/2m) * sum_ij (A_ij - k_i k_j / 2m) d(c_i, c_j)."""
    adjacency = np.zeros((n, n))
    for u, v, w in edges:
        adjacency[u, v] += w
        adjacency[v, u] += w
    two_m = adjacency.sum()
    if two_m == 0:
        return 0.0
    k = adjacency.sum(axis=1)
    same = np.equal.outer(np.array(labels), np.array(labels))
    return float(((adjacency - np.outer(k, k) / two_m) * same).sum() / two_m)


def partitions(items: list[int]):
    """All set partitions, generated via restricted growth strings."""
    n = len(items)
    codes = [0] * n
    maxes = [0] * n
    while True:
        groups: dict[int, list[int]] = {}
        for item, code in zip(items, codes):
            groups.setdefault(code, []).append(item)
        yield list(groups.values())
        i = n - 1
        while i >= 1 and codes[i] == maxes[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        codes[i] += 1
        maxes[i] = max(maxes[i], codes[i])
        for j in range(i + 1, n):
            codes[j] = 0
            maxes[j] = maxes[i]


def best_partition_bruteforce(
    n: int, edges: list[tuple[int, int, float]]
) -> tuple[float, set[frozenset[int]]]:
    """Exhaustive modularity maximization; returns (best Q, best grouping)."""
    best_q = -np.inf
    best: set[frozenset[int]] = set()
    for groups in partitions(list(range(n))):
        labels = [0] * n
        for community, members in enumerate(groups):
            for member in members:
                labels[member] = community
        q = modularity_matrix(n, edges, labels)
        if q > best_q + 1e-12:
            best_q = q
            best = {frozenset(g) for g in groups}
    return best_q, best


def quantile_linear(values: list[float], fraction: float) -> float:
    """Quantile with linear interpolation between order statistics."""
    ordered = sorted(values)
    position = (len(ordered) - 1) * fraction
    lower = int(np.floor(position))
    upper = int(np.ceil(position))
    if lower == upper:
        return ordered[lower]
    weight = position - lower
    return ordered[lower] * (1.0 - weight) + ordered[upper] * weight


def connected_edge_subsets(n: int):
    """Every labeled connected graph on n nodes, as edge lists (0-based)."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        dist = _bfs_distances(adj, 0)
        if all(d >= 0 for d in dist):
            yield edges
