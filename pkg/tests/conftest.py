"""Shared builders for the test suite."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from textdiverge.corpus import Tweet
from textdiverge.hashnet import WeightedGraph

UTC = timezone.utc
BASE = datetime(2015, 4, 1, tzinfo=UTC)


def make_tweet(tid: str, minute: int = 0, text: str = "", user: str = "u0") -> Tweet:
    return Tweet(id=tid, timestamp=BASE + timedelta(minutes=minute), user_id=user, text=text)


def make_graph(
    edges: dict[tuple[str, str], int],
    extra_nodes: tuple[str, ...] = (),
    usage: dict[str, int] | None = None,
) -> WeightedGraph:
    canonical: dict[tuple[str, str], int] = {}
    nodes = set(extra_nodes)
    for (u, v), weight in edges.items():
        a, b = sorted((u, v))
        canonical[(a, b)] = weight
        nodes.update((u, v))
    if usage is None:
        usage = {node: 1 for node in nodes}
    return WeightedGraph(frozenset(nodes), canonical, usage)


def random_graph(rng: random.Random, n: int, p: float = 0.4, max_weight: int = 9) -> WeightedGraph:
    """Erdos-Renyi-style weighted graph; isolated nodes are kept."""
    names = [f"v{i:02d}" for i in range(n)]
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(names[i], names[j])] = rng.randint(1, max_weight)
    return WeightedGraph(frozenset(names), edges, {name: 1 for name in names})


def random_connected_graph(
    rng: random.Random, n: int, extra: float = 0.3, max_weight: int = 9
) -> WeightedGraph:
    """Random spanning tree plus extra random edges: always connected."""
    names = [f"v{i:02d}" for i in range(n)]
    edges: dict[tuple[str, str], int] = {}
    for i in range(1, n):
        j = rng.randrange(i)
        a, b = sorted((names[i], names[j]))
        edges[(a, b)] = rng.randint(1, max_weight)
    for i in range(n):
        for j in range(i + 1, n):
            pair = (names[i], names[j])
            if pair not in edges and rng.random() < extra:
                edges[pair] = rng.randint(1, max_weight)
    return WeightedGraph(frozenset(names), edges, {name: 1 for name in names})


def random_distribution(rng: random.Random, tokens: list[str]) -> dict[str, float]:
    weights = [rng.random() + 1e-9 for _ in tokens]
    total = sum(weights)
    return {token: w / total for token, w in zip(tokens, weights)}
