"""Information-theoretic quantities over token distributions.

Shannon entropy, effective diversity (perplexity), Kullback-Leibler
divergence, Jensen-Shannon divergence with per-word contributions, and the
context diversity of a single word. All quantities are in bits (log base 2);
the 0*log2(0) = 0 convention applies throughout. Sums are accumulated with
compensated summation (math.fsum) so per-word contributions reconcile with
the total on large supports.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .corpus import TokenBag, TokenDistribution, build_distribution


class Direction(Enum):
    """Which corpus a word's divergence contribution comes from."""

    CORPUS_P = "p"
    CORPUS_Q = "q"
    ZERO = "zero"


@dataclass(frozen=True)
class JsdWeights:
    """Mixture weights, proportional to corpus sizes, summing to 1."""

    pi_p: float
    pi_q: float

    def __post_init__(self) -> None:
        if self.pi_p <= 0.0 or self.pi_q <= 0.0:
            raise ValueError("both mixture weights must be positive")
        if abs(self.pi_p + self.pi_q - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {self.pi_p + self.pi_q}, not 1")

    @classmethod
    def equal(cls) -> "JsdWeights":
        return cls(0.5, 0.5)

    @classmethod
    def from_sizes(cls, size_p: float, size_q: float) -> "JsdWeights":
        if size_p <= 0 or size_q <= 0:
            raise ValueError("corpus sizes must be positive")
        total = size_p + size_q
        return cls(size_p / total, size_q / total)


@dataclass(frozen=True)
class MixedDistribution:
    """The weighted mixture of two distributions over their union support."""

    probs: dict[str, float]


@dataclass(frozen=True)
class WordContribution:
    """One word's share of the Jensen-Shannon divergence."""

    token: str
    contribution: float  # bits, nonnegative
    direction: Direction
    p: float  # probability in the first corpus (0 if absent)
    q: float  # probability in the second corpus (0 if absent)


def _plogp(p: float) -> float:
    return p * math.log2(p) if p > 0.0 else 0.0


def shannon_entropy(dist: TokenDistribution) -> float:
    """H = -sum(p_i * log2 p_i), in bits."""
    return -math.fsum(_plogp(p) for p in dist.probs.values())


def effective_diversity(entropy_bits: float) -> float:
    """Convert entropy to an effective number of equally likely words: D = 2^H."""
    if entropy_bits < 0.0:
        raise ValueError(f"entropy must be nonnegative, got {entropy_bits}")
    return 2.0 ** entropy_bits


def kl_divergence(p: TokenDistribution, q: TokenDistribution) -> float:
    """KL(P||Q) in bits; math.inf when some of P's support is missing from Q."""
    q_probs = q.probs
    terms = []
    for token, p_i in p.probs.items():
        q_i = q_probs.get(token, 0.0)
        if q_i <= 0.0:
            return math.inf
        terms.append(p_i * math.log2(p_i / q_i))
    return math.fsum(terms)


def mixed_distribution(
    p: TokenDistribution, q: TokenDistribution, weights: JsdWeights
) -> MixedDistribution:
    union = sorted(set(p.probs) | set(q.probs))
    probs = {
        token: weights.pi_p * p.probs.get(token, 0.0) + weights.pi_q * q.probs.get(token, 0.0)
        for token in union
    }
    return MixedDistribution(probs=probs)


def jsd(
    p: TokenDistribution, q: TokenDistribution, weights: JsdWeights
) -> tuple[float, MixedDistribution]:
    """Jensen-Shannon divergence: pi_p*KL(P||M) + pi_q*KL(Q||M).

    The mixture M covers both supports, so the result is always finite; with
    equal weights it lies in [0, 1].
    """
    mixed = mixed_distribution(p, q, weights)
    m = mixed.probs
    kl_p = math.fsum(p_i * math.log2(p_i / m[token]) for token, p_i in p.probs.items())
    kl_q = math.fsum(q_i * math.log2(q_i / m[token]) for token, q_i in q.probs.items())
    total = weights.pi_p * kl_p + weights.pi_q * kl_q
    # clamp the tiny negative residue floating error can leave on equal inputs
    return max(total, 0.0), mixed


def jsd_contributions(
    p: TokenDistribution, q: TokenDistribution, weights: JsdWeights
) -> list[WordContribution]:
    """Per-word divergence shares over the union support, sorted by token.

    contribution_i = -m_i*log2(m_i) + pi_p*p_i*log2(p_i) + pi_q*q_i*log2(q_i),
    zero exactly when p_i == q_i, directed toward the corpus where the word is
    more probable.
    """
    mixed = mixed_distribution(p, q, weights)
    contributions = []
    for token, m_i in mixed.probs.items():
        p_i = p.probs.get(token, 0.0)
        q_i = q.probs.get(token, 0.0)
        if p_i == q_i:
            value = 0.0
            direction = Direction.ZERO
        else:
            value = -_plogp(m_i) + weights.pi_p * _plogp(p_i) + weights.pi_q * _plogp(q_i)
            value = max(value, 0.0)
            direction = Direction.CORPUS_P if p_i > q_i else Direction.CORPUS_Q
        contributions.append(
            WordContribution(token=token, contribution=value, direction=direction, p=p_i, q=q_i)
        )
    return contributions


def word_context_diversity(
    tokenized_tweets: Sequence[Iterable[str]], word: str, anchors: Iterable[str] = ()
) -> float:
    """Shannon index of the words surrounding `word` across the tweets using it.

    Pools every token of the given tweets, deletes all occurrences of `word`
    itself (and of the anchor hashtags, normally already removed upstream),
    and returns the entropy of what remains; 0.0 when nothing remains.
    """
    drop = {word} | {"#" + anchor for anchor in anchors}
    pooled: Counter[str] = Counter()
    for tokens in tokenized_tweets:
        seen = False
        for token in tokens:
            if token == word:
                seen = True
            elif token not in drop:
                pooled[token] += 1
        if not seen:
            raise ValueError(f"a supplied tweet does not contain {word!r}")
    if not pooled:
        return 0.0
    return shannon_entropy(build_distribution(TokenBag(dict(pooled))))
