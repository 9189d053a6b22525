"""Set partitions, the Ewens-Pitman law on k-bounded partitions and the
Ewens cut-and-paste transition kernel.

Partitions are stored as a canonical label vector: entity 0 is in block 0
and every new block gets the next unused label in order of first
appearance, so equal partitions have identical representations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_ENUMERATE = 12


def canonical_labels(labels: Iterable) -> tuple[int, ...]:
    relabel: dict = {}
    out = []
    for x in labels:
        if x not in relabel:
            relabel[x] = len(relabel)
        out.append(relabel[x])
    return tuple(out)


class Partition:
    """Immutable partition of ``range(n)``.

    Build from any label vector (``Partition([3, 3, 1])``) or from blocks
    (``Partition.from_blocks([[0, 1], [2]])``); labels are canonicalised.
    """

    __slots__ = ("_labels", "_nblocks")

    def __init__(self, labels: Iterable):
        self._labels = canonical_labels(labels)
        if not self._labels:
            raise ValueError("a partition needs at least one entity")
        self._nblocks = max(self._labels) + 1

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        blocks = [sorted(b) for b in blocks if len(list(b)) > 0]
        members = [i for b in blocks for i in b]
        if n is None:
            n = len(members)
        if sorted(members) != list(range(n)):
            raise ValueError("blocks must be disjoint and cover range(n)")
        labels = [0] * n
        for j, b in enumerate(blocks):
            for i in b:
                labels[i] = j
        return cls(labels)

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        """Parse ``"0,0,1,0"``; non-canonical labels are normalised."""
        fields = [f.strip() for f in text.strip().split(",")]
        if not fields or any(f == "" for f in fields):
            raise ValueError(f"malformed partition text: {text!r}")
        return cls(int(f) for f in fields)

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls([0] * n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(range(n))

    @property
    def labels(self) -> tuple[int, ...]:
        return self._labels

    @property
    def n(self) -> int:
        return len(self._labels)

    @property
    def n_blocks(self) -> int:
        return self._nblocks

    def __len__(self) -> int:
        return self._nblocks

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self._nblocks)]
        for i, b in enumerate(self._labels):
            out[b].append(i)
        return [tuple(b) for b in out]

    def block_sizes(self) -> list[int]:
        sizes = [0] * self._nblocks
        for b in self._labels:
            sizes[b] += 1
        return sizes

    def as_array(self) -> np.ndarray:
        return np.asarray(self._labels, dtype=np.intp)

    def same_block(self, i: int, j: int) -> bool:
        return self._labels[i] == self._labels[j]

    def permute(self, perm: Sequence[int]) -> "Partition":
        """Relabel entities: entity ``i`` becomes entity ``perm[i]``."""
        labels = [0] * self.n
        for i, p in enumerate(perm):
            labels[p] = self._labels[i]
        return Partition(labels)

    def to_text(self) -> str:
        return ",".join(str(x) for x in self._labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._labels == other._labels

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        return "Partition(%s)" % ("|".join(",".join(map(str, b)) for b in self.blocks()))


@dataclass(frozen=True)
class ChainParams:
    """(alpha, k) for the Ewens-Pitman(-alpha, k*alpha) law and the
    cut-and-paste chain. ``k`` bounds the number of blocks."""

    alpha: float = 1.0
    k: int = 2

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k}")


def log_rising(x: float, j: int) -> float:
    """log of x(x+1)...(x+j-1)."""
    if j == 0:
        return 0.0
    return math.lgamma(x + j) - math.lgamma(x)


def log_falling(k: int, j: int) -> float:
    """log of k(k-1)...(k-j+1); -inf when j > k."""
    if j > k:
        return -math.inf
    return math.lgamma(k + 1) - math.lgamma(k - j + 1)


def ewens_pitman_log_prob(pi: Partition, params: ChainParams) -> float:
    """Log-probability of ``pi`` under Ewens-Pitman(-alpha, k*alpha)."""
    alpha, k = params.alpha, params.k
    if pi.n_blocks > k:
        return -math.inf
    terms = [log_rising(alpha, s) for s in sorted(pi.block_sizes())]
    terms.append(log_falling(k, pi.n_blocks))
    terms.append(-log_rising(alpha * k, pi.n))
    return math.fsum(terms)


def seating_weights(sizes: Sequence[int], alpha: float, k: int) -> np.ndarray:
    """Unnormalised CRP seating weights given current block sizes.

    Joining block ``b`` has weight ``#b + alpha``; the final entry is the
    weight ``alpha * (k - #blocks)`` of opening a new block. These are the
    exact conditionals of the Ewens-Pitman(-alpha, k*alpha) law.
    """
    w = np.empty(len(sizes) + 1)
    w[:-1] = np.asarray(sizes, dtype=float) + alpha
    w[-1] = alpha * max(k - len(sizes), 0)
    return w


def _seat_sequentially(n: int, alpha: float, k: int, rng: np.random.Generator) -> list[int]:
    labels = [0]
    sizes = [1]
    draws = rng.random(n)
    for m in range(1, n):
        # total weight of the seating rule is m + alpha * k
        r = draws[m] * (m + alpha * k)
        acc = 0.0
        for j, s in enumerate(sizes):
            acc += s + alpha
            if r < acc:
                break
        else:
            j = len(sizes) if len(sizes) < k else len(sizes) - 1
        if j == len(sizes):
            sizes.append(1)
        else:
            sizes[j] += 1
        labels.append(j)
    return labels


def ewens_pitman_sample(n: int, params: ChainParams, rng: np.random.Generator) -> Partition:
    """Draw from Ewens-Pitman(-alpha, k*alpha) on partitions of ``range(n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Partition(_seat_sequentially(n, params.alpha, params.k, rng))


def cap_transition_log_prob(pi: Partition, pi_next: Partition, params: ChainParams) -> float:
    """Log transition probability of the Ewens cut-and-paste chain.

    The leading falling factorial is taken over the blocks of the
    destination ``pi_next``; with that choice every row sums to one.
    """
    if pi.n != pi_next.n:
        raise ValueError("partitions must be over the same entities")
    alpha, k = params.alpha, params.k
    if pi_next.n_blocks > k or pi.n_blocks > k:
        return -math.inf
    a = alpha / k
    table = np.zeros((pi.n_blocks, pi_next.n_blocks), dtype=np.int64)
    for b, b2 in zip(pi.labels, pi_next.labels):
        table[b, b2] += 1
    rows = []
    for row in table:
        t = [log_rising(a, int(c)) for c in sorted(row) if c]
        t.append(-log_rising(alpha, int(row.sum())))
        rows.append(math.fsum(t))
    rows.sort()
    rows.append(log_falling(k, pi_next.n_blocks))
    return math.fsum(rows)


def cap_transition_sample(pi: Partition, params: ChainParams, rng: np.random.Generator) -> Partition:
    """One cut-and-paste move: fragment each block, label the fragments
    uniformly without replacement in ``{0..k-1}``, merge equal labels."""
    alpha, k = params.alpha, params.k
    if pi.n_blocks > k:
        raise ValueError("current state has more than k blocks")
    new = [0] * pi.n
    for block in pi.blocks():
        frag = _seat_sequentially(len(block), alpha / k, k, rng)
        tags = rng.permutation(k)[: max(frag) + 1]
        for i, f in zip(block, frag):
            new[i] = int(tags[f])
    return Partition(new)


def restrict(pi: Partition, keep: Sequence[int]) -> Partition:
    """Induced partition on ``keep``; position ``m`` of the result is entity
    ``keep[m]``."""
    if len(keep) == 0:
        raise ValueError("cannot restrict to an empty set")
    if len(set(keep)) != len(keep) or min(keep) < 0 or max(keep) >= pi.n:
        raise ValueError("keep must be distinct entities of the partition")
    return Partition(pi.labels[i] for i in keep)


def enumerate_partitions(n: int, k: int | None = None) -> Iterator[Partition]:
    """Every partition of ``range(n)`` with at most ``k`` blocks, each once,
    as restricted growth strings."""
    if n > MAX_ENUMERATE:
        raise ValueError(f"refusing to enumerate partitions of n={n} > {MAX_ENUMERATE}")
    if n < 1:
        raise ValueError("n must be >= 1")
    kmax = n if k is None else min(k, n)
    labels = [0] * n

    def rec(i: int, nb: int) -> Iterator[Partition]:
        if i == n:
            yield Partition(labels)
            return
        for b in range(min(nb + 1, kmax)):
            labels[i] = b
            yield from rec(i + 1, max(nb, b + 1))

    yield from rec(1, 1)
