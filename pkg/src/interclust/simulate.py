"""Synthetic arrays from two-parameter blockmodels with a planted partition."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .arrays import InteractionArray
from .partitions import Partition
from .temporal import TemporalSeries


def _same_block(b: Partition) -> np.ndarray:
    lab = b.as_array()
    return lab[:, None] == lab[None, :]


def _symmetrize(upper: np.ndarray) -> np.ndarray:
    m = np.triu(upper, 1)
    return m + m.T


def simulate_poisson(b: Partition, lambda_in: float, lambda_out: float, rng: np.random.Generator,
                     ids: Sequence = ()) -> InteractionArray:
    rate = np.where(_same_block(b), lambda_in, lambda_out)
    return InteractionArray.from_counts(_symmetrize(rng.poisson(rate)), ids)


def simulate_binomial(b: Partition, trials, p_in: float, p_out: float, rng: np.random.Generator,
                      ids: Sequence = ()) -> InteractionArray:
    """``trials`` is a scalar (same number of items for every pair) or an
    n x n symmetric matrix."""
    n = b.n
    T = np.broadcast_to(np.asarray(trials, dtype=np.int64), (n, n))
    T = _symmetrize(T)
    p = np.where(_same_block(b), p_in, p_out)
    V = _symmetrize(rng.binomial(T, p))
    return InteractionArray.from_trials(T, V, ids)


def simulate_series(parts: Sequence[Partition], trials, p_in: float, p_out: float, rng: np.random.Generator,
                    rosters: Sequence[Sequence] | None = None, terms: Sequence | None = None) -> TemporalSeries:
    terms = terms or [str(t) for t in range(len(parts))]
    out = []
    for t, b in enumerate(parts):
        ids = rosters[t] if rosters is not None else [str(i) for i in range(b.n)]
        out.append((str(terms[t]), simulate_binomial(b, trials, p_in, p_out, rng, ids)))
    return TemporalSeries(out)
