"""Poisson and Binomial stochastic blockmodels for interaction arrays.

Two-parameter forms use one rate (or success probability) for pairs in the
same block and one for pairs in different blocks. Log-likelihoods include
the log-factorial / log-binomial-coefficient constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .arrays import COUNT, TRIALS_AGREEMENTS, InteractionArray
from .partitions import Partition


@dataclass(frozen=True)
class PoissonParams:
    lambda_in: float
    lambda_out: float
    block: np.ndarray | None = None  # general rate per (block, block); overrides the pair above

    def __post_init__(self):
        vals = [self.lambda_in, self.lambda_out]
        if self.block is not None:
            vals.extend(np.asarray(self.block, dtype=float).ravel())
        if any(v < 0 for v in vals if not math.isnan(v)):
            raise ValueError("Poisson intensities must be non-negative")


@dataclass(frozen=True)
class BinomialParams:
    p_in: float
    p_out: float
    block: np.ndarray | None = None

    def __post_init__(self):
        vals = [self.p_in, self.p_out]
        if self.block is not None:
            vals.extend(np.asarray(self.block, dtype=float).ravel())
        if any(not 0 <= v <= 1 for v in vals if not math.isnan(v)):
            raise ValueError("Binomial probabilities must lie in [0, 1]")


def _xlogy(x: float, y: float) -> float:
    if x == 0:
        return 0.0
    if y == 0:
        return -math.inf
    return x * math.log(y)


def _poisson_term(total: float, npairs: float, lam: float) -> float:
    if npairs == 0:
        return 0.0
    if math.isnan(lam):
        raise ValueError("Poisson rate undefined for a non-empty stratum")
    return _xlogy(total, lam) - npairs * lam


def _binomial_term(agree: float, trials: float, p: float) -> float:
    if trials == 0:
        return 0.0
    if math.isnan(p):
        raise ValueError("Binomial probability undefined for a stratum with trials")
    return _xlogy(agree, p) + _xlogy(trials - agree, 1.0 - p)


def _check_kind(a: InteractionArray, kind: str):
    if a.kind != kind:
        raise TypeError(f"expected a {kind} array, got {a.kind}")


def _labels(b) -> np.ndarray:
    return b.as_array() if isinstance(b, Partition) else np.asarray(b, dtype=np.intp)


class _PairData:
    """Upper-triangle (or off-diagonal) pair vectors of an array."""

    def __init__(self, a: InteractionArray):
        self.i, self.j = a.pair_index()
        if a.kind == COUNT:
            self.x = a.counts[self.i, self.j]
            self.t = np.ones_like(self.x)
            self.const = -math.fsum(gammaln(self.x + 1.0))
        else:
            self.t = a.trials[self.i, self.j]
            self.x = a.agreements[self.i, self.j]
            self.const = math.fsum(
                gammaln(self.t + 1.0) - gammaln(self.x + 1.0) - gammaln(self.t - self.x + 1.0)
            )

    def strata(self, labels: np.ndarray):
        """(x_in, t_in, x_out, t_out) with t counting pairs (counts) or trials."""
        same = labels[self.i] == labels[self.j]
        x_in = int(self.x[same].sum())
        t_in = int(self.t[same].sum())
        return x_in, t_in, int(self.x.sum()) - x_in, int(self.t.sum()) - t_in

    def block_strata(self, labels: np.ndarray, nb: int, symmetric: bool):
        ri, rj = labels[self.i], labels[self.j]
        if symmetric:
            ri, rj = np.minimum(ri, rj), np.maximum(ri, rj)
        X = np.zeros((nb, nb), dtype=np.int64)
        T = np.zeros((nb, nb), dtype=np.int64)
        np.add.at(X, (ri, rj), self.x)
        np.add.at(T, (ri, rj), self.t)
        return X, T


def _block_terms(X, T, params_block, termfn, symmetric):
    nb = X.shape[0]
    out = []
    for r in range(nb):
        for s in range(r if symmetric else 0, nb):
            out.append(termfn(float(X[r, s]), float(T[r, s]), float(params_block[r, s])))
    return out


def poisson_log_lik(a: InteractionArray, b: Partition, params: PoissonParams) -> float:
    """Poisson blockmodel log-likelihood of a count array under partition ``b``."""
    _check_kind(a, COUNT)
    pd = _PairData(a)
    lab = _labels(b)
    if params.block is not None:
        X, N = pd.block_strata(lab, int(lab.max()) + 1, a.symmetric)
        terms = _block_terms(X, N, np.asarray(params.block, dtype=float), _poisson_term, a.symmetric)
    else:
        s_in, n_in, s_out, n_out = pd.strata(lab)
        terms = [_poisson_term(s_in, n_in, params.lambda_in), _poisson_term(s_out, n_out, params.lambda_out)]
    if any(t == -math.inf for t in terms):
        return -math.inf
    return math.fsum(terms + [pd.const])


def _ratio(x, t):
    return x / t if t > 0 else math.nan


def poisson_mle(a: InteractionArray, b: Partition) -> PoissonParams:
    """Profiled MLE of (lambda_in, lambda_out): stratum sample means. A
    stratum with no pairs gets ``nan``."""
    _check_kind(a, COUNT)
    s_in, n_in, s_out, n_out = _PairData(a).strata(_labels(b))
    return PoissonParams(_ratio(s_in, n_in), _ratio(s_out, n_out))


def poisson_block_mle(a: InteractionArray, b: Partition) -> PoissonParams:
    """MLE of the general model with one rate per block pair."""
    _check_kind(a, COUNT)
    lab = _labels(b)
    X, N = _PairData(a).block_strata(lab, int(lab.max()) + 1, a.symmetric)
    with np.errstate(invalid="ignore", divide="ignore"):
        lam = np.where(N > 0, X / np.maximum(N, 1), np.nan)
    if a.symmetric:
        lam = np.where(np.isnan(lam), lam.T, lam)
    s_in, n_in, s_out, n_out = _PairData(a).strata(lab)
    return PoissonParams(_ratio(s_in, n_in), _ratio(s_out, n_out), block=lam)


def binomial_log_lik(a: InteractionArray, b: Partition, params: BinomialParams) -> float:
    """Binomial blockmodel log-likelihood of a trials-agreements array."""
    _check_kind(a, TRIALS_AGREEMENTS)
    pd = _PairData(a)
    lab = _labels(b)
    if params.block is not None:
        V, T = pd.block_strata(lab, int(lab.max()) + 1, a.symmetric)
        terms = _block_terms(V, T, np.asarray(params.block, dtype=float), _binomial_term, a.symmetric)
    else:
        v_in, t_in, v_out, t_out = pd.strata(lab)
        terms = [_binomial_term(v_in, t_in, params.p_in), _binomial_term(v_out, t_out, params.p_out)]
    if any(t == -math.inf for t in terms):
        return -math.inf
    return math.fsum(terms + [pd.const])


def binomial_mle(a: InteractionArray, b: Partition) -> BinomialParams:
    """Pooled agreement proportions within and between blocks. Pairs with no
    trials drop out; a stratum with no trials gets ``nan``."""
    _check_kind(a, TRIALS_AGREEMENTS)
    v_in, t_in, v_out, t_out = _PairData(a).strata(_labels(b))
    return BinomialParams(_ratio(v_in, t_in), _ratio(v_out, t_out))


def binomial_block_mle(a: InteractionArray, b: Partition) -> BinomialParams:
    _check_kind(a, TRIALS_AGREEMENTS)
    lab = _labels(b)
    pd = _PairData(a)
    V, T = pd.block_strata(lab, int(lab.max()) + 1, a.symmetric)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(T > 0, V / np.maximum(T, 1), np.nan)
    if a.symmetric:
        p = np.where(np.isnan(p), p.T, p)
    v_in, t_in, v_out, t_out = pd.strata(lab)
    return BinomialParams(_ratio(v_in, t_in), _ratio(v_out, t_out), block=p)


def mle(a: InteractionArray, b: Partition):
    return poisson_mle(a, b) if a.kind == COUNT else binomial_mle(a, b)


def log_lik(a: InteractionArray, b: Partition, params) -> float:
    if a.kind == COUNT:
        return poisson_log_lik(a, b, params)
    return binomial_log_lik(a, b, params)


class ProfiledObjective:
    """Callable ``partition -> profiled log-likelihood`` for one array.

    Pair vectors and the data-only constant are computed once, so each call
    costs one pass over the pairs. The model family follows the array kind.
    """

    def __init__(self, a: InteractionArray, include_constant: bool = True):
        self.array = a
        self.kind = a.kind
        self._pd = _PairData(a)
        self.constant = self._pd.const if include_constant else 0.0

    def stratum_scores(self, b) -> tuple[float, float]:
        x_in, t_in, x_out, t_out = self._pd.strata(_labels(b))
        if self.kind == COUNT:
            return (_poisson_term(x_in, t_in, _ratio(x_in, t_in)),
                    _poisson_term(x_out, t_out, _ratio(x_out, t_out)))
        return (_binomial_term(x_in, t_in, _ratio(x_in, t_in)),
                _binomial_term(x_out, t_out, _ratio(x_out, t_out)))

    def __call__(self, b) -> float:
        s_in, s_out = self.stratum_scores(b)
        return s_in + s_out + self.constant

    def params(self, b):
        return mle(self.array, b if isinstance(b, Partition) else Partition(b))


def profiled_objective(a: InteractionArray, b: Partition) -> float:
    """Log-likelihood of ``b`` with the two scalar parameters set to their
    MLE given ``b``."""
    return ProfiledObjective(a)(b)
