"""Randomized search over partitions with at most ``k`` blocks.

Global moves are cut-and-paste transitions and are always accepted; local
moves remove one entity and reseat it by the Chinese restaurant rule and
are accepted by Metropolis-Hastings. A greedy label-switching optimizer
handles modularity-type objectives on projected networks.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Mapping

import numpy as np

from .partitions import (
    ChainParams,
    Partition,
    cap_transition_sample,
    ewens_pitman_sample,
)

Objective = Callable[[Partition], float]

TIE_TOL = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    k: int = 2
    alpha_tilde: float = 1.0
    local_moves_per_global: int = 500
    total_global_steps: int = 40
    restarts: int = 20
    seed: int = 0
    record_trace: bool = False
    max_sweeps: int = 100  # label switching only

    def __post_init__(self):
        for name in ("k", "local_moves_per_global", "total_global_steps", "restarts", "max_sweeps"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        if not self.alpha_tilde > 0:
            raise ValueError(f"alpha_tilde must be positive, got {self.alpha_tilde!r}")

    @property
    def chain(self) -> ChainParams:
        return ChainParams(self.alpha_tilde, self.k)

    @classmethod
    def from_mapping(cls, m: Mapping) -> "SearchConfig":
        """Build from string-valued settings, ignoring unknown keys."""
        kw = {}
        for f in fields(cls):
            if f.name not in m:
                continue
            v = m[f.name]
            if f.type in ("bool", bool) and isinstance(v, str):
                v = v.strip().lower() in ("1", "true", "yes", "on")
            elif f.type in ("float", float):
                v = float(v)
            elif f.type in ("int", int):
                v = int(v)
            kw[f.name] = v
        return cls(**kw)


@dataclass(frozen=True)
class TraceRow:
    restart: int
    step: int
    score: float
    best: float


@dataclass
class SearchResult:
    best_partition: Partition
    best_score: float
    restart_scores: list[float]
    restart_partitions: list[Partition] = field(default_factory=list)
    co_optima: list[Partition] = field(default_factory=list)
    trace: list[TraceRow] = field(default_factory=list)

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["restart", "step", "score", "best"])
            for r in self.trace:
                w.writerow([r.restart, r.step, repr(r.score), repr(r.best)])


def _reseat(labels: tuple[int, ...], k: int, alpha: float, rng: np.random.Generator) -> tuple[int, ...]:
    """Remove a uniformly chosen entity and reseat it by the CRP rule."""
    n = len(labels)
    u = int(rng.integers(n))
    sizes: dict[int, int] = {}
    for i, b in enumerate(labels):
        if i != u:
            sizes[b] = sizes.get(b, 0) + 1
    blocks = list(sizes)
    w = [sizes[b] + alpha for b in blocks]
    w.append(alpha * max(k - len(blocks), 0))
    r = rng.random() * sum(w)
    j = 0
    acc = w[0]
    while r >= acc and j < len(w) - 1:
        j += 1
        acc += w[j]
    new = list(labels)
    new[u] = blocks[j] if j < len(blocks) else n  # n is never a live label
    return tuple(new)


def _cocktail(pi: Partition, score: float, cfg: SearchConfig, objective: Objective,
              rng: np.random.Generator) -> tuple[Partition, float]:
    if pi.n == 1:
        return pi, score
    prop = Partition(_reseat(pi.labels, cfg.k, cfg.alpha_tilde, rng))
    if prop == pi:
        return pi, score
    new_score = objective(prop)
    # the proposal is a Gibbs move for the Ewens-Pitman(alpha_tilde, k) prior,
    # so q(prop->pi)/q(pi->prop) cancels the prior ratio of the target
    # EP(pi) * exp(objective(pi)); only the objective difference remains.
    delta = new_score - score
    if delta >= 0 or rng.random() < math.exp(delta):
        return prop, new_score
    return pi, score


def cocktail_step(pi: Partition, cfg: SearchConfig, objective: Objective,
                  rng: np.random.Generator) -> Partition:
    """One local move: reseat a random entity, accept by Metropolis-Hastings."""
    return _cocktail(pi, objective(pi), cfg, objective, rng)[0]


def global_step(pi: Partition, cfg: SearchConfig, rng: np.random.Generator) -> Partition:
    """One cut-and-paste move with parameter (alpha_tilde, k); never rejected."""
    return cap_transition_sample(pi, cfg.chain, rng)


def _run_restart(n: int, objective: Objective, cfg: SearchConfig, rng: np.random.Generator,
                 restart: int, trace: list | None):
    pi = ewens_pitman_sample(n, cfg.chain, rng)
    score = objective(pi)
    best, best_score = pi, score
    ties = {pi}
    for step in range(cfg.total_global_steps):
        pi = global_step(pi, cfg, rng)
        score = objective(pi)
        for m in range(cfg.local_moves_per_global + 1):
            assert pi.n_blocks <= cfg.k
            if score > best_score + TIE_TOL:
                best, best_score, ties = pi, score, {pi}
            elif score > best_score - TIE_TOL:
                ties.add(pi)
            if m < cfg.local_moves_per_global:
                pi, score = _cocktail(pi, score, cfg, objective, rng)
        if trace is not None:
            trace.append(TraceRow(restart, step, score, best_score))
    return best, best_score, ties


def maximize(a, objective: Objective | None = None, cfg: SearchConfig | None = None) -> SearchResult:
    """Maximize ``objective`` over partitions of the entities of ``a``.

    ``a`` is an :class:`~interclust.arrays.InteractionArray` (or an entity
    count). Without an explicit objective the profiled blockmodel
    log-likelihood of ``a`` is used. The best partition visited across all
    restarts is returned; the result depends only on ``cfg``.
    """
    cfg = cfg or SearchConfig()
    if objective is None:
        from .blockmodels import ProfiledObjective
        objective = ProfiledObjective(a)
    n = a if isinstance(a, (int, np.integer)) else a.n
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    trace = [] if cfg.record_trace else None
    best = None
    best_score = -math.inf
    ties: set = set()
    per_score, per_part = [], []
    for r, ss in enumerate(seeds):
        rb, rs, rt = _run_restart(n, objective, cfg, np.random.default_rng(ss), r, trace)
        per_score.append(rs)
        per_part.append(rb)
        if best is None or rs > best_score + TIE_TOL:
            best, best_score, ties = rb, rs, set(rt)
        elif rs > best_score - TIE_TOL:
            ties |= rt
    co = sorted(ties, key=lambda p: p.labels)
    return SearchResult(best, best_score, per_score, per_part, co, trace or [])


def label_switch_maximize(net, k: int = 2, objective=None, cfg: SearchConfig | None = None) -> SearchResult:
    """Greedy single-vertex label switching from random labelings.

    ``net`` is a (binary or weighted) adjacency matrix or anything with an
    ``adjacency`` attribute; ``objective(adjacency, labels)`` defaults to
    Newman-Girvan modularity. Each sweep visits the vertices in random
    order and moves a vertex to its best label; sweeps stop when nothing
    moves.
    """
    from .network import ng_modularity

    cfg = cfg or SearchConfig()
    objective = objective or ng_modularity
    A = np.asarray(getattr(net, "adjacency", net), dtype=float)
    n = A.shape[0]
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best, best_score = None, -math.inf
    ties: set = set()
    per_score, per_part = [], []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        lab = rng.integers(k, size=n)
        cur = objective(A, lab)
        for _ in range(cfg.max_sweeps):
            moved = False
            for v in rng.permutation(n):
                old = lab[v]
                best_l, best_v = old, cur
                for l in range(k):
                    if l == old:
                        continue
                    lab[v] = l
                    val = objective(A, lab)
                    if val > best_v + 1e-12:
                        best_l, best_v = l, val
                lab[v] = best_l
                if best_l != old:
                    cur, moved = best_v, True
            if not moved:
                break
        part = Partition(lab)
        per_score.append(cur)
        per_part.append(part)
        if best is None or cur > best_score + TIE_TOL:
            best, best_score, ties = part, cur, {part}
        elif cur > best_score - TIE_TOL:
            ties.add(part)
    co = sorted(ties, key=lambda p: p.labels)
    return SearchResult(best, best_score, per_score, per_part, co)
