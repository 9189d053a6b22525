"""Sequential posterior-mode clustering of a series of interaction arrays.

Clusterings evolve as a Ewens cut-and-paste chain started from its
Ewens-Pitman stationary law; each term's array is a blockmodel emission
with its own profiled parameters. Rosters may change between terms:
departing entities are dropped (sampling consistency) and arriving ones
are seated by the Chinese restaurant rule before the transition.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

from .arrays import InteractionArray
from .blockmodels import ProfiledObjective
from .partitions import (
    ChainParams,
    Partition,
    cap_transition_log_prob,
    ewens_pitman_log_prob,
    seating_weights,
)
from .search import SearchConfig, maximize

MAX_EXTENSIONS = 100_000


@dataclass
class TemporalSeries:
    """Ordered (term id, array) pairs; each array's ``ids`` is its roster."""

    terms: list[tuple[str, InteractionArray]]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a temporal series needs at least one term")

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def rosters(self) -> list[tuple]:
        return [a.ids for _, a in self.terms]

    def reversed(self) -> "TemporalSeries":
        return TemporalSeries(list(reversed(self.terms)))


@dataclass
class TermFit:
    term: str
    roster: tuple
    partition: Partition
    params: object
    score: float  # log prior + profiled emission log-likelihood

    def membership(self) -> dict:
        return dict(zip(self.roster, self.partition.labels))


@dataclass
class ClusterSequence:
    fits: list[TermFit] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.fits)

    def __getitem__(self, i) -> TermFit:
        return self.fits[i]

    def entities(self) -> list:
        seen = {}
        for f in self.fits:
            for e in f.roster:
                seen.setdefault(e, None)
        return list(seen)

    def aligned_labels(self) -> list[dict]:
        """Per term, entity -> block index with indices matched across terms
        by maximal overlap with the previous term, so a block keeps its
        symbol while its membership persists."""
        out: list[dict] = []
        prev: dict = {}
        for f in self.fits:
            mem = f.membership()
            nb = f.partition.n_blocks
            used = sorted(set(prev.values()))
            conf = np.zeros((nb, max(len(used), 1)))
            for e, b in mem.items():
                if e in prev:
                    conf[b, used.index(prev[e])] += 1
            mapping = {}
            if used:
                r, c = linear_sum_assignment(-conf)
                for bi, ci in zip(r, c):
                    if conf[bi, ci] > 0:
                        mapping[bi] = used[ci]
            taken = set(mapping.values())
            nxt = 0
            for b in range(nb):
                if b not in mapping:
                    while nxt in taken:
                        nxt += 1
                    mapping[b] = nxt
                    taken.add(nxt)
            cur = {e: mapping[b] for e, b in mem.items()}
            out.append(cur)
            prev = cur
        return out

    def table(self, symbols: str = "o*+x#@") -> list[list[str]]:
        """Entity x term grid of block symbols, blank where absent."""
        aligned = self.aligned_labels()
        rows = [["entity"] + [f.term for f in self.fits]]
        for e in self.entities():
            rows.append([str(e)] + [symbols[al[e]] if e in al else "" for al in aligned])
        return rows

    def to_csv(self, comments: Sequence[str] = (), symbols: str = "o*+x#@") -> str:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(self.table(symbols))
        return buf.getvalue()

    def to_text(self, symbols: str = "o*+x#@") -> str:
        rows = self.table(symbols)
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        lines = []
        for r in rows:
            lines.append("  ".join(cell.ljust(w) if i == 0 else cell.center(w)
                                   for i, (cell, w) in enumerate(zip(r, widths))).rstrip())
        return "\n".join(lines) + "\n"


def _term_cfg(cfg: SearchConfig, params: ChainParams, index: int) -> SearchConfig:
    seed = int(np.random.SeedSequence([cfg.seed, index]).generate_state(1)[0])
    return replace(cfg, k=params.k, seed=seed)


def crp_extensions(pi: Partition, n_new: int, params: ChainParams) -> list[tuple[Partition, float]]:
    """All ways to seat ``n_new`` further entities (appended after the
    existing ones) by the CRP rule, with their log-probabilities."""
    states = [(list(pi.labels), 0.0)]
    for _ in range(n_new):
        nxt = []
        for labels, lp in states:
            nb = max(labels) + 1
            sizes = [0] * nb
            for x in labels:
                sizes[x] += 1
            w = seating_weights(sizes, params.alpha, params.k)
            tot = w.sum()
            for j, wj in enumerate(w):
                if wj > 0:
                    nxt.append((labels + [j], lp + math.log(wj / tot)))
        states = nxt
        if len(states) > MAX_EXTENSIONS:
            raise ValueError("too many arriving entities to marginalize exactly")
    merged: dict = {}
    for labels, lp in states:
        p = Partition(labels)
        merged[p] = np.logaddexp(merged[p], lp) if p in merged else lp
    return list(merged.items())


class TransitionPrior:
    """log P(B' | previous clustering) on the partitions of ``roster``.

    The previous clustering is restricted to the entities that stay,
    extended over newcomers by CRP seating (summed over every seating),
    then moved by one cut-and-paste transition.
    """

    def __init__(self, prev_roster: Sequence, prev: Partition, roster: Sequence, params: ChainParams):
        prev_pos = {e: i for i, e in enumerate(prev_roster)}
        stay = [e for e in roster if e in prev_pos]
        if not stay:
            raise ValueError("consecutive rosters share no entities")
        arrive = [e for e in roster if e not in prev_pos]
        core = Partition(prev.labels[prev_pos[e]] for e in stay)
        order = stay + arrive
        # position in `order` -> position in `roster`
        where = {e: i for i, e in enumerate(roster)}
        self.perm = [where[e] for e in order]
        self.params = params
        self.extensions = [(ext.permute(self.perm), lp)
                           for ext, lp in crp_extensions(core, len(arrive), params)]
        self._cache: dict = {}

    def __call__(self, b: Partition) -> float:
        v = self._cache.get(b)
        if v is None:
            if len(self.extensions) == 1:
                ext, lp = self.extensions[0]
                v = lp + cap_transition_log_prob(ext, b, self.params)
            else:
                v = float(logsumexp([lp + cap_transition_log_prob(ext, b, self.params)
                                     for ext, lp in self.extensions]))
            self._cache[b] = v
        return v


def _fit_term(term, arr: InteractionArray, prior, cfg: SearchConfig) -> TermFit:
    emission = ProfiledObjective(arr)
    if arr.n == 1:
        b = Partition([0])
        return TermFit(str(term), arr.ids, b, emission.params(b), prior(b) + emission(b))

    def objective(b):
        return prior(b) + emission(b)

    res = maximize(arr, objective, cfg)
    b = res.best_partition
    return TermFit(str(term), arr.ids, b, emission.params(b), res.best_score)


def fit_initial(term, arr: InteractionArray, params: ChainParams = ChainParams(1.0, 2),
                cfg: SearchConfig | None = None) -> TermFit:
    """Posterior mode of the first term under the Ewens-Pitman prior."""
    cfg = _term_cfg(cfg or SearchConfig(), params, 0)
    return _fit_term(term, arr, lambda b: ewens_pitman_log_prob(b, params), cfg)


def fit_next(prev: TermFit, term, arr: InteractionArray, params: ChainParams = ChainParams(1.0, 2),
             cfg: SearchConfig | None = None, index: int = 1) -> TermFit:
    """Posterior mode of the next term, with the cut-and-paste transition
    from ``prev`` as prior."""
    cfg = _term_cfg(cfg or SearchConfig(), params, index)
    prior = TransitionPrior(prev.roster, prev.partition, arr.ids, params)
    return _fit_term(term, arr, prior, cfg)


def sequence_terms(series: TemporalSeries, parts: Sequence[Partition], params: ChainParams,
                   emissions: Sequence[ProfiledObjective] | None = None) -> list[float]:
    """Per-term contributions (log prior + emission) to the joint score."""
    emissions = emissions or [ProfiledObjective(a) for _, a in series]
    out = []
    prev_roster = None
    for t, ((_, arr), b) in enumerate(zip(series, parts)):
        if t == 0:
            lp = ewens_pitman_log_prob(b, params)
        else:
            lp = TransitionPrior(prev_roster, parts[t - 1], arr.ids, params)(b)
        out.append(lp + emissions[t](b))
        prev_roster = arr.ids
    return out


def joint_score(series: TemporalSeries, parts: Sequence[Partition], params: ChainParams) -> float:
    return math.fsum(sequence_terms(series, parts, params))


def single_moves(b: Partition, k: int):
    """Partitions reachable by moving one entity to another (possibly new)
    block without exceeding ``k`` blocks."""
    lab = list(b.labels)
    nb = b.n_blocks
    seen = set()
    for i in range(b.n):
        for l in range(nb + 1):
            if l == lab[i] or (l == nb and nb >= k):
                continue
            new = lab.copy()
            new[i] = l
            p = Partition(new)
            if p != b and p not in seen and p.n_blocks <= k:
                seen.add(p)
                yield p


def polish(series: TemporalSeries, parts: list[Partition], params: ChainParams,
           max_rounds: int = 1000) -> list[Partition]:
    """Hill-climb the joint score by single-term single-entity moves until
    no move improves it."""
    parts = list(parts)
    emissions = [ProfiledObjective(a) for _, a in series]
    rosters = series.rosters()
    T = len(parts)

    def local(t, b):
        # joint-score terms touched by changing term t
        s = 0.0
        if t == 0:
            s += ewens_pitman_log_prob(b, params)
        else:
            s += TransitionPrior(rosters[t - 1], parts[t - 1], rosters[t], params)(b)
        s += emissions[t](b)
        if t + 1 < T:
            s += TransitionPrior(rosters[t], b, rosters[t + 1], params)(parts[t + 1])
        return s

    for _ in range(max_rounds):
        improved = False
        for t in range(T):
            cur = local(t, parts[t])
            for cand in single_moves(parts[t], params.k):
                val = local(t, cand)
                if val > cur + 1e-9:
                    parts[t], cur, improved = cand, val, True
        if not improved:
            break
    return parts


def fit_sequence(series: TemporalSeries, params: ChainParams = ChainParams(1.0, 2), polish_pass: bool = True,
                 cfg: SearchConfig | None = None) -> ClusterSequence:
    """Fit the first term, then each following term given the previous
    estimate; optionally polish the whole sequence afterwards."""
    cfg = cfg or SearchConfig()
    terms = list(series)
    fits = [fit_initial(terms[0][0], terms[0][1], params, cfg)]
    for t in range(1, len(terms)):
        fits.append(fit_next(fits[-1], terms[t][0], terms[t][1], params, cfg, index=t))
    if polish_pass and len(terms) > 0:
        parts = polish(series, [f.partition for f in fits], params)
        scores = sequence_terms(series, parts, params)
        fits = [TermFit(f.term, f.roster, p, ProfiledObjective(a).params(p), s)
                for f, p, s, (_, a) in zip(fits, parts, scores, terms)]
    return ClusterSequence(fits)


def alpha_sensitivity(series: TemporalSeries, alphas: Sequence[float], k: int = 2,
                      cfg: SearchConfig | None = None, polish_pass: bool = True) -> dict[float, ClusterSequence]:
    return {a: fit_sequence(series, ChainParams(a, k), polish_pass, cfg) for a in alphas}
