"""Thresholded projections of interaction arrays and Newman-Girvan
modularity, with the misclassified / nonclassified bookkeeping used to
assess projections against a reference clustering."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .arrays import COUNT, TRIALS_AGREEMENTS, InteractionArray
from .partitions import Partition
from .search import SearchConfig, label_switch_maximize

RAW_COUNT = "raw-count"
AGREEMENT_RATIO = "agreement-ratio"


@dataclass(frozen=True, eq=False)
class ProjectedNetwork:
    adjacency: np.ndarray  # symmetric 0/1, zero diagonal
    cutoff: float
    threshold_kind: str

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def isolated(self) -> set[int]:
        return set(np.nonzero(self.adjacency.sum(axis=1) == 0)[0].tolist())


def threshold_values(a: InteractionArray, kind: str | None = None) -> np.ndarray:
    """Matrix of thresholding statistics t(A_ij): raw counts, or agreement
    ratios V/N with 0 where N = 0."""
    kind = kind or (RAW_COUNT if a.kind == COUNT else AGREEMENT_RATIO)
    if kind == RAW_COUNT:
        if a.kind != COUNT:
            raise TypeError("raw-count thresholding needs a count array")
        t = a.counts.astype(float)
    elif kind == AGREEMENT_RATIO:
        if a.kind != TRIALS_AGREEMENTS:
            raise TypeError("agreement-ratio thresholding needs a trials-agreements array")
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(a.trials > 0, a.agreements / np.maximum(a.trials, 1), 0.0)
    else:
        raise ValueError(f"unknown threshold kind {kind!r}")
    t = np.array(t, dtype=float)
    np.fill_diagonal(t, 0.0)
    return t


def project(a: InteractionArray, kind: str | None = None, c: float = 0.0) -> ProjectedNetwork:
    """Binary network with an edge wherever t(A_ij) > c (strictly)."""
    kind = kind or (RAW_COUNT if a.kind == COUNT else AGREEMENT_RATIO)
    t = threshold_values(a, kind)
    adj = (t > c).astype(np.int8)
    adj = np.maximum(adj, adj.T)
    np.fill_diagonal(adj, 0)
    return ProjectedNetwork(adj, float(c), kind)


def _as_matrix(net) -> np.ndarray:
    return np.asarray(getattr(net, "adjacency", net), dtype=float)


def ng_modularity(net, b) -> float:
    """Newman-Girvan modularity of labeling ``b`` on a binary or weighted
    symmetric network. Returns ``nan`` when the network has no edges."""
    A = _as_matrix(net)
    lab = b.as_array() if isinstance(b, Partition) else np.asarray(b, dtype=np.intp)
    A = A - np.diag(np.diag(A))
    two_m = A.sum()
    if two_m <= 0:
        return math.nan
    nb = int(lab.max()) + 1
    Z = np.zeros((A.shape[0], nb))
    Z[np.arange(A.shape[0]), lab] = 1.0
    E = Z.T @ A @ Z
    d = E.sum(axis=1)
    return float(np.trace(E) / two_m - np.sum((d / two_m) ** 2))


def classification_report(b_hat: Partition, b_ref: Partition, isolated=()) -> tuple[int, int]:
    """(misclassified, nonclassified) of ``b_hat`` against ``b_ref``.

    Isolated entities are nonclassified. Misclassification counts the
    remaining entities off the best one-to-one matching of inferred blocks
    to reference blocks.
    """
    if b_hat.n != b_ref.n:
        raise ValueError("partitions must cover the same entities")
    iso = set(isolated)
    keep = [i for i in range(b_hat.n) if i not in iso]
    if not keep:
        return 0, len(iso)
    conf = np.zeros((b_hat.n_blocks, b_ref.n_blocks), dtype=np.int64)
    for i in keep:
        conf[b_hat.labels[i], b_ref.labels[i]] += 1
    r, c = linear_sum_assignment(-conf)
    matched = int(conf[r, c].sum())
    return len(keep) - matched, len(iso)


def nearest_rank_percentile(values: Sequence[float], p: float) -> float:
    """Smallest value with at least p% of the sample at or below it."""
    v = np.sort(np.asarray(values, dtype=float))
    rank = max(int(math.ceil(p / 100.0 * len(v))), 1)
    return float(v[min(rank, len(v)) - 1])


def cutoff_for_percentile(a: InteractionArray, p: float, method: str = "nearest-rank",
                          kind: str | None = None) -> float:
    t = threshold_values(a, kind)
    i, j = np.triu_indices(a.n, 1)
    vals = t[i, j]
    if method == "nearest-rank":
        return nearest_rank_percentile(vals, p)
    return float(np.percentile(vals, p, method=method))


@dataclass(frozen=True)
class SweepRow:
    percentile: float
    cutoff: float
    misclassified: int
    nonclassified: int

    @property
    def total(self) -> int:
        return self.misclassified + self.nonclassified


@dataclass
class SweepReport:
    rows: list[SweepRow]

    def success_percentiles(self) -> list[float]:
        return [r.percentile for r in self.rows if r.total == 0]

    def to_csv(self, path, comments: Sequence[str] = ()) -> None:
        with open(path, "w", newline="") as fh:
            for c in comments:
                fh.write(f"# {c}\n")
            w = csv.writer(fh)
            w.writerow(["percentile", "cutoff", "misclassified", "nonclassified", "total"])
            for r in self.rows:
                w.writerow([_fmt(r.percentile), repr(r.cutoff), r.misclassified, r.nonclassified, r.total])


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def percentile_sweep(a: InteractionArray, percentiles: Sequence[float], b_ref: Partition,
                     cfg: SearchConfig | None = None, k: int = 2,
                     method: str = "nearest-rank") -> SweepReport:
    """Project at each percentile cutoff of the agreement ratios, maximize NG
    modularity by label switching and score against ``b_ref``."""
    cfg = cfg or SearchConfig()
    rows = []
    for p in percentiles:
        c = cutoff_for_percentile(a, p, method)
        net = project(a, AGREEMENT_RATIO, c)
        iso = net.isolated()
        if net.n_edges == 0:
            rows.append(SweepRow(float(p), c, 0, len(iso)))
            continue
        res = label_switch_maximize(net, k, ng_modularity, cfg)
        mis, non = classification_report(res.best_partition, b_ref, iso)
        rows.append(SweepRow(float(p), c, mis, non))
    return SweepReport(rows)


@dataclass(frozen=True)
class PercentileRange:
    term: str
    low: float | None
    high: float | None
    median: float | None


def percentile_ranges(series, refs, percentiles: Sequence[float] = tuple(range(1, 100)),
                      cfg: SearchConfig | None = None, method: str = "nearest-rank") -> list[PercentileRange]:
    """Per term, the range of percentile cutoffs at which NG modularity
    recovers the reference clustering with nothing misclassified or
    isolated. ``series`` yields (term, array); ``refs`` maps term to the
    reference partition of that term's roster."""
    out = []
    for term, arr in series:
        rep = percentile_sweep(arr, percentiles, refs[term], cfg, method=method)
        ok = rep.success_percentiles()
        if ok:
            out.append(PercentileRange(str(term), min(ok), max(ok), float(np.median(ok))))
        else:
            out.append(PercentileRange(str(term), None, None, None))
    return out


def write_ranges_csv(ranges: Sequence[PercentileRange], path, comments: Sequence[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh)
        w.writerow(["term", "low", "high", "median"])
        for r in ranges:
            w.writerow([r.term] + ["" if v is None else _fmt(v) for v in (r.low, r.high, r.median)])
