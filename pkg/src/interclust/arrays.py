"""Interaction arrays: pairwise counts, or (trials, agreements) pairs."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

COUNT = "count"
TRIALS_AGREEMENTS = "trials-agreements"


class DataValidationError(ValueError):
    """Array contents violate an invariant (asymmetry, v > n, negatives...)."""


@dataclass(frozen=True, eq=False)
class InteractionArray:
    """Square array of pairwise interactions over ``n`` entities.

    For count arrays ``counts[i, j]`` holds the number of interactions. For
    trials-agreements arrays ``trials[i, j]`` is the number of items both
    entities took part in and ``agreements[i, j]`` how many they agreed on.
    The diagonal is never read.
    """

    kind: str
    counts: np.ndarray | None = None
    trials: np.ndarray | None = None
    agreements: np.ndarray | None = None
    ids: tuple = field(default=())
    symmetric: bool = True

    def __post_init__(self):
        if self.kind == COUNT:
            mats = [self.counts]
        elif self.kind == TRIALS_AGREEMENTS:
            mats = [self.trials, self.agreements]
        else:
            raise ValueError(f"unknown array kind {self.kind!r}")
        if any(m is None for m in mats):
            raise ValueError(f"{self.kind} array is missing a matrix")
        conv = []
        for m in mats:
            m = np.asarray(m)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DataValidationError("interaction matrices must be square")
            if not np.all(np.isfinite(m)) or np.any(m != np.round(m)):
                raise DataValidationError("interaction matrices must hold integers")
            m = m.astype(np.int64)
            m.setflags(write=False)
            conv.append(m)
        n = conv[0].shape[0]
        if any(m.shape != (n, n) for m in conv):
            raise DataValidationError("trials and agreements must have equal shape")
        off = ~np.eye(n, dtype=bool)
        for m in conv:
            if np.any(m[off] < 0):
                raise DataValidationError("interaction counts must be non-negative")
            if self.symmetric and not np.array_equal(m[off], m.T[off]):
                raise DataValidationError("array declared symmetric but is not")
        if self.kind == COUNT:
            object.__setattr__(self, "counts", conv[0])
        else:
            if np.any(conv[1][off] > conv[0][off]):
                raise DataValidationError("agreements exceed trials for some pair")
            object.__setattr__(self, "trials", conv[0])
            object.__setattr__(self, "agreements", conv[1])
        ids = tuple(self.ids) if len(self.ids) else tuple(str(i) for i in range(n))
        if len(ids) != n:
            raise DataValidationError("number of ids does not match array size")
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_counts(cls, counts, ids: Sequence = (), symmetric: bool = True) -> "InteractionArray":
        return cls(COUNT, counts=counts, ids=tuple(ids), symmetric=symmetric)

    @classmethod
    def from_trials(cls, trials, agreements, ids: Sequence = (), symmetric: bool = True) -> "InteractionArray":
        return cls(TRIALS_AGREEMENTS, trials=trials, agreements=agreements, ids=tuple(ids), symmetric=symmetric)

    @property
    def n(self) -> int:
        m = self.counts if self.kind == COUNT else self.trials
        return m.shape[0]

    def pair_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairs scored by the models: ``i < j`` if symmetric, else ``i != j``."""
        if self.symmetric:
            return np.triu_indices(self.n, 1)
        i, j = np.nonzero(~np.eye(self.n, dtype=bool))
        return i, j

    def permute(self, perm: Sequence[int]) -> "InteractionArray":
        """Entity ``i`` becomes entity ``perm[i]``."""
        inv = np.argsort(perm)
        ids = tuple(self.ids[i] for i in inv)
        if self.kind == COUNT:
            return InteractionArray.from_counts(self.counts[np.ix_(inv, inv)], ids, self.symmetric)
        return InteractionArray.from_trials(
            self.trials[np.ix_(inv, inv)], self.agreements[np.ix_(inv, inv)], ids, self.symmetric
        )

    def subset(self, keep: Sequence[int]) -> "InteractionArray":
        keep = list(keep)
        ids = tuple(self.ids[i] for i in keep)
        sl = np.ix_(keep, keep)
        if self.kind == COUNT:
            return InteractionArray.from_counts(self.counts[sl], ids, self.symmetric)
        return InteractionArray.from_trials(self.trials[sl], self.agreements[sl], ids, self.symmetric)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InteractionArray):
            return NotImplemented
        if (self.kind, self.ids, self.symmetric) != (other.kind, other.ids, other.symmetric):
            return False
        if self.kind == COUNT:
            return np.array_equal(self.counts, other.counts)
        return np.array_equal(self.trials, other.trials) and np.array_equal(self.agreements, other.agreements)

    __hash__ = None


def _write_matrix(buf, ids, m):
    buf.write(",".join(str(i) for i in ids) + "\n")
    for row in m:
        buf.write(",".join(str(int(x)) for x in row) + "\n")


def format_array_csv(a: InteractionArray, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    if a.kind == COUNT:
        _write_matrix(buf, a.ids, a.counts)
    else:
        _write_matrix(buf, a.ids, a.trials)
        buf.write("\n")
        _write_matrix(buf, a.ids, a.agreements)
    return buf.getvalue()


def write_array_csv(a: InteractionArray, path: str | os.PathLike, comments: Sequence[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_array_csv(a, comments))


def _parse_sections(text: str) -> list[tuple[list[str], np.ndarray]]:
    sections: list[list[str]] = [[]]
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            continue
        if not s:
            if sections[-1]:
                sections.append([])
            continue
        sections[-1].append(s)
    out = []
    for lines in sections:
        if not lines:
            continue
        ids = [x.strip() for x in lines[0].split(",")]
        try:
            rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
            m = np.array(rows, dtype=float)
        except ValueError as exc:
            raise DataValidationError(f"non-numeric matrix entry: {exc}") from None
        if m.shape != (len(ids), len(ids)):
            raise DataValidationError(f"matrix shape {m.shape} does not match {len(ids)} ids")
        out.append((ids, m))
    return out


def parse_array_csv(text: str, symmetric: bool = True) -> InteractionArray:
    """Inverse of :func:`format_array_csv`. One matrix is a count array; two
    matrices separated by a blank line are (trials, agreements)."""
    sections = _parse_sections(text)
    if len(sections) == 1:
        ids, m = sections[0]
        return InteractionArray.from_counts(m, ids, symmetric)
    if len(sections) == 2:
        (ids, t), (ids2, v) = sections
        if ids != ids2:
            raise DataValidationError("trials and agreements headers differ")
        return InteractionArray.from_trials(t, v, ids, symmetric)
    raise DataValidationError(f"expected 1 or 2 matrices, found {len(sections)}")


def read_array_csv(path, agreements_path=None, symmetric: bool = True) -> InteractionArray:
    """Read an array file, or a (trials file, agreements file) pair."""
    with open(path) as fh:
        text = fh.read()
    if agreements_path is None:
        return parse_array_csv(text, symmetric)
    with open(agreements_path) as fh:
        text2 = fh.read()
    (ids, t), = _parse_sections(text)
    (ids2, v), = _parse_sections(text2)
    if ids != ids2:
        raise DataValidationError("trials and agreements headers differ")
    return InteractionArray.from_trials(t, v, ids, symmetric)
