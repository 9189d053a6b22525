"""Bundled karate data and roll-call ingestion."""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Sequence

import numpy as np

from .arrays import DataValidationError, InteractionArray, parse_array_csv
from .partitions import Partition

KARATE_SHA256 = {
    "karate_counts.csv": "0a66ce2f35fa89352a5e520e64ce9aba94f702220fb4176c9a211891ace98723",
    "karate_split.csv": "35ed8e2ce11eb12cd4c7d1935afd703a80ebf32b377daacc260d9af956bca5ff",
}

YEA, NAY, ABSENT = 1, 0, -1

_VOTE_WORDS = {
    "yea": YEA, "yes": YEA, "y": YEA, "1": YEA, "aye": YEA, "majority": YEA,
    "nay": NAY, "no": NAY, "n": NAY, "0": NAY, "minority": NAY,
    "absent": ABSENT, "": ABSENT, "na": ABSENT, "nv": ABSENT, "-1": ABSENT,
}


@dataclass(frozen=True)
class Dataset:
    array: InteractionArray
    reference: Partition


def _read_fixture(name: str) -> str:
    raw = resources.files("interclust.data").joinpath(name).read_bytes()
    if hashlib.sha256(raw).hexdigest() != KARATE_SHA256[name]:
        raise DataValidationError(f"bundled fixture {name} failed its checksum")
    return raw.decode()


def load_karate() -> Dataset:
    """Zachary's 34-member karate club interaction counts and his two-faction
    split (members in file order, ids "1".."34")."""
    arr = parse_array_csv(_read_fixture("karate_counts.csv"))
    rows = list(csv.DictReader(ln for ln in _read_fixture("karate_split.csv").splitlines()
                               if not ln.startswith("#")))
    pos = {e: i for i, e in enumerate(arr.ids)}
    labels = [None] * arr.n
    for r in rows:
        labels[pos[r["member"]]] = r["faction"]
    return Dataset(arr, Partition(labels))


@dataclass(frozen=True, eq=False)
class RollCall:
    """Votes of ``voters`` on ``items``: YEA (1), NAY (0) or ABSENT (-1).

    For court data YEA/NAY stand for majority/minority side.
    """

    voters: tuple
    items: tuple
    votes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.votes)
        if v.shape != (len(self.voters), len(self.items)):
            raise DataValidationError("vote matrix shape does not match voters x items")
        if len(self.items) == 0:
            raise DataValidationError("a roll call needs at least one item")
        if not np.isin(v, (YEA, NAY, ABSENT)).all():
            raise DataValidationError("votes must be YEA (1), NAY (0) or ABSENT (-1)")
        object.__setattr__(self, "votes", v.astype(np.int8))
        object.__setattr__(self, "voters", tuple(self.voters))
        object.__setattr__(self, "items", tuple(self.items))

    def select_items(self, keep: Callable[[object], bool] | Iterable) -> "RollCall":
        keep_set = None if callable(keep) else set(keep)
        idx = [j for j, it in enumerate(self.items) if (keep(it) if keep_set is None else it in keep_set)]
        return RollCall(self.voters, tuple(self.items[j] for j in idx), self.votes[:, idx])

    def select_voters(self, keep: Sequence) -> "RollCall":
        pos = {v: i for i, v in enumerate(self.voters)}
        idx = [pos[v] for v in keep]
        return RollCall(tuple(keep), self.items, self.votes[idx])


def pair_counts(rc: RollCall) -> InteractionArray:
    """N_ij = items on which both voted, V_ij = those on which they agreed."""
    v = rc.votes
    present = (v != ABSENT).astype(np.int64)
    yea = (v == YEA).astype(np.int64)
    nay = (v == NAY).astype(np.int64)
    N = present @ present.T
    V = yea @ yea.T + nay @ nay.T
    np.fill_diagonal(N, 0)
    np.fill_diagonal(V, 0)
    return InteractionArray.from_trials(N, V, rc.voters)


def parse_vote(x) -> int:
    key = str(x).strip().lower()
    if key not in _VOTE_WORDS:
        raise DataValidationError(f"unrecognised vote value {x!r}")
    return _VOTE_WORDS[key]


def _assemble(records, voters_order=None, items_order=None) -> RollCall:
    voters = list(dict.fromkeys(voters_order or [r[0] for r in records]))
    items = list(dict.fromkeys(items_order or [r[1] for r in records]))
    vp = {v: i for i, v in enumerate(voters)}
    ip = {it: j for j, it in enumerate(items)}
    votes = np.full((len(voters), len(items)), ABSENT, dtype=np.int8)
    for voter, item, val in records:
        if voter in vp and item in ip:
            votes[vp[voter], ip[item]] = val
    return RollCall(tuple(voters), tuple(items), votes)


def read_rollcall_csv(path) -> RollCall:
    """Long-format roll call: columns ``voter,item,vote``; votes are
    yea/nay/absent (or 1/0/blank)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(ln for ln in fh if not ln.startswith("#"))]
    if not rows:
        raise DataValidationError(f"{path}: no votes")
    missing = {"voter", "item", "vote"} - set(rows[0])
    if missing:
        raise DataValidationError(f"{path}: missing columns {sorted(missing)}")
    return _assemble([(r["voter"], r["item"], parse_vote(r["vote"])) for r in rows])


def write_rollcall_csv(rc: RollCall, path) -> None:
    names = {YEA: "yea", NAY: "nay", ABSENT: "absent"}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["voter", "item", "vote"])
        for i, v in enumerate(rc.voters):
            for j, it in enumerate(rc.items):
                w.writerow([v, it, names[int(rc.votes[i, j])]])


def _voteview_code(code: str) -> int:
    c = int(float(code))
    if c in (1, 2, 3):
        return YEA
    if c in (4, 5, 6):
        return NAY
    return ABSENT


def read_voteview(votes_path, members_path=None, congress: int | None = None, chamber: str = "Senate",
                  item_filter: Callable[[int], bool] | None = None) -> tuple[RollCall, dict]:
    """Voteview-style vote file (``congress,chamber,rollnumber,icpsr,cast_code``).

    Returns the roll call with voters named from the members file (when
    given) and a voter -> party code map. ``cast_code`` 1-3 is yea, 4-6 nay,
    anything else absent; code 0 (not a member) voters are dropped.
    """
    names, party = {}, {}
    if members_path is not None:
        with open(members_path, newline="") as fh:
            for r in csv.DictReader(fh):
                if congress is not None and int(r["congress"]) != congress:
                    continue
                if chamber and r.get("chamber", chamber) != chamber:
                    continue
                nm = r.get("bioname") or r["icpsr"]
                names[r["icpsr"]] = nm
                party[nm] = r.get("party_code", "")
    records = []
    with open(votes_path, newline="") as fh:
        for r in csv.DictReader(fh):
            if congress is not None and int(r["congress"]) != congress:
                continue
            if chamber and r.get("chamber", chamber) != chamber:
                continue
            roll = int(r["rollnumber"])
            if item_filter is not None and not item_filter(roll):
                continue
            if int(float(r["cast_code"])) == 0:
                continue
            records.append((names.get(r["icpsr"], r["icpsr"]), roll, _voteview_code(r["cast_code"])))
    if not records:
        raise DataValidationError(f"{votes_path}: no matching votes")
    voters = sorted(dict.fromkeys(v for v, _, _ in records), key=str)
    items = sorted(dict.fromkeys(it for _, it, _ in records))
    return _assemble(records, voters, items), party


def read_scdb(path, item_column: str = "voteId", justice_column: str = "justiceName",
              terms: Iterable | None = None) -> dict[str, RollCall]:
    """Justice-centred Supreme Court Database file, one roll call per term.

    ``majority`` 2 means the justice sided with the majority (YEA), 1 the
    dissent (NAY); anything else (recusal, blank) is absent.
    """
    want = None if terms is None else {str(t) for t in terms}
    by_term: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        if item_column not in cols:
            item_column = "caseId"
        missing = {"term", item_column, justice_column, "majority"} - cols
        if missing:
            raise DataValidationError(f"{path}: missing columns {sorted(missing)}")
        for r in reader:
            term = r["term"].strip()
            if want is not None and term not in want:
                continue
            m = r["majority"].strip()
            val = YEA if m == "2" else NAY if m == "1" else ABSENT
            by_term.setdefault(term, []).append((r[justice_column].strip(), r[item_column].strip(), val))
    out = {}
    for term in sorted(by_term, key=lambda t: (len(t), t)):
        rc = _assemble(by_term[term])
        present = (rc.votes != ABSENT).any(axis=1)
        out[term] = rc.select_voters([v for v, p in zip(rc.voters, present) if p])
    return out
