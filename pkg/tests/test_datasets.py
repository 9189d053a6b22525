import hashlib
from importlib import resources

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interclust.arrays import (
    DataValidationError,
    InteractionArray,
    format_array_csv,
    parse_array_csv,
    read_array_csv,
    write_array_csv,
)
from interclust.datasets import (
    ABSENT,
    KARATE_SHA256,
    NAY,
    YEA,
    RollCall,
    load_karate,
    pair_counts,
    parse_vote,
    read_rollcall_csv,
    read_scdb,
    read_voteview,
    write_rollcall_csv,
)


def recount(votes):
    """Pairwise trials and agreements by explicit loops."""
    n = len(votes)
    N = np.zeros((n, n), int)
    V = np.zeros((n, n), int)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for a, b in zip(votes[i], votes[j]):
                if a != ABSENT and b != ABSENT:
                    N[i, j] += 1
                    V[i, j] += a == b
    return N, V


votes_strategy = st.integers(2, 7).flatmap(
    lambda n: st.integers(1, 9).flatmap(
        lambda m: st.lists(st.lists(st.sampled_from([YEA, NAY, ABSENT]), min_size=m, max_size=m),
                           min_size=n, max_size=n)))


@settings(max_examples=80, deadline=None)
@given(votes_strategy)
def test_pair_counts_against_recount(votes):
    rc = RollCall(tuple(f"v{i}" for i in range(len(votes))), tuple(range(len(votes[0]))), np.array(votes))
    a = pair_counts(rc)
    N, V = recount(votes)
    assert np.array_equal(a.trials, N) and np.array_equal(a.agreements, V)
    assert a.ids == rc.voters
    assert np.all(a.agreements <= a.trials)


@settings(max_examples=40, deadline=None)
@given(votes_strategy, st.randoms(use_true_random=False))
def test_pair_counts_permutation_equivariant(votes, rnd):
    n = len(votes)
    rc = RollCall(tuple(range(n)), tuple(range(len(votes[0]))), np.array(votes))
    perm = list(range(n))
    rnd.shuffle(perm)
    inv = np.argsort(perm)
    # voter i of the permuted roll call is voter inv[i] of the original
    rc2 = rc.select_voters([inv[i] for i in range(n)])
    want = pair_counts(rc).permute(perm)
    got = pair_counts(rc2)
    assert got.ids == want.ids
    assert np.array_equal(got.trials, want.trials) and np.array_equal(got.agreements, want.agreements)


def test_array_permute_and_subset():
    c = np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]])
    a = InteractionArray.from_counts(c, ["a", "b", "c"])
    p = a.permute([2, 0, 1])  # a -> position 2, b -> 0, c -> 1
    assert p.ids == ("b", "c", "a")
    assert p.counts[2, 0] == 1 and p.counts[0, 1] == 3
    s = a.subset([0, 2])
    assert s.ids == ("a", "c") and s.counts[0, 1] == 2


def test_count_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    m = np.triu(rng.poisson(2, (6, 6)), 1)
    a = InteractionArray.from_counts(m + m.T, [f"x{i}" for i in range(6)])
    text = format_array_csv(a, ["made by test"])
    assert text.startswith("# made by test\n")
    assert parse_array_csv(text) == a
    write_array_csv(a, tmp_path / "a.csv")
    assert read_array_csv(tmp_path / "a.csv") == a


def test_trials_csv_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    t = np.triu(rng.integers(0, 9, (5, 5)), 1)
    v = np.triu(rng.binomial(t, 0.5), 1)
    a = InteractionArray.from_trials(t + t.T, v + v.T, list("abcde"))
    assert parse_array_csv(format_array_csv(a)) == a
    # the two matrices may also come as separate files
    trials_only = InteractionArray.from_counts(a.trials, a.ids)
    agree_only = InteractionArray.from_counts(a.agreements, a.ids)
    write_array_csv(trials_only, tmp_path / "n.csv")
    write_array_csv(agree_only, tmp_path / "v.csv")
    assert read_array_csv(tmp_path / "n.csv", tmp_path / "v.csv") == a


@pytest.mark.parametrize("text", [
    "a,b\n0,1\n2,0\n",          # asymmetric
    "a,b\n0,1.5\n1.5,0\n",      # non-integer
    "a,b\n0,1\n",               # ragged
    "a,b,c\n0,1\n1,0\n",        # header / size mismatch
])
def test_malformed_csv_rejected(text):
    with pytest.raises(DataValidationError):
        parse_array_csv(text)


def test_karate_fixture():
    ds = load_karate()
    assert ds.array.n == 34 and ds.array.ids == tuple(str(i) for i in range(1, 35))
    sizes = sorted(ds.reference.block_sizes())
    assert sizes == [16, 18]
    g = nx.karate_club_graph()
    i, j = np.triu_indices(34, 1)
    W = nx.to_numpy_array(g, nodelist=range(34), weight="weight")
    assert np.array_equal(ds.array.counts[i, j], W[i, j].astype(int))
    # the instructor (1) and the officer (34) sit on opposite sides
    assert not ds.reference.same_block(0, 33)
    for name, digest in KARATE_SHA256.items():
        raw = resources.files("interclust.data").joinpath(name).read_bytes()
        assert hashlib.sha256(raw).hexdigest() == digest


def test_parse_vote():
    assert parse_vote("Yea") == YEA and parse_vote(" nay ") == NAY and parse_vote("") == ABSENT
    with pytest.raises(DataValidationError):
        parse_vote("maybe")


def test_rollcall_csv_round_trip(tmp_path):
    rc = RollCall(("s1", "s2", "s3"), ("r1", "r2"), np.array([[YEA, NAY], [YEA, ABSENT], [NAY, NAY]]))
    p = tmp_path / "rc.csv"
    write_rollcall_csv(rc, p)
    back = read_rollcall_csv(p)
    assert back.voters == rc.voters and back.items == rc.items
    assert np.array_equal(back.votes, rc.votes)


def test_rollcall_missing_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("voter,item\nA,1\n")
    with pytest.raises(DataValidationError):
        read_rollcall_csv(p)


def test_item_filter():
    rc = RollCall(("a", "b"), (1, 2, 3), np.array([[YEA, NAY, YEA], [YEA, YEA, YEA]]))
    sub = rc.select_items(lambda it: it != 2)
    a = pair_counts(sub)
    assert a.trials[0, 1] == 2 and a.agreements[0, 1] == 2


def test_read_voteview(tmp_path):
    votes = tmp_path / "votes.csv"
    votes.write_text(
        "congress,chamber,rollnumber,icpsr,cast_code\n"
        "107,Senate,1,10,1\n107,Senate,1,20,6\n107,Senate,1,30,9\n"
        "107,Senate,2,10,4\n107,Senate,2,20,4\n107,Senate,2,30,0\n"
        "107,House,1,99,1\n106,Senate,1,10,1\n")
    members = tmp_path / "members.csv"
    members.write_text(
        "congress,chamber,icpsr,bioname,party_code\n"
        "107,Senate,10,ALPHA,100\n107,Senate,20,BETA,200\n107,Senate,30,GAMMA,328\n")
    rc, party = read_voteview(votes, members, congress=107)
    assert rc.voters == ("ALPHA", "BETA", "GAMMA")
    assert rc.items == (1, 2)
    assert rc.votes.tolist() == [[YEA, NAY], [NAY, NAY], [ABSENT, ABSENT]]
    assert party["GAMMA"] == "328"
    rc1, _ = read_voteview(votes, members, congress=107, item_filter=lambda r: r == 2)
    assert rc1.items == (2,)


def test_read_scdb(tmp_path):
    p = tmp_path / "scdb.csv"
    p.write_text(
        "voteId,term,justiceName,majority\n"
        "v1,1990,TMarshall,1\nv1,1990,BRWhite,2\nv1,1990,AScalia,2\n"
        "v2,1990,TMarshall,2\nv2,1990,BRWhite,2\nv2,1990,AScalia,\n"
        "v3,1991,CThomas,2\nv3,1991,BRWhite,1\n")
    out = read_scdb(p)
    assert list(out) == ["1990", "1991"]
    rc = out["1990"]
    assert rc.voters == ("TMarshall", "BRWhite", "AScalia")
    a = pair_counts(rc)
    assert a.trials[0, 1] == 2 and a.agreements[0, 1] == 1
    assert a.trials[0, 2] == 1 and a.agreements[0, 2] == 0
    assert read_scdb(p, terms=[1991])["1991"].voters == ("CThomas", "BRWhite")
