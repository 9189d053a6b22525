import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interclust.arrays import DataValidationError, InteractionArray
from interclust.blockmodels import (
    BinomialParams,
    PoissonParams,
    ProfiledObjective,
    binomial_block_mle,
    binomial_log_lik,
    binomial_mle,
    poisson_block_mle,
    poisson_log_lik,
    poisson_mle,
    profiled_objective,
)
from interclust.partitions import Partition, enumerate_partitions
from oracles import binomial_loglik_bruteforce, poisson_loglik_bruteforce


def three_entity_counts():
    c = np.zeros((3, 3), dtype=int)
    for (i, j), v in {(0, 1): 4, (0, 2): 1, (1, 2): 1}.items():
        c[i, j] = c[j, i] = v
    return InteractionArray.from_counts(c)


def random_counts(rng, n=8, lam=1.5):
    m = np.triu(rng.poisson(lam, (n, n)), 1)
    return InteractionArray.from_counts(m + m.T)


def random_trials(rng, n=8):
    t = np.triu(rng.integers(0, 12, (n, n)), 1)
    v = np.triu(rng.binomial(t, 0.6), 1)
    return InteractionArray.from_trials(t + t.T, v + v.T)


def test_poisson_single_pair_zero_count():
    a = InteractionArray.from_counts([[0, 0], [0, 0]])
    assert poisson_log_lik(a, Partition([0, 0]), PoissonParams(1.0, 1.0)) == pytest.approx(-1.0, abs=1e-15)


def test_poisson_three_entities_term_by_term():
    a = three_entity_counts()
    b = Partition([0, 0, 1])
    want = 4 * math.log(4) - 4 - math.log(24) - 2
    assert poisson_log_lik(a, b, PoissonParams(4.0, 1.0)) == pytest.approx(want, abs=1e-12)
    p = poisson_mle(a, b)
    assert (p.lambda_in, p.lambda_out) == (4.0, 1.0)
    assert profiled_objective(a, b) == pytest.approx(want, abs=1e-12)


def test_poisson_zero_rate_with_counts():
    a = three_entity_counts()
    assert poisson_log_lik(a, Partition([0, 0, 1]), PoissonParams(4.0, 0.0)) == -math.inf


def test_poisson_all_zero_counts():
    a = InteractionArray.from_counts(np.zeros((5, 5), dtype=int))
    b = Partition([0, 0, 1, 1, 1])
    p = poisson_mle(a, b)
    assert (p.lambda_in, p.lambda_out) == (0.0, 0.0)
    assert poisson_log_lik(a, b, p) == 0.0
    assert profiled_objective(a, b) == 0.0


def test_poisson_mle_degenerate_strata():
    a = three_entity_counts()
    p = poisson_mle(a, Partition([0, 0, 0]))
    assert p.lambda_in == pytest.approx(2.0) and math.isnan(p.lambda_out)
    # scored with the within stratum only
    want = poisson_log_lik(a, Partition([0, 0, 0]), PoissonParams(2.0, 123.0))
    assert profiled_objective(a, Partition([0, 0, 0])) == pytest.approx(want)
    p = poisson_mle(a, Partition([0, 1, 2]))
    assert math.isnan(p.lambda_in) and p.lambda_out == pytest.approx(2.0)


def test_single_pair_every_partition_one_stratum():
    a = InteractionArray.from_counts([[0, 3], [3, 0]])
    vals = {profiled_objective(a, b) for b in enumerate_partitions(2)}
    assert len(vals) == 1


def test_poisson_against_bruteforce():
    rng = np.random.default_rng(0)
    a = random_counts(rng)
    pairs = list(zip(*a.pair_index()))
    for b in list(enumerate_partitions(8, 2))[:40]:
        for lam in [(0.5, 2.0), (1.7, 0.3)]:
            want = poisson_loglik_bruteforce(a.counts, b.labels, *lam, pairs)
            assert poisson_log_lik(a, b, PoissonParams(*lam)) == pytest.approx(want, rel=1e-12)


def test_binomial_certain_outcome():
    a = InteractionArray.from_trials([[0, 10], [10, 0]], [[0, 10], [10, 0]])
    assert binomial_log_lik(a, Partition([0, 0]), BinomialParams(1.0, 0.3)) == 0.0
    p = binomial_mle(a, Partition([0, 0]))
    assert p.p_in == 1.0
    assert profiled_objective(a, Partition([0, 0])) == 0.0


def test_binomial_pooled_proportion():
    t = np.zeros((3, 3), int)
    v = np.zeros((3, 3), int)
    for (i, j), (n_, a_) in {(0, 1): (3, 2), (0, 2): (3, 1), (1, 2): (0, 0)}.items():
        t[i, j] = t[j, i] = n_
        v[i, j] = v[j, i] = a_
    a = InteractionArray.from_trials(t, v)
    p = binomial_mle(a, Partition([0, 0, 0]))
    assert p.p_in == 0.5 and math.isnan(p.p_out)
    p = binomial_mle(a, Partition([0, 0, 1]))
    # pair (1,2) has no trials and drops out of the between stratum
    assert p.p_in == pytest.approx(2 / 3) and p.p_out == pytest.approx(1 / 3)


def test_binomial_against_bruteforce():
    rng = np.random.default_rng(1)
    a = random_trials(rng)
    pairs = list(zip(*a.pair_index()))
    for b in list(enumerate_partitions(8, 2))[::7]:
        want = binomial_loglik_bruteforce(a.trials, a.agreements, b.labels, 0.7, 0.4, pairs)
        assert binomial_log_lik(a, b, BinomialParams(0.7, 0.4)) == pytest.approx(want, rel=1e-12)


def test_kind_mismatch():
    a = three_entity_counts()
    with pytest.raises(TypeError):
        binomial_log_lik(a, Partition([0, 0, 1]), BinomialParams(0.5, 0.5))
    with pytest.raises(TypeError):
        binomial_mle(a, Partition([0, 0, 1]))


def test_array_invariants():
    with pytest.raises(DataValidationError):
        InteractionArray.from_counts([[0, 1], [2, 0]])
    with pytest.raises(DataValidationError):
        InteractionArray.from_trials([[0, 2], [2, 0]], [[0, 3], [3, 0]])
    with pytest.raises(DataValidationError):
        InteractionArray.from_counts([[0, -1], [-1, 0]])
    # diagonal is ignored
    a = InteractionArray.from_counts([[9, 1], [1, 7]])
    b = InteractionArray.from_counts([[0, 1], [1, 0]])
    assert profiled_objective(a, Partition([0, 0])) == profiled_objective(b, Partition([0, 0]))


def test_mle_dominates_perturbations():
    rng = np.random.default_rng(2)
    a = random_counts(rng)
    b = Partition(rng.integers(0, 2, 8))
    best = profiled_objective(a, b)
    p = poisson_mle(a, b)
    for _ in range(100):
        q = PoissonParams(p.lambda_in * math.exp(rng.normal(0, 0.5)), p.lambda_out * math.exp(rng.normal(0, 0.5)))
        assert best >= poisson_log_lik(a, b, q)
    t = random_trials(rng)
    best = profiled_objective(t, b)
    for pin in np.linspace(0.01, 0.99, 15):
        for pout in np.linspace(0.01, 0.99, 15):
            assert best >= binomial_log_lik(t, b, BinomialParams(pin, pout)) - 1e-9


def test_poisson_sufficiency():
    # scrambling counts within strata (totals preserved) shifts every
    # partition with those strata by the same constant only
    a = three_entity_counts()
    c = np.array(a.counts)
    c[0, 2] = c[2, 0] = 0
    c[1, 2] = c[2, 1] = 2
    a2 = InteractionArray.from_counts(c)
    o1, o2 = ProfiledObjective(a, include_constant=False), ProfiledObjective(a2, include_constant=False)
    assert o1(Partition([0, 0, 1])) == o2(Partition([0, 0, 1]))


def test_general_block_models():
    rng = np.random.default_rng(3)
    a = random_counts(rng, n=9)
    b = Partition([0, 0, 0, 1, 1, 1, 2, 2, 2])
    gen = poisson_block_mle(a, b)
    assert gen.block.shape == (3, 3) and np.allclose(gen.block, gen.block.T)
    # the general model nests the two-parameter one
    two = poisson_mle(a, b)
    assert poisson_log_lik(a, b, gen) >= poisson_log_lik(a, b, two) - 1e-9
    tied = np.where(np.eye(3, dtype=bool), two.lambda_in, two.lambda_out)
    assert poisson_log_lik(a, b, PoissonParams(0, 0, block=tied)) == pytest.approx(poisson_log_lik(a, b, two))
    t = random_trials(rng, n=9)
    gb = binomial_block_mle(t, b)
    assert binomial_log_lik(t, b, gb) >= binomial_log_lik(t, b, binomial_mle(t, b)) - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 9))
def test_label_equivariance(seed, n):
    rng = np.random.default_rng(seed)
    a = random_counts(rng, n)
    t = random_trials(rng, n)
    b = Partition(rng.integers(0, 3, n))
    perm = rng.permutation(n)
    assert poisson_log_lik(a.permute(perm), b.permute(perm), PoissonParams(1.2, 0.4)) == \
        poisson_log_lik(a, b, PoissonParams(1.2, 0.4))
    assert binomial_log_lik(t.permute(perm), b.permute(perm), BinomialParams(0.7, 0.3)) == \
        binomial_log_lik(t, b, BinomialParams(0.7, 0.3))
    assert profiled_objective(a.permute(perm), b.permute(perm)) == profiled_objective(a, b)
    assert profiled_objective(t.permute(perm), b.permute(perm)) == profiled_objective(t, b)
