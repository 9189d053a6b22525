"""
Roll-call agreement and the choice of cutoff
=============================================

A synthetic chamber with two parties and two defectors. The Binomial
blockmodel uses every vote; modularity on a projected network depends on
which percentile of agreement ratios is used as the cutoff.
"""

import numpy as np

from interclust import Partition, maximize
from interclust.blockmodels import binomial_mle
from interclust.network import percentile_sweep
from interclust.search import SearchConfig
from interclust.arrays import InteractionArray

rng = np.random.default_rng(107)

# 20 senators per side; member 0 votes with the other party, as does member 39
truth = Partition([1] + [0] * 19 + [1] * 19 + [0])
party = Partition([0] * 20 + [1] * 20)

# agreement is Binomial with a logit that also carries a per-member
# "centrism" term, so some members agree with almost everybody
lab = truth.as_array()
logit = np.where(lab[:, None] == lab[None, :], 1.8, 0.1)
centrism = rng.gamma(1.0, 0.6, truth.n)
p = 1 / (1 + np.exp(-(logit + centrism[:, None] + centrism[None, :])))
trials = np.triu(np.full((truth.n, truth.n), 400), 1)
agree = np.triu(rng.binomial(trials, p), 1)
a = InteractionArray.from_trials(trials + trials.T, agree + agree.T)

res = maximize(a, cfg=SearchConfig(restarts=5))
print("blockmodel recovers the defectors:", res.best_partition == truth)
for name, b in (("fitted", res.best_partition), ("party line", party)):
    p = binomial_mle(a, b)
    print("%-10s p_in=%.3f p_out=%.3f" % (name, p.p_in, p.p_out))

###############################################################################
# Modularity over a range of cutoffs, scored against the generating split.
rep = percentile_sweep(a, range(20, 100, 5), truth, SearchConfig(restarts=5))
print("percentile  cutoff  misclassified  nonclassified")
for r in rep.rows:
    print("%10g  %6.3f  %13d  %13d" % (r.percentile, r.cutoff, r.misclassified, r.nonclassified))
