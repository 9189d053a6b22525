"""
Exchangeable partitions and the cut-and-paste chain
====================================================

Compare Monte Carlo draws with the exact Ewens-Pitman law and with one
row of the cut-and-paste kernel on partitions of four items.
"""

from collections import Counter

import numpy as np

from interclust import ChainParams, Partition
from interclust.partitions import (
    cap_transition_log_prob,
    cap_transition_sample,
    enumerate_partitions,
    ewens_pitman_log_prob,
    ewens_pitman_sample,
)

params = ChainParams(alpha=1.0, k=2)
rng = np.random.default_rng(0)
states = list(enumerate_partitions(4, params.k))
draws = 50_000

ep = Counter(ewens_pitman_sample(4, params, rng) for _ in range(draws))
start = Partition.trivial(4)
cap = Counter(cap_transition_sample(start, params, rng) for _ in range(draws))

print("%-12s %8s %8s   %8s %8s" % ("partition", "EP", "CRP", "K(1234,.)", "sampled"))
for p in states:
    print("%-12r %8.4f %8.4f   %8.4f %8.4f" % (
        p, np.exp(ewens_pitman_log_prob(p, params)), ep[p] / draws,
        np.exp(cap_transition_log_prob(start, p, params)), cap[p] / draws))
