"""
Clusterings that drift over time
=================================

Nine members vote over ten terms; one changes sides at term 5 and the
roster turns over twice. The hidden Markov fit carries the previous
clustering forward as a cut-and-paste prior.
"""

import numpy as np

from interclust import ChainParams, Partition
from interclust.search import SearchConfig
from interclust.simulate import simulate_series
from interclust.temporal import fit_sequence

rng = np.random.default_rng(1990)
names = list("ABCDEFGHI")

rosters, parts = [], []
for t in range(10):
    roster = list(names)
    if t >= 3:
        roster[0] = "J"  # A retires, J arrives
    if t >= 6:
        roster[8] = "K"  # I retires, K arrives
    side = {"A": 0, "B": 0, "C": 0, "D": 0, "E": 0, "F": 1, "G": 1, "H": 1, "I": 1, "J": 0, "K": 1}
    if t >= 4:
        side["E"] = 1  # the switch at term 5
    rosters.append(roster)
    parts.append(Partition([side[e] for e in roster]))

series = simulate_series(parts, 80, 0.9, 0.4, rng, rosters=rosters, terms=[str(2000 + t) for t in range(10)])
seq = fit_sequence(series, ChainParams(1.0, 2), cfg=SearchConfig(restarts=4))
print(seq.to_text(symbols="o*"))
print("all terms recovered:", [f.partition for f in seq] == parts)
