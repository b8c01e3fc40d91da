"""
Neutral networks and a short GA run
===================================
"""
import numpy as np

from olympus_lab.evolver import GaConfig, run
from olympus_lab.neutral import evolvability_horizon, neutral_walk, scan_walk
from olympus_lab.rules import BLOK, NEUTRAL_WALK_STARTS

# neutral walk from the f ~ 0.76 start rule; n = 200 keeps it quick
start = NEUTRAL_WALK_STARTS[0.7645]
w = neutral_walk(start, 200, seed=1)
print("walk length:", len(w), "stopped because:", w.reason)

sc = scan_walk(w, 200, seed=1)
print("neutral degrees:", sc.degrees)

# evolvability horizon of Coe2: few neighbours, steep tail
h = evolvability_horizon(BLOK["Coe2"], 1000, seed=1)
print(f"Coe2: r = {h.r}, m = {h.m:.5f}, better neighbours: {h.better_neighbours()}")

# a 10-generation neutral GA (the desk preset runs 100)
log = run(GaConfig(variant="neutral", generations=10, pop_size=60, seed=1))
for rec in log.records[::3]:
    print(rec.generation, round(rec.best_fitness, 4), round(rec.mean_distance, 1), rec.distinct)
print("best:", log.best.best_rule)
