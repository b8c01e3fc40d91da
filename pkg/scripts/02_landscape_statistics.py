"""
Density of states, FDC and fitness clouds
=========================================

Small samples so the script finishes in about a minute; the CLI takes the
same parameters at full size.
"""
import numpy as np

from olympus_lab.rules import BLOK, CENTROID_PRIME
from olympus_lab.sampling import (csample_points, dos_uniform, fdc, fitness_cloud,
                                  metropolis_hastings_sample, nsc)

ICS = 200

# uniform sampling of the full space finds almost nothing but f = 0
hist, _ = dos_uniform("full", 500, ICS, seed=1)
print("full space, share at f=0:", hist.zero_share())

# inside the Olympus the picture changes
hist_o, opts = dos_uniform("olympus", 500, ICS, seed=1)
print("olympus, share at f=0:", hist_o.zero_share())

# FDC towards the centroid, uniform vs centroid-biased sample
cpts = csample_points(500, ICS, seed=1)
print("FDC Osample:", round(fdc(opts, CENTROID_PRIME), 3))
print("FDC Csample:", round(fdc(cpts, CENTROID_PRIME), 3))

# one-bit-flip fitness cloud of the Olympus sample
rep = nsc(fitness_cloud(opts, "one-bit-flip-olympus", ICS, seed=1))
print("NSC:", rep.nsc, "bin counts:", rep.counts)

# MH is much costlier (most proposals are rejected); keep it tiny here
stats = {}
mh = metropolis_hastings_sample(100, 64, seed=1, stats=stats)
f = np.array([e.value for _, e in mh])
print(f"MH: {stats['proposals']} proposals, zero share {np.mean(f == 0):.2f}")
print("FDC to ABK:", round(fdc(mh, BLOK["ABK"]), 3))
