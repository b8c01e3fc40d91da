"""
Rule space tour
===============

The six best known rules, their symmetric images and the Olympus subspace
that the images span.
"""
import numpy as np

from olympus_lab import ca
from olympus_lab.rules import (BLOK, BLOK_PRIME, OLYMPUS, centroid, distance_matrix, embed,
                               project, s01, srl, symmetry_orbit)

# each rule is a 128-entry output table; print the first one in 8-bit groups
gkl = BLOK["GKL"]
print(gkl.to_text(8))
print("hex:", gkl.to_hex())

# GKL is fixed by the composed symmetry, so its orbit has two members
print("orbit sizes:", [len(symmetry_orbit(r)) for r in BLOK.rules])
print("s01(srl(GKL)) == GKL:", s01(srl(gkl)) == gkl)

# picking one image per rule to share as many bits as possible gives 51
print("fixed bits of the Olympus schema:", OLYMPUS.fixed_count)
print(OLYMPUS.to_text(8))

print(distance_matrix(BLOK_PRIME))

# coordinates inside the Olympus: 77 free bits
x = project(BLOK_PRIME["ABK'"])
assert embed(x) == BLOK_PRIME["ABK'"]
print("ABK' free bits:", "".join(map(str, x)))

c = centroid(BLOK_PRIME)
print("centroid value counts (0, 1/6, ..., 1):", c.histogram())

# a quick estimate; 10^4 ICs take well under a second with the bit-sliced engine
e = ca.evaluate(gkl, 10_000, seed=1)
print(f"GKL: f = {e.value:.4f} +- {e.stderr:.4f}")
