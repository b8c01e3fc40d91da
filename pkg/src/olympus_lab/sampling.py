"""Landscape-wide statistics: neutrality test, density of states, MH sampling,
fitness-distance correlation, fitness clouds and the negative slope coefficient.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DegenerateVariance, InsufficientData
from .ca import (FitnessEstimate, RuleTable, TABLE_SIZE, evaluate, evaluate_many)
from .rules import OLYMPUS, Centroid, CENTROID_PRIME, RuleCatalog, euclid_to_centroid, hamming

Z95 = 1.96


class Space(str, enum.Enum):
    FULL = "full"
    OLYMPUS = "olympus"


# -- neutrality ---------------------------------------------------------------

def neutrality_threshold(a: FitnessEstimate, b: FitnessEstimate, z: float = Z95) -> float:
    """Largest ``|f_a - f_b|`` still accepted as equal (unpooled z-test)."""
    return z * math.sqrt(a.stderr ** 2 + b.stderr ** 2)


def is_neutral(a: FitnessEstimate, b: FitnessEstimate, z: float = Z95) -> bool:
    """Two-proportion z-test for equality of two fitness estimates.

    Estimates with zero standard error on both sides are neutral only when
    their values coincide exactly.
    """
    if a.n < 1 or b.n < 1:
        raise ValueError("is_neutral needs estimates with n >= 1")
    # exact rational comparison avoids k/n rounding noise
    diff = abs(a.k * b.n - b.k * a.n) / (a.n * b.n)
    if a.stderr == 0 and b.stderr == 0:
        return diff == 0
    return diff <= neutrality_threshold(a, b, z)


def threshold_curve(n: int, grid: np.ndarray | None = None, z: float = Z95):
    """Neutrality threshold between two independent estimates of the same ``f``.

    Returns ``(f, z * sqrt(2 f (1 - f) / n))``.
    """
    f = np.linspace(0.0, 1.0, 101) if grid is None else np.asarray(grid, float)
    return f, z * np.sqrt(2.0 * f * (1.0 - f) / n)


def distinguishable_count(n: int, z: float = Z95) -> int:
    """Length of the greedy chain of pairwise distinguishable values on the 1/n grid.

    Starting at 0, each element is the smallest grid value ``k/n`` that the
    neutrality test separates from its predecessor.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    chain = 1
    prev = FitnessEstimate(0, n)
    k = 1
    while k <= n:
        cur = FitnessEstimate(k, n)
        if not is_neutral(prev, cur, z):
            chain += 1
            prev = cur
        k += 1
    return chain


# -- density of states --------------------------------------------------------

@dataclass(frozen=True)
class FitnessHistogram:
    """Counts of fitness values in bins of equal width over ``[0, 1]``.

    The last bin is closed on the right so ``f = 1`` is kept.
    """
    bin_width: float
    counts: np.ndarray
    total: int

    @classmethod
    def from_values(cls, values, bin_width: float) -> "FitnessHistogram":
        if not 0 < bin_width <= 1:
            raise ValueError("bin_width must lie in (0, 1]")
        n_bins = int(math.ceil(1.0 / bin_width - 1e-9))
        v = np.asarray(values, float)
        idx = np.minimum((v / bin_width + 1e-9).astype(np.int64), n_bins - 1)
        counts = np.bincount(idx, minlength=n_bins) if v.size else np.zeros(n_bins, np.int64)
        return cls(bin_width, counts, int(v.size))

    @property
    def edges(self) -> np.ndarray:
        return np.minimum(np.arange(self.counts.size + 1) * self.bin_width, 1.0)

    def share_below(self, f: float) -> float:
        """Fraction of the samples in bins lying entirely below ``f``."""
        if self.total == 0:
            return 0.0
        keep = self.edges[1:] <= f + 1e-12
        return float(self.counts[keep].sum()) / self.total

    def zero_share(self) -> float:
        """Fraction of samples falling in the first bin (fitness ~ 0)."""
        return float(self.counts[0]) / self.total if self.total else 0.0


def random_rule(space: Space | str, gen: np.random.Generator) -> RuleTable:
    """Uniform rule of the full space or of the Olympus subspace."""
    if Space(space) is Space.OLYMPUS:
        return OLYMPUS.embed(gen.integers(0, 2, OLYMPUS.dimension, dtype=np.uint8))
    return RuleTable.random(gen)


def uniform_sample(space: Space | str, samples: int, ics: int, seed,
                   max_steps: int | None = None) -> list[tuple[RuleTable, FitnessEstimate]]:
    """Draw ``samples`` uniform rules and evaluate each on its own fresh ICs."""
    gen = rng.generator(seed, "rules", 0)
    rules = [random_rule(space, gen) for _ in range(samples)]
    seeds = [rng.seed_sequence(seed, "ics", i) for i in range(samples)]
    return list(zip(rules, evaluate_many(rules, ics, seeds, max_steps)))


def dos_uniform(space: Space | str, samples: int, ics: int, seed,
                max_steps: int | None = None, bin_width: float | None = None):
    """Density of states under uniform sampling.

    Returns ``(histogram, points)``; the default bin width is ``1/ics``.
    """
    points = uniform_sample(space, samples, ics, seed, max_steps)
    hist = FitnessHistogram.from_values([e.value for _, e in points],
                                        bin_width or 1.0 / ics)
    return hist, points


# -- Metropolis-Hastings ------------------------------------------------------

def mh_alpha(fx: float, fy: float) -> float:
    """Acceptance ``min(1, fy / fx)``, with every move out of ``fx = 0`` accepted."""
    if fx <= 0:
        return 1.0
    return min(1.0, fy / fx)


def mh_chain(propose, fitness, samples: int, gen: np.random.Generator, stats: dict | None = None):
    """Generic rejection-until-accept Metropolis-Hastings chain.

    Parameters
    ----------
    propose : callable
        ``propose(gen) -> candidate``, an independent proposal.
    fitness : callable
        ``fitness(candidate, j) -> float or FitnessEstimate`` for the j-th
        proposal overall.
    samples : int
        Number of accepted states to return.
    gen : Generator
        Drives proposals and the uniform acceptance draws.
    stats : dict, optional
        Receives ``proposals``, the total number of candidates evaluated.

    Notes
    -----
    A rejected proposal is simply redrawn; the chain only records accepted
    states, so every sample is a move.  The first proposal is always taken.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    out = []
    j = 0
    cur_f = None
    while len(out) < samples:
        cand = propose(gen)
        fe = fitness(cand, j)
        j += 1
        fy = fe.value if isinstance(fe, FitnessEstimate) else float(fe)
        u = gen.random()
        if cur_f is None or u <= mh_alpha(cur_f, fy):
            out.append((cand, fe))
            cur_f = fy
    if stats is not None:
        stats["proposals"] = j
    return out


def metropolis_hastings_sample(samples: int, ics: int, seed, space: Space | str = Space.FULL,
                               max_steps: int | None = None, stats: dict | None = None):
    """Fitness-biased sample of rules, each proposal evaluated on fresh ICs.

    Returns a list of ``(RuleTable, FitnessEstimate)``, one per accepted move.
    """
    gen = rng.generator(seed, "mh", 0)
    return mh_chain(lambda g: random_rule(space, g),
                    lambda r, j: evaluate(r, ics, rng.seed_sequence(seed, "mh", 1, j), max_steps),
                    samples, gen, stats)


# -- fitness-distance correlation ---------------------------------------------

def pearson(x, y) -> float:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need two equal-length series of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0 or sy == 0:
        raise DegenerateVariance("fitness or distance has zero variance")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


def distances(rules, anchor) -> np.ndarray:
    """Distances from each rule to ``anchor``.

    ``anchor`` may be a RuleTable (Hamming), a RuleCatalog (Hamming to the
    nearest member) or a Centroid (Euclidean).
    """
    rules = list(rules)
    if isinstance(anchor, Centroid):
        return np.array([euclid_to_centroid(r, anchor) for r in rules])
    if isinstance(anchor, RuleCatalog):
        return np.array([min(hamming(r, a) for a in anchor.rules) for r in rules], float)
    if isinstance(anchor, RuleTable):
        return np.array([hamming(r, anchor) for r in rules], float)
    raise TypeError(f"unsupported distance anchor {type(anchor).__name__}")


def fdc(points, anchor) -> float:
    """Fitness-distance correlation of ``(rule, estimate)`` points."""
    points = list(points)
    if len(points) < 2:
        raise ValueError("fdc needs at least two points")
    f = [e.value if isinstance(e, FitnessEstimate) else float(e) for _, e in points]
    return pearson(f, distances([r for r, _ in points], anchor))


def csample(size: int, seed, centroid: Centroid = CENTROID_PRIME) -> list[RuleTable]:
    """Rules whose bits are independent Bernoulli draws at the centroid frequencies."""
    gen = rng.generator(seed, "csample", 0)
    p = np.asarray(centroid.freqs, float)
    draws = (gen.random((size, TABLE_SIZE)) < p).astype(np.uint8)
    return [RuleTable(row) for row in draws]


def csample_points(size: int, ics: int, seed, centroid: Centroid = CENTROID_PRIME,
                   max_steps: int | None = None):
    rules = csample(size, seed, centroid)
    seeds = [rng.seed_sequence(seed, "ics", i) for i in range(size)]
    return list(zip(rules, evaluate_many(rules, ics, seeds, max_steps)))


# -- fitness cloud and NSC ----------------------------------------------------

class Operator(str, enum.Enum):
    ONE_BIT_FLIP = "one-bit-flip"
    ONE_BIT_FLIP_OLYMPUS = "one-bit-flip-olympus"


@dataclass(frozen=True)
class FitnessCloud:
    parent: np.ndarray
    offspring: np.ndarray
    operator: Operator = Operator.ONE_BIT_FLIP

    def __post_init__(self):
        if self.parent.shape != self.offspring.shape:
            raise ValueError("parent and offspring series differ in length")
        for a in (self.parent, self.offspring):
            if not np.all(np.isfinite(a)) or np.any((a < 0) | (a > 1)):
                raise ValueError("cloud fitness values must lie in [0, 1]")

    def __len__(self):
        return self.parent.size


def fitness_cloud(points, operator: Operator | str, ics: int, seed,
                  max_steps: int | None = None) -> FitnessCloud:
    """One offspring per parent: flip one uniformly chosen (admissible) bit."""
    operator = Operator(operator)
    points = list(points)
    gen = rng.generator(seed, "cloud", 0)
    allowed = OLYMPUS.free_positions if operator is Operator.ONE_BIT_FLIP_OLYMPUS \
        else np.arange(TABLE_SIZE)
    kids = [r.flip(int(allowed[gen.integers(allowed.size)])) for r, _ in points]
    seeds = [rng.seed_sequence(seed, "cloud", 1, i) for i in range(len(kids))]
    kid_f = evaluate_many(kids, ics, seeds, max_steps)
    return FitnessCloud(np.array([e.value for _, e in points]),
                        np.array([e.value for e in kid_f]), operator)


@dataclass(frozen=True)
class NscReport:
    edges: np.ndarray
    counts: np.ndarray
    m: np.ndarray
    n: np.ndarray
    slopes: np.ndarray
    nsc: float


def nsc(cloud: FitnessCloud, bins: int = 10, min_occupancy: int = 5) -> NscReport:
    """Negative slope coefficient of a fitness cloud.

    The abscissa range is cut into ``bins`` equal-width bins.  A bin holding
    fewer than ``min_occupancy`` points is merged into its right neighbour
    (the last one into its left neighbour).  Consecutive bin centroids
    ``(M_i, N_i)`` give slopes ``P_i``; the coefficient sums the negative ones.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    x = np.asarray(cloud.parent, float)
    y = np.asarray(cloud.offspring, float)
    if x.size == 0:
        raise InsufficientData("empty cloud")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        raise InsufficientData("all parents share one fitness value")
    edges = list(np.linspace(lo, hi, bins + 1))
    counts = list(np.histogram(x, bins=np.array(edges))[0])

    i = 0
    while i < len(counts) and len(counts) > 1:
        if counts[i] >= min_occupancy:
            i += 1
            continue
        if i < len(counts) - 1:
            counts[i + 1] += counts[i]
            del counts[i]
            del edges[i + 1]
        else:
            counts[i - 1] += counts[i]
            del counts[i]
            del edges[i]
            i -= 1
            break
    edges_a = np.array(edges)
    counts_a = np.array(counts)
    if counts_a.size < 2 or np.any(counts_a < min_occupancy):
        raise InsufficientData(f"fewer than two bins with >= {min_occupancy} points")
    idx = np.clip(np.searchsorted(edges_a, x, side="right") - 1, 0, counts_a.size - 1)
    m = np.bincount(idx, weights=x) / counts_a
    nn = np.bincount(idx, weights=y) / counts_a
    slopes = np.diff(nn) / np.diff(m)
    return NscReport(edges_a, counts_a, m, nn, slopes, float(np.minimum(slopes, 0).sum()))
