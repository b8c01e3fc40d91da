"""Neutral walks and one-bit neighbourhood statistics.

All neighbour evaluations use a fresh IC sample per neighbour, seeded from
the caller's master seed, so results are reproducible and independent of the
number of worker threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .ca import FitnessEstimate, RuleTable, TABLE_SIZE, evaluate, evaluate_many
from .errors import DegenerateVariance
from .rules import OLYMPUS, RuleCatalog
from .sampling import is_neutral
from .timeseries import _acf_values

MAX_DISTANCE = "max-distance"
NO_NEUTRAL_NEIGHBOUR = "no-neutral-neighbour"


@dataclass(frozen=True)
class WalkStep:
    rule: RuleTable
    fitness: FitnessEstimate
    distance: int


@dataclass(frozen=True)
class NeutralWalk:
    """Path through a neutral network.

    ``steps[0]`` is the start (distance 0); ``len(walk)`` counts the moves.
    """
    steps: tuple
    reason: str
    seed: object = None
    ics: int = 0

    @property
    def start(self) -> WalkStep:
        return self.steps[0]

    @property
    def rules(self) -> list[RuleTable]:
        return [s.rule for s in self.steps]

    @property
    def fitness(self) -> np.ndarray:
        return np.array([s.fitness.value for s in self.steps])

    def __len__(self):
        return len(self.steps) - 1


def neutral_walk(start: RuleTable, ics: int, seed, start_fitness: FitnessEstimate | None = None,
                 max_steps: int | None = None) -> NeutralWalk:
    """Walk away from ``start`` through statistically neutral one-bit flips.

    At each step the bits where the current rule still agrees with ``start``
    are tried in random order; the first flip whose fitness is neutral with
    the start fitness is taken.  The walk stops when no such flip exists
    (or all 128 bits differ).  Estimates are cached per rule.
    """
    gen = rng.generator(seed, "walk", 0)
    n_eval = 0

    def fresh(rule):
        nonlocal n_eval
        fe = evaluate(rule, ics, rng.seed_sequence(seed, "walk", 1, n_eval), max_steps)
        n_eval += 1
        return fe

    f0 = start_fitness if start_fitness is not None else fresh(start)
    cache = {start: f0}
    steps = [WalkStep(start, f0, 0)]
    cur = start
    reason = MAX_DISTANCE
    while steps[-1].distance < TABLE_SIZE:
        same = np.flatnonzero(cur.bits == start.bits)
        moved = False
        for b in gen.permutation(same):
            cand = cur.flip(int(b))
            fe = cache.get(cand)
            if fe is None:
                fe = cache[cand] = fresh(cand)
            if is_neutral(f0, fe):
                cur = cand
                steps.append(WalkStep(cand, fe, steps[-1].distance + 1))
                moved = True
                break
        if not moved:
            reason = NO_NEUTRAL_NEIGHBOUR
            break
    return NeutralWalk(tuple(steps), reason, seed, ics)


# -- neighbourhoods -----------------------------------------------------------

def neighbour_fitness(rule: RuleTable, ics: int, seed, positions=None,
                      max_steps: int | None = None) -> list[FitnessEstimate]:
    """Estimates of the one-bit neighbours at ``positions`` (default: all 128)."""
    pos = np.arange(TABLE_SIZE) if positions is None else np.asarray(positions)
    kids = [rule.flip(int(b)) for b in pos]
    seeds = [rng.seed_sequence(seed, "walk", 2, int(b)) for b in pos]
    return evaluate_many(kids, ics, seeds, max_steps)


def neutral_degree(rule: RuleTable, ics: int, seed, fitness: FitnessEstimate | None = None,
                   positions=None, max_steps: int | None = None) -> int:
    """Number of one-bit neighbours neutral with ``rule``.

    ``positions`` restricts the neighbourhood, e.g. to the Olympus free bits
    (see :func:`olympus_neutral_degree`).
    """
    if fitness is None:
        fitness = evaluate(rule, ics, rng.seed_sequence(seed, "walk", 3), max_steps)
    nb = neighbour_fitness(rule, ics, seed, positions, max_steps)
    return sum(is_neutral(fitness, e) for e in nb)


def olympus_neutral_degree(rule: RuleTable, ics: int, seed, fitness=None,
                           max_steps: int | None = None) -> int:
    return neutral_degree(rule, ics, seed, fitness, OLYMPUS.free_positions, max_steps)


@dataclass(frozen=True)
class WalkScan:
    """Full one-bit neighbourhoods of every rule on a walk.

    ``neighbours[t, b]`` is the estimate of ``walk.rules[t].flip(b)``.
    """
    walk: NeutralWalk
    neighbours: tuple = field(repr=False)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([sum(is_neutral(s.fitness, e) for e in row)
                         for s, row in zip(self.walk.steps, self.neighbours)])


def scan_walk(walk: NeutralWalk, ics: int, seed, max_steps: int | None = None) -> WalkScan:
    rows = []
    for t, s in enumerate(walk.steps):
        rows.append(tuple(neighbour_fitness(s.rule, ics, rng.seed_sequence(seed, "walk", 4, t),
                                            max_steps=max_steps)))
    return WalkScan(walk, tuple(rows))


def neutral_degree_acf(series, max_lag: int = 1) -> np.ndarray:
    """Autocorrelation of neutral-degree series, averaged over several walks.

    ``series`` is one sequence of degrees or a list of them.  Each lag is
    averaged over the series long enough to define it.

    Raises
    ------
    DegenerateVariance
        If no series has non-zero variance.
    """
    if isinstance(series, WalkScan):
        series = [series.degrees]
    elif len(series) and np.ndim(series[0]) == 0:
        series = [series]
    series = [s.degrees if isinstance(s, WalkScan) else np.asarray(s, float) for s in series]
    acc = np.zeros(max_lag + 1)
    cnt = np.zeros(max_lag + 1)
    for s in series:
        if s.size < 2:
            continue
        try:
            r = _acf_values(s, min(max_lag, s.size - 1))
        except DegenerateVariance:
            continue
        acc[:r.size] += r
        cnt[:r.size] += 1
    if cnt[0] == 0:
        raise DegenerateVariance("no neutral-degree series with non-zero variance")
    with np.errstate(invalid="ignore"):
        return np.where(cnt > 0, acc / np.maximum(cnt, 1), np.nan)


def innovation_trace(scan: WalkScan, nn_fitness: FitnessEstimate | None = None):
    """Cumulative counts of new fitness values and of new fitter values along a walk.

    Fitness values are identified by their success count ``k`` (all estimates
    share one sample size).  A value is "fitter" when it exceeds the network
    fitness (default: the start) and the neutrality test separates the two.

    Returns ``(new, fitter)`` integer arrays, one entry per walk point.
    """
    ref = nn_fitness or scan.walk.start.fitness
    seen, seen_fit = set(), set()
    new, fitter = [], []
    for row in scan.neighbours:
        for e in row:
            key = (e.k, e.n)
            if key not in seen:
                seen.add(key)
                if e.value > ref.value and not is_neutral(ref, e):
                    seen_fit.add(key)
        new.append(len(seen))
        fitter.append(len(seen_fit))
    return np.array(new), np.array(fitter)


# -- evolvability -------------------------------------------------------------

@dataclass(frozen=True)
class EvolvabilityHorizon:
    """Neighbour fitnesses sorted ascending with a two-piece linear summary.

    Positions run ``1..128``; the lower piece covers ``1..r`` and the upper
    ``r..128``.  ``m`` is the upper piece's slope per position.
    """
    rule: RuleTable
    fitness: FitnessEstimate
    neighbours: tuple = field(repr=False)
    sorted_values: np.ndarray = field(repr=False)
    r: int
    m: float

    def better_neighbours(self) -> int:
        """Neighbours fitter than the rule by a non-neutral margin."""
        return sum(e.value > self.fitness.value and not is_neutral(self.fitness, e)
                   for e in self.neighbours)


def _line_sse(x, y):
    """Slope and residual sum of squares of the least-squares line."""
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    syy = float(((y - ym) ** 2).sum())
    slope = sxy / sxx
    return slope, max(syy - slope * sxy, 0.0)


def two_piece_fit(values) -> tuple[int, float]:
    """Changepoint ``r`` in ``2..L-1`` minimising the two-piece squared error.

    Both pieces include position ``r``; ties go to the smallest ``r``.
    """
    y = np.asarray(values, float)
    x = np.arange(1, y.size + 1, dtype=float)
    best = None
    for r in range(2, y.size):
        _, lo = _line_sse(x[:r], y[:r])
        slope, hi = _line_sse(x[r - 1:], y[r - 1:])
        tot = lo + hi
        if best is None or tot < best[0] - 1e-15:
            best = (tot, r, slope)
    return best[1], best[2]


def evolvability_horizon(rule: RuleTable, ics: int, seed, fitness: FitnessEstimate | None = None,
                         max_steps: int | None = None) -> EvolvabilityHorizon:
    if fitness is None:
        fitness = evaluate(rule, ics, rng.seed_sequence(seed, "walk", 3), max_steps)
    nb = neighbour_fitness(rule, ics, seed, max_steps=max_steps)
    vals = np.sort([e.value for e in nb])
    r, m = two_piece_fit(vals)
    return EvolvabilityHorizon(rule, fitness, tuple(nb), vals, r, m)


@dataclass(frozen=True)
class PerBitEvolvability:
    """Mean and sd (over catalog rules) of the fitness change caused by flipping each bit.

    Rows are sorted by ascending mean; ``bit`` keeps the original index.
    """
    bit: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    delta: np.ndarray = field(repr=False)  # rules x 128, unsorted


def per_bit_from_horizons(horizons) -> PerBitEvolvability:
    delta = np.array([[e.value - h.fitness.value for e in h.neighbours] for h in horizons])
    mean = delta.mean(axis=0)
    sd = delta.std(axis=0)
    order = np.argsort(mean, kind="stable")
    return PerBitEvolvability(order, mean[order], sd[order], delta)


def per_bit_evolvability(catalog, ics: int, seed, max_steps: int | None = None) -> PerBitEvolvability:
    """Per-bit fitness change over a catalog of rules.

    The sd is the population sd over the catalog, so a one-rule catalog
    gives zeros.
    """
    rules = catalog.rules if isinstance(catalog, RuleCatalog) else list(catalog)
    hs = [evolvability_horizon(r, ics, rng.seed_sequence(seed, "walk", 5, i), max_steps=max_steps)
          for i, r in enumerate(rules)]
    return per_bit_from_horizons(hs)


def nn_share(horizons, level: float) -> float:
    """Fraction of all neighbours whose fitness is neutral with ``level``."""
    tot = hit = 0
    for h in horizons:
        for e in h.neighbours:
            ref = FitnessEstimate(int(round(level * e.n)), e.n)
            hit += is_neutral(ref, e)
            tot += 1
    return hit / tot if tot else 0.0
