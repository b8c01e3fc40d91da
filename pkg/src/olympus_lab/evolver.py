"""Genetic algorithms restricted to the Olympus subspace.

Genomes are the 77 free bits of the Olympus schema, so every operator keeps
individuals inside the subspace by construction.  Three variants share the
loop:

* ``olympus`` (oGA): uniform initial population, elitist reproduction.
* ``centroid`` (cGA): initial bits and mutations drawn from the centroid
  frequencies of the symmetric catalog.
* ``neutral`` (nGA): distinct elitism plus size-2 tournaments in which a
  statistical tie is broken in favour of the rule farther from the centroid.

Fitness is cumulative: an individual surviving several generations adds the
results of each generation's shared IC sample to its estimate.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import rng
from .ca import FitnessEstimate, IcSample, RuleTable, evaluate, evaluate_on
from .rules import CENTROID_PRIME, OLYMPUS
from .sampling import is_neutral

LOG_FORMAT = "olympus-lab/ga-log/1"
GENOME_BITS = OLYMPUS.dimension
_FREE = OLYMPUS.free_positions
_P_FREE = np.asarray(CENTROID_PRIME.freqs, float)[_FREE]


class Variant(str, enum.Enum):
    OLYMPUS = "olympus"
    CENTROID = "centroid"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class GaConfig:
    variant: Variant = Variant.OLYMPUS
    pop_size: int = 200
    generations: int = 1000
    ics: int = 1000
    mutation_rate: float = 1.0 / GENOME_BITS
    crossover_rate: float = 0.6
    elite_fraction: float | None = None
    post_ics: int = 10_000
    seed: int = 0
    max_steps: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.elite_fraction is None:
            object.__setattr__(self, "elite_fraction",
                               0.10 if self.variant is Variant.NEUTRAL else 0.20)
        for name in ("mutation_rate", "crossover_rate", "elite_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValueError("population size must be even and >= 2")
        if self.generations < 1 or self.ics < 1 or self.post_ics < 1:
            raise ValueError("generations and sample sizes must be positive")

    @classmethod
    def preset(cls, name: str, variant, seed: int, **kw) -> "GaConfig":
        """``paper``: 1000 generations; ``desk``: 100 generations.  Both use pop 200, n = 1000."""
        gens = {"paper": 1000, "desk": 100}
        if name not in gens:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(gens)}")
        return cls(variant=variant, generations=gens[name], seed=seed, **kw)

    @property
    def n_elite(self) -> int:
        return int(round(self.elite_fraction * self.pop_size))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d


@dataclass(frozen=True)
class Individual:
    genome: np.ndarray
    fitness: FitnessEstimate = field(default_factory=FitnessEstimate.empty)
    age: int = 0

    @property
    def key(self) -> bytes:
        return self.genome.tobytes()

    @property
    def rule(self) -> RuleTable:
        return OLYMPUS.embed(self.genome)


def _individual(bits) -> Individual:
    g = np.asarray(bits, np.uint8)
    g.setflags(write=False)
    return Individual(g)


def init_population(cfg: GaConfig) -> list[Individual]:
    gen = rng.generator(cfg.seed, "ga", 0)
    if cfg.variant is Variant.CENTROID:
        G = (gen.random((cfg.pop_size, GENOME_BITS)) < _P_FREE).astype(np.uint8)
    else:
        G = gen.integers(0, 2, (cfg.pop_size, GENOME_BITS), dtype=np.uint8)
    return [_individual(g) for g in G]


def evaluate_generation(pop: list[Individual], cfg: GaConfig, generation: int) -> list[Individual]:
    """Score everyone on one fresh shared sample and accumulate the results."""
    sample = IcSample(rng.seed_sequence(cfg.seed, "ga", 1, generation), cfg.ics)
    uniq = {}
    for ind in pop:
        uniq.setdefault(ind.key, ind.rule)
    scores = dict(zip(uniq, evaluate_on(uniq.values(), sample, cfg.max_steps)))
    return [replace(ind, fitness=ind.fitness + scores[ind.key]) for ind in pop]


def rank(pop: list[Individual]) -> list[Individual]:
    """Best first: higher cumulative fitness, then more trials, then genome order."""
    return sorted(pop, key=lambda i: (-i.fitness.value, -i.fitness.n, i.key))


def centroid_distance(genome: np.ndarray) -> float:
    """Euclidean distance of the embedded rule to the centroid (fixed bits contribute 0)."""
    return float(np.sqrt(((genome - _P_FREE) ** 2).sum()))


def tournament(a: Individual, b: Individual) -> Individual:
    """Size-2 tournament; a statistical tie goes to the rule farther from the centroid."""
    if is_neutral(a.fitness, b.fitness):
        return a if centroid_distance(a.genome) >= centroid_distance(b.genome) else b
    return a if a.fitness.value > b.fitness.value else b


def _mutate(g: np.ndarray, cfg: GaConfig, gen: np.random.Generator) -> np.ndarray:
    hit = gen.random(GENOME_BITS) < cfg.mutation_rate
    out = g.copy()
    if cfg.variant is Variant.CENTROID:
        # resample the hit bits from the centroid frequencies
        out[hit] = (gen.random(int(hit.sum())) < _P_FREE[hit]).astype(np.uint8)
    else:
        out[hit] ^= 1
    return out


def _breed(a: np.ndarray, b: np.ndarray, cfg: GaConfig, gen: np.random.Generator):
    if gen.random() < cfg.crossover_rate:
        cut = int(gen.integers(1, GENOME_BITS))
        a, b = np.r_[a[:cut], b[cut:]], np.r_[b[:cut], a[cut:]]
    return _mutate(a, cfg, gen), _mutate(b, cfg, gen)


def select_reproduce(pop: list[Individual], cfg: GaConfig, generation: int) -> list[Individual]:
    """Next population: elites (aged, fitness kept) followed by fresh offspring."""
    gen = rng.generator(cfg.seed, "ga", 3, generation)
    ranked = rank(pop)
    if cfg.variant is Variant.NEUTRAL:
        elites, seen = [], set()
        for ind in ranked:
            if ind.key not in seen:
                seen.add(ind.key)
                elites.append(ind)
                if len(elites) == cfg.n_elite:
                    break
        n_kids = cfg.pop_size - len(elites)
        idx = gen.integers(0, len(pop), (n_kids + n_kids % 2, 2))
        parents = [tournament(pop[i], pop[j]).genome for i, j in idx]
        pairs = [(parents[2 * k], parents[2 * k + 1]) for k in range(len(parents) // 2)]
    else:
        elites = ranked[:cfg.n_elite]
        n_kids = cfg.pop_size - len(elites)
        idx = gen.integers(0, len(elites), (n_kids // 2 + n_kids % 2, 2))
        pairs = [(elites[i].genome, elites[j].genome) for i, j in idx]
    kids = []
    for a, b in pairs:
        kids.extend(_breed(a, b, cfg, gen))
    nxt = [replace(e, age=e.age + 1) for e in elites]
    nxt += [_individual(k) for k in kids[:n_kids]]
    return nxt


def mean_pairwise_distance(pop: list[Individual]) -> float:
    G = np.array([i.genome for i in pop], dtype=np.int64)
    N = G.shape[0]
    if N < 2:
        return 0.0
    c = G.sum(axis=0)
    return float((c * (N - c)).sum()) / (N * (N - 1) / 2)


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float  # post-evaluated on a fresh large sample
    best_cumulative: float
    best_trials: int
    mean_fitness: float
    mean_distance: float
    distinct: int
    in_olympus: bool
    best_rule: str


@dataclass
class RunLog:
    config: GaConfig
    records: list = field(default_factory=list)

    @property
    def best(self) -> GenerationRecord:
        return max(self.records, key=lambda r: (r.best_fitness, -r.generation))

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def to_jsonl(self) -> str:
        head = {"format": LOG_FORMAT, "kind": "config", **self.config.to_dict()}
        lines = [json.dumps(head, sort_keys=True)]
        lines += [json.dumps({"format": LOG_FORMAT, "kind": "generation", **asdict(r)}, sort_keys=True)
                  for r in self.records]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        for r in rows:
            if r.get("format") != LOG_FORMAT:
                raise ValueError(f"unsupported GA log format {r.get('format')!r}")
        cfg_row = {k: v for k, v in rows[0].items() if k not in ("format", "kind")}
        log = cls(GaConfig(**cfg_row))
        for r in rows[1:]:
            log.records.append(GenerationRecord(**{k: v for k, v in r.items()
                                                   if k not in ("format", "kind")}))
        return log


def run(cfg: GaConfig, progress=None) -> RunLog:
    """Full GA run; one log record per generation."""
    log = RunLog(cfg)
    pop = init_population(cfg)
    for g in range(cfg.generations):
        pop = evaluate_generation(pop, cfg, g)
        ranked = rank(pop)
        top = ranked[0]
        post = evaluate(top.rule, cfg.post_ics, rng.seed_sequence(cfg.seed, "ga", 2, g), cfg.max_steps)
        rules = {i.key: i.rule for i in pop}
        log.records.append(GenerationRecord(
            generation=g,
            best_fitness=post.value,
            best_cumulative=top.fitness.value,
            best_trials=top.fitness.n,
            mean_fitness=float(np.mean([i.fitness.value for i in pop])),
            mean_distance=mean_pairwise_distance(pop),
            distinct=len(rules),
            in_olympus=all(OLYMPUS.contains(r) for r in rules.values()),
            best_rule=top.rule.to_hex(),
        ))
        if progress is not None:
            progress(log.records[-1])
        if g + 1 < cfg.generations:
            pop = select_reproduce(pop, cfg, g)
    return log


def summarize_runs(logs, thresholds=(0.80, 0.82, 0.84)) -> list[dict]:
    """Per-variant summary: best post-evaluated fitness statistics and threshold hits."""
    by_variant: dict[str, list[RunLog]] = {}
    for lg in logs:
        by_variant.setdefault(lg.config.variant.value, []).append(lg)
    rows = []
    for v, lgs in sorted(by_variant.items()):
        best = np.array([lg.best.best_fitness for lg in lgs])
        row = {"variant": v, "runs": len(lgs), "mean_best": float(best.mean()),
               "sd_best": float(best.std(ddof=1)) if best.size > 1 else 0.0,
               "max_best": float(best.max())}
        for t in thresholds:
            gens = []
            for lg in lgs:
                hit = np.flatnonzero(lg.column("best_fitness") >= t)
                if hit.size:
                    gens.append(int(hit[0]))
            row[f"pct_ge_{t:.2f}"] = 100.0 * len(gens) / len(lgs)
            row[f"gen_to_{t:.2f}"] = float(np.mean(gens)) if gens else math.nan
        rows.append(row)
    return rows
