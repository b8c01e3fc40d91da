"""Radius-3 ring cellular automata and the majority-task performance measure.

A rule table has 128 entries.  Entry ``i`` is the new state of a cell whose
neighbourhood ``(s[c-3], ..., s[c+3])`` spells ``i`` in binary, leftmost
neighbour most significant.  ``bits[0]`` is the leftmost character of the
textual form, so rule strings read left to right in table order.

Simulation is bit-sliced: 64 initial configurations share one ``uint64`` per
cell and advance in lockstep (see :mod:`olympus_lab._kernels`).
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels, rng

RADIUS = 3
TABLE_SIZE = 2 ** (2 * RADIUS + 1)
N_CELLS = 149
# ICs streamed through this many 64-lane words at once
ACTIVE_WORDS = 4
_threads = 1


def set_threads(n: int) -> None:
    """Cap the worker threads used by :func:`evaluate_many`; results do not depend on it."""
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads


def default_max_steps(n_cells: int = N_CELLS) -> int:
    return 2 * n_cells


class Outcome(enum.IntEnum):
    UNRESOLVED = _kernels.UNRESOLVED
    ALL_ZEROS = _kernels.ALL_ZEROS
    ALL_ONES = _kernels.ALL_ONES


class RuleTable:
    """Immutable 128-entry rule table."""

    __slots__ = ("_bits", "_masks", "_key")

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.uint8).ravel()
        if arr.shape != (TABLE_SIZE,) or np.any(arr > 1):
            raise ValueError(f"a rule table needs {TABLE_SIZE} entries in {{0, 1}}")
        arr.setflags(write=False)
        self._bits = arr
        self._masks = None
        self._key = arr.tobytes()

    @classmethod
    def from_text(cls, text: str) -> "RuleTable":
        s = "".join(text.split())
        if len(s) != TABLE_SIZE or set(s) - {"0", "1"}:
            raise ValueError("rule text must be 128 characters of '0'/'1'")
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_hex(cls, text: str) -> "RuleTable":
        s = "".join(text.split()).lower()
        if s.startswith("0x"):
            s = s[2:]
        if len(s) != TABLE_SIZE // 4:
            raise ValueError("rule hex must be 32 hex digits")
        return cls.from_text(format(int(s, 16), f"0{TABLE_SIZE}b"))

    @classmethod
    def parse(cls, text: str) -> "RuleTable":
        """Accept either the 128-char binary form or the 32-digit hex form."""
        s = "".join(text.split())
        if len(s) == TABLE_SIZE and not set(s) - {"0", "1"}:
            return cls.from_text(s)
        return cls.from_hex(s)

    @classmethod
    def random(cls, gen: np.random.Generator) -> "RuleTable":
        return cls(gen.integers(0, 2, TABLE_SIZE, dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def masks(self) -> tuple:
        if self._masks is None:
            self._masks = _kernels.rule_masks(self._bits)
        return self._masks

    def to_text(self, group: int = 0) -> str:
        s = "".join("1" if b else "0" for b in self._bits)
        if group:
            s = " ".join(s[i:i + group] for i in range(0, len(s), group))
        return s

    def to_hex(self) -> str:
        return format(int(self.to_text(), 2), f"0{TABLE_SIZE // 4}x")

    def flip(self, i: int) -> "RuleTable":
        b = self._bits.copy()
        b[i] ^= 1
        return RuleTable(b)

    def __getitem__(self, i):
        return self._bits[i]

    def __len__(self):
        return TABLE_SIZE

    def __eq__(self, other):
        return isinstance(other, RuleTable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"RuleTable({self.to_hex()})"


@dataclass(frozen=True, eq=False)
class LatticeState:
    """Binary ring configuration."""

    cells: np.ndarray

    def __post_init__(self):
        c = np.array(self.cells, dtype=np.uint8).ravel()
        if c.size < 2 * RADIUS + 1 or np.any(c > 1):
            raise ValueError("cells must be a binary sequence longer than the neighbourhood")
        c.setflags(write=False)
        object.__setattr__(self, "cells", c)

    @classmethod
    def from_text(cls, text: str) -> "LatticeState":
        s = "".join(text.split())
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def random(cls, gen: np.random.Generator, n_cells: int = N_CELLS) -> "LatticeState":
        return cls(gen.integers(0, 2, n_cells, dtype=np.uint8))

    @property
    def size(self) -> int:
        return self.cells.size

    @property
    def density(self) -> float:
        return float(self.cells.sum()) / self.size

    def is_uniform(self) -> bool:
        return bool(self.cells.min() == self.cells.max())

    def rotate(self, j: int) -> "LatticeState":
        return LatticeState(np.roll(self.cells, j))

    def reflect(self) -> "LatticeState":
        return LatticeState(self.cells[::-1])

    def complement(self) -> "LatticeState":
        return LatticeState(1 - self.cells)

    def to_text(self) -> str:
        return "".join("1" if c else "0" for c in self.cells)

    def __eq__(self, other):
        return isinstance(other, LatticeState) and np.array_equal(self.cells, other.cells)


def pack_states(states) -> np.ndarray:
    """Bit-slice a list of equal-length states into ``uint64[N, ceil(len/64)]``."""
    cells = np.stack([s.cells for s in states])  # (n, N)
    n, size = cells.shape
    W = (n + 63) // 64
    padded = np.zeros((W * 64, size), np.uint8)
    padded[:n] = cells
    # lane j of word w <- state 64 w + j
    packed = np.packbits(padded.reshape(W, 64, size), axis=1, bitorder="little")
    return np.ascontiguousarray(packed.transpose(2, 0, 1)).view(np.uint64).reshape(size, W)


def unpack_states(words: np.ndarray, n: int) -> list[LatticeState]:
    size, W = words.shape
    bytes_ = np.ascontiguousarray(words).view(np.uint8).reshape(size, W, 8)
    bits = np.unpackbits(bytes_, axis=2, bitorder="little").reshape(size, W * 64)
    return [LatticeState(bits[:, q]) for q in range(n)]


@dataclass(frozen=True, eq=False)
class IcSample:
    """``n`` initial configurations with i.i.d. fair bits, regenerated from ``seed``.

    IC ``q`` is lane ``q % 64`` of word ``q // 64``; the words are raw PCG64
    outputs from the ``"ics"`` child stream of ``seed``.
    """

    seed: object
    n: int
    n_cells: int = N_CELLS
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("sample size must be non-negative")
        if self.n_cells % 2 == 0 or self.n_cells < 2 * RADIUS + 1:
            raise ValueError("the ring size must be odd and longer than the neighbourhood")

    @property
    def words(self) -> np.ndarray:
        if "words" not in self._cache:
            W = (self.n + 63) // 64
            self._cache["words"] = rng.random_words(
                rng.seed_sequence(self.seed, "ics"), (self.n_cells, W))
        return self._cache["words"]

    @cached_property
    def ones(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8).reshape(self.n_cells, -1, 8),
                             axis=2, bitorder="little").reshape(self.n_cells, -1)
        return bits[:, :self.n].sum(axis=0).astype(np.int64)

    def ic(self, q: int) -> LatticeState:
        w, j = divmod(q, 64)
        return LatticeState(((self.words[:, w] >> np.uint64(j)) & np.uint64(1)).astype(np.uint8))

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class FitnessEstimate:
    """``k`` correct classifications out of ``n`` trials."""

    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")

    @classmethod
    def empty(cls) -> "FitnessEstimate":
        return cls(0, 0)

    @property
    def value(self) -> float:
        return self.k / self.n if self.n else 0.0

    @property
    def stderr(self) -> float:
        if not self.n:
            return 0.0
        f = self.value
        return math.sqrt(f * (1.0 - f) / self.n)

    def __add__(self, other: "FitnessEstimate") -> "FitnessEstimate":
        return FitnessEstimate(self.k + other.k, self.n + other.n)


def cumulative_update(acc: FitnessEstimate, new: FitnessEstimate) -> FitnessEstimate:
    """Pool two estimates of the same rule from disjoint IC samples."""
    return acc + new


def step(rule: RuleTable, state: LatticeState) -> LatticeState:
    """One synchronous update with periodic boundaries."""
    return step_many(rule, [state])[0]


def step_many(rule: RuleTable, states, n_steps: int = 1) -> list[LatticeState]:
    states = list(states)
    words = _kernels.step_words(rule.masks, pack_states(states), n_steps)
    return unpack_states(words, len(states))


def classify_batch(rule: RuleTable, sample: IcSample, max_steps: int | None = None):
    """Outcome, count of ones and resolution step for every IC in ``sample``."""
    if max_steps is None:
        max_steps = default_max_steps(sample.n_cells)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    return _kernels.classify_sample(rule.masks, sample.words, sample.n, max_steps, ACTIVE_WORDS)


def classify(rule: RuleTable, ic: LatticeState, max_steps: int | None = None) -> Outcome:
    """Relaxation outcome of a single IC."""
    if max_steps is None:
        max_steps = default_max_steps(ic.size)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    words = pack_states([ic])
    out, _, _ = _kernels.classify_sample(rule.masks, words, 1, max_steps, 1)
    return Outcome(int(out[0]))


def count_correct(outcome: np.ndarray, ones: np.ndarray, n_cells: int) -> int:
    majority_one = 2 * ones > n_cells
    ok = np.where(majority_one, outcome == Outcome.ALL_ONES, outcome == Outcome.ALL_ZEROS)
    return int(ok.sum())


def standard_performance(rule: RuleTable, sample: IcSample,
                         max_steps: int | None = None) -> FitnessEstimate:
    """Fraction of ``sample`` relaxed to the uniform state of the initial majority.

    Unresolved ICs count as failures.
    """
    if sample.n < 1:
        raise ValueError("empty IC sample")
    outcome, ones, _ = classify_batch(rule, sample, max_steps)
    return FitnessEstimate(count_correct(outcome, ones, sample.n_cells), sample.n)


def performance_on(rule: RuleTable, states, max_steps: int | None = None) -> FitnessEstimate:
    """Standard performance on an explicit list of equal-length ICs."""
    states = list(states)
    if not states:
        raise ValueError("empty IC list")
    n_cells = states[0].size
    if max_steps is None:
        max_steps = default_max_steps(n_cells)
    out, ones, _ = _kernels.classify_sample(rule.masks, pack_states(states), len(states),
                                            max_steps, ACTIVE_WORDS)
    return FitnessEstimate(count_correct(out, ones, n_cells), len(states))


def evaluate(rule: RuleTable, n: int, seed, max_steps: int | None = None,
             n_cells: int = N_CELLS) -> FitnessEstimate:
    """Standard performance on a fresh sample of ``n`` ICs drawn from ``seed``."""
    return standard_performance(rule, IcSample(seed, n, n_cells), max_steps)


def evaluate_many(rules, n: int, seeds, max_steps: int | None = None,
                  n_cells: int = N_CELLS) -> list[FitnessEstimate]:
    """Evaluate ``rules[i]`` on a fresh sample drawn from ``seeds[i]``.

    Work is spread over :func:`get_threads` threads (the kernel releases the
    GIL); each rule's estimate depends only on its own seed.
    """
    rules = list(rules)
    seeds = list(seeds)
    if len(rules) != len(seeds):
        raise ValueError("one seed per rule is required")
    job = lambda rs: evaluate(rs[0], n, rs[1], max_steps, n_cells)
    if _threads == 1 or len(rules) < 2:
        return [job(rs) for rs in zip(rules, seeds)]
    with ThreadPoolExecutor(_threads) as pool:
        return list(pool.map(job, zip(rules, seeds)))


def evaluate_on(rules, sample: IcSample, max_steps: int | None = None) -> list[FitnessEstimate]:
    """Evaluate several rules on one shared sample."""
    rules = list(rules)
    sample.words
    job = lambda r: standard_performance(r, sample, max_steps)
    if _threads == 1 or len(rules) < 2:
        return [job(r) for r in rules]
    with ThreadPoolExecutor(_threads) as pool:
        return list(pool.map(job, rules))
