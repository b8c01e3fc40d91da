"""Rule-space geometry: symmetries, the best-known rule catalogs, schemata,
centroids and the 77-dimensional Olympus coordinate system.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ca import TABLE_SIZE, RuleTable

_BITS = 7


def _rule(text):
    return RuleTable.from_text(text)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    rule: RuleTable
    performance: float


class RuleCatalog:
    """Named, ordered collection of rules with their reference performances."""

    def __init__(self, entries):
        self.entries = tuple(entries)

    @classmethod
    def from_rules(cls, rules, names=None):
        rules = list(rules)
        names = names or [f"r{i}" for i in range(len(rules))]
        return cls(CatalogEntry(n, r, float("nan")) for n, r in zip(names, rules))

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    @property
    def rules(self) -> list[RuleTable]:
        return [e.rule for e in self.entries]

    def __getitem__(self, key) -> RuleTable:
        if isinstance(key, int):
            return self.entries[key].rule
        for e in self.entries:
            if e.name == key:
                return e.rule
        raise KeyError(key)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"RuleCatalog({self.names})"


# best local optima known, in the order of their publication table
BLOK = RuleCatalog([
    CatalogEntry("GKL", _rule(
        "00000000 01011111 00000000 01011111 00000000 01011111 00000000 01011111"
        "00000000 01011111 11111111 01011111 00000000 01011111 11111111 01011111"), 0.815),
    CatalogEntry("Das", _rule(
        "00000000 00101111 00000011 01011111 00000000 00011111 11001111 00011111"
        "00000000 00101111 11111100 01011111 00000000 00011111 11111111 00011111"), 0.823),
    CatalogEntry("Davis", _rule(
        "00000111 00000000 00000111 11111111 00001111 00000000 00001111 11111111"
        "00001111 00000000 00000111 11111111 00001111 00110001 00001111 11111111"), 0.818),
    CatalogEntry("ABK", _rule(
        "00000101 00000000 01010101 00000101 00000101 00000000 01010101 00000101"
        "01010101 11111111 01010101 11111111 01010101 11111111 01010101 11111111"), 0.824),
    CatalogEntry("Coe1", _rule(
        "00000001 00010100 00110000 11010111 00010001 00001111 00111001 01010111"
        "00000101 10110100 11111111 00010111 11110001 00111101 11111001 01010111"), 0.851),
    CatalogEntry("Coe2", _rule(
        "00010100 01010001 00110000 01011100 00000000 01010000 11001110 01011111"
        "00010111 00010001 11111111 01011111 00001111 01010011 11001111 01011111"), 0.860),
])

# the symmetric representatives sharing the most bits
BLOK_PRIME = RuleCatalog([
    CatalogEntry("GKL'", BLOK["GKL"], 0.815),
    CatalogEntry("Das'", BLOK["Das"], 0.823),
    CatalogEntry("Davis'", _rule(
        "00000000 00001111 01110011 00001111 00000000 00011111 11111111 00001111"
        "00000000 00001111 11111111 00001111 00000000 00011111 11111111 00011111"), 0.818),
    CatalogEntry("ABK'", _rule(
        "00000000 01010101 00000000 01010101 00000000 01010101 00000000 01010101"
        "01011111 01010101 11111111 01011111 01011111 01010101 11111111 01011111"), 0.824),
    CatalogEntry("Coe1'", BLOK["Coe1"], 0.851),
    CatalogEntry("Coe2'", _rule(
        "00010100 01010101 00000000 11001100 00001111 00010100 00000010 00011111"
        "00010111 00010101 11111111 11001111 00001111 00010111 11111111 00011111"), 0.860),
])

# starting points of the neutral walks, keyed by their nominal fitness
NEUTRAL_WALK_STARTS = {
    0.5004: _rule(
        "00000000 00000110 00010000 00010100 00001010 01011000 01111100 01001101"
        "01000011 11101101 10111111 01000111 01010001 00011111 11111101 01010111"),
    0.7645: _rule(
        "00000101 00000100 00000101 10100111 00000101 00000000 00001111 01110111"
        "00000011 01110111 01010101 10000011 01111011 11111111 10110111 01111111"),
}

SCHEMA_S_TEXT = (
    "000*0*** 0******* 0***0*** *****1** 000***** 0*0***** ******** *****1*1 "
    "0*0***** ******** *****1** ***1*111 ******** ***1***1 *******1 ***1*111")
SCHEMA_S_PRIME_TEXT = (
    "000*0*0* 0****1** 0***00** **0**1** 000***** 0*0**1** ******** 0*0**1*1 "
    "0*0***** *****1** 111111** **0**111 ******** 0**1*1*1 11111**1 0*01*111")


# -- symmetries -------------------------------------------------------------

def rev7(i: int) -> int:
    """Reverse the 7-bit binary representation of a neighbourhood index."""
    return int(format(i, "07b")[::-1], 2)


_REV7 = np.array([rev7(i) for i in range(TABLE_SIZE)])


def s01(rule: RuleTable) -> RuleTable:
    """0/1 symmetry: complement the states in the neighbourhood and the output."""
    return RuleTable(1 - rule.bits[::-1])


def srl(rule: RuleTable) -> RuleTable:
    """Right/left symmetry: mirror every neighbourhood."""
    return RuleTable(rule.bits[_REV7])


def symmetry_orbit(rule: RuleTable) -> list[RuleTable]:
    """Distinct images of ``rule`` under {id, s01, srl, s01∘srl}, in that order."""
    out = []
    for r in (rule, s01(rule), srl(rule), s01(srl(rule))):
        if r not in out:
            out.append(r)
    return out


# -- schemata ---------------------------------------------------------------

STAR = 2


class MembershipError(ValueError):
    """A rule disagrees with a schema on a fixed position."""

    def __init__(self, index: int, expected: int, got: int):
        super().__init__(f"bit {index} is {got}, schema fixes it to {expected}")
        self.index = index


class Schema:
    """128 symbols over {0, 1, *}."""

    def __init__(self, symbols):
        arr = np.array(symbols, dtype=np.int8).ravel()
        if arr.shape != (TABLE_SIZE,) or np.any((arr < 0) | (arr > STAR)):
            raise ValueError("a schema needs 128 symbols in {0, 1, *}")
        arr.setflags(write=False)
        self.symbols = arr
        self.free_positions = np.flatnonzero(arr == STAR)
        self.fixed_positions = np.flatnonzero(arr != STAR)

    @classmethod
    def from_text(cls, text: str) -> "Schema":
        s = "".join(text.split())
        lut = {"0": 0, "1": 1, "*": STAR}
        return cls([lut[c] for c in s])

    @property
    def fixed_count(self) -> int:
        return int(self.fixed_positions.size)

    @property
    def dimension(self) -> int:
        return int(self.free_positions.size)

    def to_text(self, group: int = 8) -> str:
        s = "".join("01*"[v] for v in self.symbols)
        if group:
            s = " ".join(s[i:i + group] for i in range(0, len(s), group))
        return s

    def first_violation(self, rule: RuleTable):
        bad = np.flatnonzero(rule.bits[self.fixed_positions] != self.symbols[self.fixed_positions])
        return None if bad.size == 0 else int(self.fixed_positions[bad[0]])

    def contains(self, rule: RuleTable) -> bool:
        return self.first_violation(rule) is None

    def embed(self, free_bits) -> RuleTable:
        free_bits = np.asarray(free_bits, dtype=np.uint8).ravel()
        if free_bits.size != self.dimension:
            raise ValueError(f"expected {self.dimension} free bits, got {free_bits.size}")
        bits = self.symbols.astype(np.uint8)
        bits[self.free_positions] = free_bits
        return RuleTable(bits)

    def project(self, rule: RuleTable) -> np.ndarray:
        i = self.first_violation(rule)
        if i is not None:
            raise MembershipError(i, int(self.symbols[i]), int(rule.bits[i]))
        return rule.bits[self.free_positions].copy()

    def __eq__(self, other):
        return isinstance(other, Schema) and np.array_equal(self.symbols, other.symbols)

    def __repr__(self):
        return f"Schema({self.to_text(0)})"


def schema_of(rules) -> Schema:
    """Common bits of ``rules``; positions where they disagree become ``*``."""
    bits = np.stack([r.bits for r in _as_rules(rules)])
    agree = (bits == bits[0]).all(axis=0)
    return Schema(np.where(agree, bits[0], STAR))


def joint_bits(rules) -> int:
    return schema_of(rules).fixed_count


def select_blok_prime(catalog: RuleCatalog = BLOK, reference: RuleCatalog | None = BLOK_PRIME,
                      expect: int | None = 51):
    """Choose one symmetric per rule so that the set shares the most bits.

    All combinations are scored.  Among the maximisers the one equal to
    ``reference`` is preferred, otherwise the first in enumeration order.
    Returns ``(catalog, joint_bits, maximisers)``; raises ValueError when the
    best score falls short of ``expect``.
    """
    orbits = [symmetry_orbit(e.rule) for e in catalog]
    best, maximisers = -1, []
    for combo in itertools.product(*orbits):
        score = joint_bits(combo)
        if score > best:
            best, maximisers = score, [combo]
        elif score == best:
            maximisers.append(combo)
    if expect is not None and best < expect:
        raise ValueError(f"best symmetric set shares {best} bits, expected {expect}")
    chosen = maximisers[0]
    if reference is not None:
        for combo in maximisers:
            if list(combo) == reference.rules:
                chosen = combo
                break
    names = [e.name + "'" for e in catalog]
    out = RuleCatalog(CatalogEntry(n, r, e.performance) for n, r, e in zip(names, chosen, catalog))
    return out, best, maximisers


def _as_rules(rules):
    if isinstance(rules, RuleCatalog):
        return rules.rules
    if isinstance(rules, RuleTable):
        return [rules]
    return list(rules)


SCHEMA_S = Schema.from_text(SCHEMA_S_TEXT)
OLYMPUS = Schema.from_text(SCHEMA_S_PRIME_TEXT)


def embed(free_bits) -> RuleTable:
    """Olympus point (77 free bits, ascending position order) to a full rule."""
    return OLYMPUS.embed(free_bits)


def project(rule: RuleTable) -> np.ndarray:
    """Full rule to its 77 Olympus coordinates; raises MembershipError outside."""
    return OLYMPUS.project(rule)


# -- distances and centroids ------------------------------------------------

def hamming(a: RuleTable, b: RuleTable) -> int:
    return int(np.count_nonzero(a.bits != b.bits))


def distance_matrix(rules) -> np.ndarray:
    bits = np.stack([r.bits for r in _as_rules(rules)]).astype(np.int16)
    return (bits[:, None, :] != bits[None, :, :]).sum(axis=2)


@dataclass(frozen=True, eq=False)
class Centroid:
    """Per-position frequency of 1s over a set of ``size`` rules."""

    freqs: np.ndarray
    size: int

    def histogram(self) -> np.ndarray:
        """Number of positions at each frequency level 0/size, ..., size/size."""
        levels = np.rint(self.freqs * self.size).astype(int)
        return np.bincount(levels, minlength=self.size + 1)


def centroid(rules) -> Centroid:
    rs = _as_rules(rules)
    bits = np.stack([r.bits for r in rs]).astype(float)
    return Centroid(bits.mean(axis=0), len(rs))


def euclid_to_centroid(rule: RuleTable, c: Centroid) -> float:
    return float(np.sqrt(((rule.bits - c.freqs) ** 2).sum()))


def l1_to_centroid(rule: RuleTable, c: Centroid) -> float:
    """``sum |x_i - c_i|``; reduces to the Hamming distance when ``c`` is a rule."""
    return float(np.abs(rule.bits - c.freqs).sum())


CENTROID_PRIME = centroid(BLOK_PRIME)
