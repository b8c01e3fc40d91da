import hashlib

import numpy as np
import pytest
from hypothesis import given, strategies as st

from olympus_lab import ca, rules
from olympus_lab.ca import IcSample, LatticeState, RuleTable, performance_on
from olympus_lab.rules import (BLOK, BLOK_PRIME, OLYMPUS, SCHEMA_S, MembershipError, centroid,
                               distance_matrix, embed, hamming, joint_bits, project, rev7, s01,
                               schema_of, select_blok_prime, srl, symmetry_orbit)
from olympus_lab.sampling import is_neutral

rule_st = st.lists(st.integers(0, 1), min_size=128, max_size=128).map(RuleTable)
free_st = st.lists(st.integers(0, 1), min_size=77, max_size=77).map(np.array)

# distance matrices as tabulated; row/column order GKL, Das, Davis, ABK, Coe1, Coe2 of the catalog
TABLE_BLOK = np.array([
    [0, 20, 62, 56, 39, 34],
    [20, 0, 58, 56, 45, 42],
    [62, 58, 0, 50, 59, 44],
    [56, 56, 50, 0, 51, 54],
    [39, 45, 59, 51, 0, 51],
    [34, 42, 44, 54, 51, 0]])
TABLE_BLOK_PRIME = np.array([
    [0, 20, 26, 24, 39, 34],
    [20, 0, 14, 44, 45, 42],
    [26, 14, 0, 50, 43, 44],
    [24, 44, 50, 0, 39, 26],
    [39, 45, 43, 39, 0, 49],
    [34, 42, 44, 26, 49, 0]])

# checksum of the 12 catalog strings, frozen when they were transcribed
CATALOG_SHA = "ecbdbfd006bccc614791fb02a7ace0e2d9f7c0fefccb06a09bdb7ce29360a84d"


def _catalog_digest():
    text = "\n".join(r.to_text() for cat in (BLOK, BLOK_PRIME) for r in cat.rules)
    return hashlib.sha256(text.encode()).hexdigest()


def test_catalog_checksum():
    assert _catalog_digest() == CATALOG_SHA


def test_catalog_names_and_performances():
    assert BLOK.names == ["GKL", "Das", "Davis", "ABK", "Coe1", "Coe2"]
    assert [e.performance for e in BLOK] == [0.815, 0.823, 0.818, 0.824, 0.851, 0.860]


@pytest.mark.parametrize("cat", [BLOK, BLOK_PRIME])
def test_catalog_text_hex_roundtrip(cat):
    for r in cat.rules:
        assert RuleTable.from_hex(r.to_hex()) == r
        assert RuleTable.from_text(r.to_text(8)) == r


def test_gkl_catalog_first_bits():
    assert BLOK["GKL"].to_text(8).startswith("00000000 01011111 00000000 01011111")


# -- symmetries -----------------------------------------------------------------

def test_rev7_fixed_points():
    assert sum(rev7(i) == i for i in range(128)) == 16


@given(rule_st)
def test_symmetries_are_commuting_involutions(x):
    assert s01(s01(x)) == x
    assert srl(srl(x)) == x
    assert srl(s01(x)) == s01(srl(x))


def test_s01_definition_on_an_example():
    x = RuleTable([1] + [0] * 127)
    y = s01(x)
    assert y.bits[127] == 0 and y.bits[:127].all()


def test_symmetric_representatives_of_table():
    assert s01(BLOK["Davis"]) == BLOK_PRIME["Davis'"]
    assert s01(BLOK["ABK"]) == BLOK_PRIME["ABK'"]
    # the listing labels Coe2' as the mirror image; the string is the composed image
    assert s01(srl(BLOK["Coe2"])) == BLOK_PRIME["Coe2'"]
    assert srl(BLOK["Coe2"]) != BLOK_PRIME["Coe2'"]
    for name in ("GKL", "Das", "Coe1"):
        assert BLOK_PRIME[name + "'"] == BLOK[name]


def test_gkl_is_invariant_under_the_composed_symmetry():
    gkl = BLOK["GKL"]
    assert s01(srl(gkl)) == gkl
    # the complement symmetry alone moves GKL to its mirror image
    assert s01(gkl) == srl(gkl) != gkl


def test_orbit_sizes():
    sizes = [len(symmetry_orbit(r)) for r in BLOK.rules]
    assert sizes == [2, 2, 2, 2, 4, 4]
    assert int(np.prod(sizes)) == 256


@given(rule_st)
def test_orbit_size_is_1_2_or_4(x):
    orb = symmetry_orbit(x)
    assert len(orb) in (1, 2, 4) and orb[0] == x
    assert all(len(symmetry_orbit(y)) == len(orb) for y in orb)


def test_select_blok_prime():
    cat, best, maxim = select_blok_prime()
    assert best == 51
    assert cat.rules == BLOK_PRIME.rules
    assert any(list(m) == BLOK_PRIME.rules for m in maxim)
    assert joint_bits(BLOK) == 29


def test_select_blok_prime_fails_below_target():
    with pytest.raises(ValueError):
        select_blok_prime(BLOK, None, expect=52)


def test_one_representative_per_rule():
    _, _, maxim = select_blok_prime()
    for combo in maxim:
        for r, orig in zip(combo, BLOK.rules):
            assert r in symmetry_orbit(orig)


# -- performance equivariance -----------------------------------------------------

def _ics(seed, n=640):
    s = IcSample(seed, n)
    return [s.ic(q) for q in range(n)]


@pytest.mark.parametrize("name", ["GKL", "ABK", "Coe2"])
def test_performance_equivariance_exact(name):
    x = BLOK[name]
    ics = _ics(4)
    base = performance_on(x, ics)
    assert performance_on(s01(x), [s.complement() for s in ics]) == base
    assert performance_on(srl(x), [s.reflect() for s in ics]) == base


def test_symmetric_rules_neutral_on_independent_samples():
    for x in (BLOK["Davis"], BLOK["Coe1"]):
        a = ca.evaluate(x, 5000, 1)
        for y in symmetry_orbit(x)[1:]:
            assert is_neutral(a, ca.evaluate(y, 5000, 2))


# -- schemata -------------------------------------------------------------------

def test_schema_of_blok_is_s():
    sch = schema_of(BLOK)
    assert sch == SCHEMA_S
    assert sch.fixed_count == 29


def test_schema_of_blok_prime_is_tabulated_listing():
    sch = schema_of(BLOK_PRIME)
    assert sch.to_text(8) == rules.SCHEMA_S_PRIME_TEXT.replace("  ", " ").strip()
    assert sch.fixed_count == 51 and sch.dimension == 77
    assert sch.fixed_count + len(sch.free_positions) == 128


def test_schema_of_single_rule_has_no_stars(gen):
    r = RuleTable.random(gen)
    sch = schema_of([r])
    assert sch.dimension == 0 and sch.embed([]) == r


def test_s_and_s_prime_agree_except_bit_92():
    fixed_s = set(SCHEMA_S.fixed_positions)
    fixed_p = set(OLYMPUS.fixed_positions)
    # 0-based index 91 is bit number 92 when counting from one
    assert fixed_s - fixed_p == {91}
    shared = sorted(fixed_s & fixed_p)
    assert len(shared) == 28
    assert all(SCHEMA_S.symbols[i] == OLYMPUS.symbols[i] for i in shared)


@given(free_st)
def test_embed_project_roundtrip(p):
    r = embed(p)
    assert OLYMPUS.contains(r)
    assert np.array_equal(project(r), p)


def test_blok_prime_lies_in_olympus():
    for r in BLOK_PRIME.rules:
        assert np.array_equal(project(r).astype(np.uint8), r.bits[OLYMPUS.free_positions])
        assert embed(project(r)) == r


def test_project_abk_reports_first_violation():
    abk = BLOK["ABK"]
    fixed = OLYMPUS.fixed_positions
    expected = int(fixed[np.flatnonzero(abk.bits[fixed] != OLYMPUS.symbols[fixed])[0]])
    with pytest.raises(MembershipError) as exc:
        project(abk)
    assert exc.value.index == expected


def test_embed_rejects_wrong_length():
    with pytest.raises(ValueError):
        embed(np.zeros(76))


# -- distances and centroids ------------------------------------------------------

def test_blok_distance_matrix_exact():
    assert np.array_equal(distance_matrix(BLOK), TABLE_BLOK)


def test_distance_table_labels_are_swapped():
    # the tabulated matrix calls its second row "Davis"; it is the Das string
    assert hamming(BLOK["GKL"], BLOK["Das"]) == 20
    assert hamming(BLOK["GKL"], BLOK["Davis"]) == 62


def test_blok_prime_distance_matrix_exact():
    D = distance_matrix(BLOK_PRIME)
    assert np.array_equal(D, TABLE_BLOK_PRIME)
    assert hamming(BLOK_PRIME["Davis'"], BLOK_PRIME["Das'"]) == 14


def test_average_distances():
    # mean over all 36 entries, diagonal included
    assert distance_matrix(BLOK_PRIME).sum() == 1078
    assert distance_matrix(BLOK_PRIME).mean() == pytest.approx(29.93, abs=0.02)
    assert distance_matrix(BLOK).mean() == pytest.approx(1442 / 36)


@given(rule_st, rule_st)
def test_hamming_is_a_metric(a, b):
    assert hamming(a, a) == 0
    assert hamming(a, b) == hamming(b, a) == int((a.bits != b.bits).sum())


def test_centroid_histograms():
    hp = centroid(BLOK_PRIME).histogram()
    assert hp[3] == 13 and hp[0] + hp[6] == 51 and hp.sum() == 128
    hb = centroid(BLOK).histogram()
    assert hb[3] == 22 and hb[0] + hb[6] == 29 and hb.sum() == 128


def test_centroid_frequencies_are_sixths():
    f = centroid(BLOK).freqs * 6
    assert np.allclose(f, np.rint(f))


def test_centroid_of_one_rule_is_the_rule(gen):
    r = RuleTable.random(gen)
    assert np.array_equal(centroid([r]).freqs, r.bits)
    assert rules.euclid_to_centroid(r, centroid([r])) == 0


def test_centroid_fixed_bits_match_schema():
    c = rules.CENTROID_PRIME.freqs
    fixed = OLYMPUS.fixed_positions
    assert np.array_equal(c[fixed], OLYMPUS.symbols[fixed])
    assert np.all((c[OLYMPUS.free_positions] > 0) & (c[OLYMPUS.free_positions] < 1))


def test_random_olympus_point_distance_to_centroid():
    g = np.random.default_rng(8)
    d = [rules.l1_to_centroid(embed(g.integers(0, 2, 77)), rules.CENTROID_PRIME) for _ in range(4000)]
    se = np.std(d) / np.sqrt(len(d))
    assert abs(np.mean(d) - 38.5) < 4 * se


def test_euclid_distance_value():
    c = rules.Centroid(np.full(128, 0.5), 2)
    r = RuleTable(np.zeros(128, np.uint8))
    assert rules.euclid_to_centroid(r, c) == pytest.approx(np.sqrt(128 * 0.25))
