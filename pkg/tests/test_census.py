import itertools
import json

import pytest

from polycensus.census import (
    CSV_COLUMNS,
    CensusReport,
    NotMonogenicError,
    ResourceLimitError,
    census_bruteforce,
    census_constructive,
    classify,
    constructive_pairs,
    dominance_stats,
    minimal_polynomial_inventory,
    rate_table,
    reports_to_csv,
    reports_to_json,
)
from polycensus.numfield import enumerate_integers, min_poly, power_basis_field, quadratic_field, rational_field
from polycensus.polyz import Polynomial, height, landau_mignotte_holds

from oracles import has_integer_root, quadratic_has_root_in

QI, Q2, Q5, QM3 = (quadratic_field(d) for d in (-1, 2, 5, -3))


def P(*high_first):
    return Polynomial(list(reversed(high_first)))


def counts(r):
    return (r.box_size, r.red_count, r.irr_count, r.rational_root_count, r.zero_constant_count)


# --- examples -----------------------------------------------------------------------


def test_rational_n2_h1():
    r = census_bruteforce(rational_field(), 2, 1)
    assert (r.total, r.irr_count) == (4, 0)


def test_gaussian_n2_h1():
    r = census_bruteforce(QI, 2, 1)
    assert (r.total, r.red_count, r.irr_count) == (5, 4, 1)
    _, members = census_bruteforce(QI, 2, 1, collect_members=True)
    assert (1, 0) in members  # x^2 + 1
    assert census_constructive(QI, 2, 1).same_counts(r)


@pytest.mark.parametrize("H", [1, 3, 7])
def test_zero_constant_slice(H):
    for K in (QI, Q2):
        for n in (2, 3):
            r = census_constructive(K, n, H)
            assert r.zero_constant_count == (2 * H + 1) ** (n - 1)


def test_classify():
    assert classify(Q2, P(1, 0, -2)) == (True, False, False, 2)
    assert classify(Q2, P(1, 0, 1)) == (False, False, False, 0)
    assert classify(Q2, P(1, -1, -2, 2)) == (True, True, True, 1)  # (x-1)(x^2-2)


# --- independent oracles ----------------------------------------------------------------


@pytest.mark.parametrize("d", [-1, 2, 5, -3, -7, 3])
def test_n2_matches_discriminant_oracle(d):
    K = quadratic_field(d)
    H = 12
    r = census_constructive(K, 2, H)
    members = [(c, b) for b in range(-H, H + 1) for c in range(-H, H + 1) if quadratic_has_root_in(d, b, c)]
    assert r.total == len(members)
    assert r.rational_root_count == sum(1 for c, b in members if (b * b - 4 * c) >= 0
                                        and int((b * b - 4 * c) ** 0.5 + 0.5) ** 2 == b * b - 4 * c)


@pytest.mark.parametrize("d", [-1, 2, 5])
def test_n3_quadratic_field_means_integer_root(d):
    # a cubic with a root in a quadratic field has a rational factor, hence an integer root
    H = 5
    r = census_bruteforce(quadratic_field(d), 3, H)
    brute = sum(1 for low in itertools.product(range(-H, H + 1), repeat=3) if has_integer_root(low + (1,)))
    assert r.total == brute == r.rational_root_count
    assert r.irr_count == 0


# --- pipeline equivalence -----------------------------------------------------------------


FIELDS = [QI, Q2, Q5, QM3, quadratic_field(-7), rational_field()]


@pytest.mark.parametrize("K", FIELDS, ids=lambda K: K.label)
@pytest.mark.parametrize("n, H", [(2, 1), (2, 6), (3, 2), (3, 4), (4, 2)])
def test_pipelines_agree(K, n, H):
    a, ma = census_bruteforce(K, n, H, collect_members=True)
    b, mb = census_constructive(K, n, H, collect_members=True)
    assert counts(a) == counts(b)
    assert a.witness_degrees == b.witness_degrees
    assert ma == mb


@pytest.mark.parametrize("f, n, H", [
    ((-2, 0, 0, 1), 3, 3),      # real cube root of 2
    ((1, -3, 0, 1), 3, 3),      # totally real cubic
    ((1, 0, 0, 0, 1), 4, 2),    # eighth roots of unity
    ((1, 0, 0, 0, 1), 2, 4),
])
def test_pipelines_agree_power_basis(f, n, H):
    K = power_basis_field(Polynomial(f))
    a, ma = census_bruteforce(K, n, H, collect_members=True)
    b, mb = census_constructive(K, n, H, collect_members=True)
    assert ma == mb and counts(a) == counts(b)
    if n == K.degree:
        assert a.irr_count > 0


def test_q_sqrt2_n3_h4():
    assert census_bruteforce(Q2, 3, 4).same_counts(census_constructive(Q2, 3, 4))


def test_inventory_against_enumeration():
    inv = minimal_polynomial_inventory(QI, 2, 1)
    direct = {min_poly(QI, a) for a in enumerate_integers(QI, 2)}
    assert set(inv) <= direct
    expected = {m for m in direct if abs(m.coeffs[0]) <= 1
                and landau_mignotte_holds(height(m, all_coeffs=True), 1, 1, 2)}
    assert set(inv) == expected
    for m in (P(1, 0), P(1, -1), P(1, 1), P(1, 0, 1)):
        assert m in inv


def test_witness_pairs_respect_height():
    for K, n, H in [(Q2, 3, 5), (QI, 4, 2), (Q5, 2, 9)]:
        for m, q in constructive_pairs(K, n, H):
            assert landau_mignotte_holds(height(m, all_coeffs=True), height(q, all_coeffs=True), H, n)
            assert height(m * q) <= H


# --- structural invariants ---------------------------------------------------------------------


def _involution(key, n):
    return tuple((-1) ** (n - i) * a for i, a in enumerate(key))


@pytest.mark.parametrize("K, n, H", [(QI, 2, 9), (Q2, 3, 4), (Q5, 4, 2)])
def test_involution_symmetry(K, n, H):
    _, members = census_constructive(K, n, H, collect_members=True)
    s = set(members)
    assert {_involution(k, n) for k in s} == s


@pytest.mark.parametrize("K", [QI, Q2], ids=lambda K: K.label)
def test_counts_monotone_in_h(K):
    for n in (2, 3):
        prev = None
        for H in range(1, 9):
            c = counts(census_constructive(K, n, H))[1:]
            if prev:
                assert all(x >= y for x, y in zip(c, prev))
            prev = c


def test_irr_zero_when_n_does_not_divide_degree():
    for K in FIELDS:
        assert census_constructive(K, 3, 6).irr_count == 0
    K3 = power_basis_field(Polynomial((-2, 0, 0, 1)))
    assert census_bruteforce(K3, 2, 5).irr_count == 0


@pytest.mark.parametrize("workers", [2, 3])
def test_parallel_determinism(workers):
    for fn in (census_bruteforce, census_constructive):
        a = fn(Q2, 3, 5)
        b = fn(Q2, 3, 5, workers=workers)
        assert reports_to_csv([a]) == reports_to_csv([b])


def test_report_invariants():
    for K in (QI, Q2, QM3):
        r = census_constructive(K, 2, 15)
        assert r.total <= r.box_size == 31**2
        assert r.rational_root_count <= r.red_count
        assert sum(r.witness_degrees.values()) == r.total


# --- statistics -------------------------------------------------------------------------------


def test_dominance_rational_field():
    frac, by_d = dominance_stats(rational_field(), 2, 10)
    assert frac == 1.0
    assert by_d == {1: census_constructive(rational_field(), 2, 10).total, 2: 0}


def test_dominance_partition_and_ladder():
    fracs = []
    for H in (10, 20, 40):
        rep = census_constructive(Q2, 3, H)
        frac, by_d = dominance_stats(Q2, 3, H, rep)
        assert sum(by_d.values()) == rep.total
        assert set(by_d) == {1, 2, 3}
        fracs.append(frac)
    assert fracs == sorted(fracs)
    frac, by_d = dominance_stats(QI, 4, 3)
    assert sum(by_d.values()) == census_constructive(QI, 4, 3).total


def test_rate_table():
    reps = [census_constructive(Q2, 2, H) for H in (5, 10, 20)]
    rows = rate_table(reps)
    assert [r[0] for r in rows] == [5, 10, 20]
    H, total, dens, dh, dhl, red, irr = rows[1]
    assert dens == pytest.approx(total / 21**2)
    with pytest.raises(ValueError):
        rate_table(reps[:1])
    with pytest.raises(ValueError):
        rate_table([reps[0], census_constructive(Q2, 3, 5)])


# --- guards and serialization ---------------------------------------------------------------------


def test_resource_guard():
    with pytest.raises(ResourceLimitError):
        census_bruteforce(Q2, 3, 50, box_limit=10_000)
    with pytest.raises(ResourceLimitError):
        census_constructive(Q2, 4, 60)


def test_non_monogenic_refused():
    K = power_basis_field(Polynomial((-5, 0, 1)), monogenic=False)  # Z[sqrt5] is not O_K
    with pytest.raises(NotMonogenicError):
        census_constructive(K, 2, 3)
    census_constructive(K, 2, 3, allow_non_monogenic=True)


def test_non_maximal_order_undercounts():
    # x^2 - x - 1 has root (1+sqrt5)/2, which lies outside Z[sqrt5]
    K = power_basis_field(Polynomial((-5, 0, 1)), monogenic=False)
    loose = census_bruteforce(K, 2, 3, allow_non_monogenic=True)
    assert loose.total < census_bruteforce(Q5, 2, 3).total


def test_csv_schema():
    r = census_constructive(QI, 2, 1)
    lines = reports_to_csv([r]).splitlines()
    assert lines[0] == "# schema=1"
    assert lines[1].split(",") == list(CSV_COLUMNS)
    assert lines[2] == "Q(i),2,1,9,4,1,4,3,constructive,"
    timed = reports_to_csv([r], timing=True).splitlines()[2]
    float(timed.rsplit(",", 1)[1])


def test_json_roundtrip():
    r = census_constructive(Q2, 2, 4)
    (d,) = json.loads(reports_to_json([r]))
    assert d["schema"] == 1
    assert d["red_count"] == r.red_count and d["elapsed_seconds"] is None
    assert CensusReport(**{k: d[k] for k in CSV_COLUMNS}).counts() == r.counts()
