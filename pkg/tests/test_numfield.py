import json
import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from polycensus.numfield import (
    EnumerationTooLarge,
    FieldElement,
    FieldError,
    bareiss_det,
    charpoly,
    elem_add,
    elem_mul,
    elem_neg,
    elem_pow,
    embed,
    enumerate_integers,
    has_root_in_field,
    load_field_config,
    log_embedding,
    min_poly,
    mul_matrix,
    norm,
    parse_field_spec,
    poly_eval_in_field,
    power_basis_field,
    quadratic_field,
    rational_field,
    trace,
)
from polycensus.polyz import Polynomial, complex_roots, factor

from oracles import quadratic_has_root_in


def P(*high_first):
    return Polynomial(list(reversed(high_first)))


QI = quadratic_field(-1)
Q2 = quadratic_field(2)
Q5 = quadratic_field(5)
QM3 = quadratic_field(-3)
CUBIC = power_basis_field(P(1, 0, 0, -2))
CYC8 = power_basis_field(P(1, 0, 0, 0, 1))
TOTREAL3 = power_basis_field(P(1, 0, -3, 1))
TEST_FIELDS = [QI, Q2, Q5, QM3, CUBIC, CYC8, TOTREAL3]


# --- constructors ---------------------------------------------------------------


def test_quadratic_examples():
    assert Q2.signature == (2, 0)
    assert elem_mul(Q2, (0, 1), (0, 1)) == FieldElement((2, 0))
    assert QI.signature == (0, 1)
    assert elem_mul(QI, (0, 1), (0, 1)) == FieldElement((-1, 0))
    # golden ratio: w^2 = w + 1
    assert elem_mul(Q5, (0, 1), (0, 1)) == FieldElement((1, 1))


@pytest.mark.parametrize("d", [0, 1, 4, -4, 12, 18])
def test_quadratic_rejects_non_squarefree(d):
    with pytest.raises(FieldError):
        quadratic_field(d)


def test_power_basis_examples():
    K = power_basis_field(P(1, 0, -2))
    assert K.mul_table == Q2.mul_table and K.signature == Q2.signature
    assert CUBIC.degree == 3 and CUBIC.signature == (1, 1)
    assert CYC8.signature == (0, 2)
    assert TOTREAL3.signature == (3, 0)
    with pytest.raises(FieldError, match="reducible"):
        power_basis_field(P(1, 0, -4))


@pytest.mark.parametrize("K", TEST_FIELDS + [rational_field()], ids=lambda K: K.label)
def test_table_is_commutative_associative(K):
    K.check_table()
    r1, r2 = K.signature
    assert r1 + 2 * r2 == K.degree


def test_embeddings_respect_multiplication():
    a, b = (3, -1, 2, 5), (-2, 4, 0, 1)
    ab = elem_mul(CYC8, a, b)
    with mpmath.workprec(128):
        for x, y, z in zip(embed(CYC8, a), embed(CYC8, b), embed(CYC8, ab)):
            assert abs(x * y - z) < 1e-30


# --- arithmetic -------------------------------------------------------------------


def test_gaussian_arithmetic_examples():
    assert elem_mul(QI, (3, 2), (3, -2)) == FieldElement((13, 0))
    assert elem_mul(QI, (1, 0), (7, -4)) == FieldElement((7, -4))
    assert elem_add(QI, (1, 2), elem_neg(QI, (1, 2))) == FieldElement((0, 0))
    assert elem_pow(QI, (1, 1), 4) == FieldElement((-4, 0))


def test_norm_trace_examples():
    assert norm(QI, (3, 2)) == 13
    assert norm(Q2, (1, 1)) == -1
    assert norm(Q2, (2, 0)) == 4
    assert trace(Q2, (1, 1)) == 2
    assert norm(CUBIC, (0, 1, 0)) == 2
    assert trace(CUBIC, (5, 0, 0)) == 15


def test_bareiss_matches_cofactor_expansion():
    M = [[2, -1, 3, 0], [4, 5, -2, 1], [0, 3, 7, -6], [1, 1, 1, 2]]

    def det(A):
        if len(A) == 1:
            return A[0][0]
        return sum((-1) ** j * A[0][j] * det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(len(A)))

    assert bareiss_det(M) == det(M)
    assert bareiss_det([[0, 1], [1, 0]]) == -1


coords4 = st.lists(st.integers(-50, 50), min_size=4, max_size=4)


@given(coords4, coords4)
def test_norm_is_multiplicative(a, b):
    assert norm(CYC8, elem_mul(CYC8, a, b)) == norm(CYC8, a) * norm(CYC8, b)


@given(coords4)
def test_charpoly_vanishes_and_min_poly_divides(a):
    chi = charpoly(mul_matrix(CYC8, a))
    assert poly_eval_in_field(CYC8, chi, a).is_zero()
    m = min_poly(CYC8, a)
    assert poly_eval_in_field(CYC8, m, a).is_zero()
    assert 4 % m.degree == 0
    assert m ** (4 // m.degree) == chi


def test_min_poly_examples():
    assert min_poly(Q2, (1, 1)) == P(1, -2, -1)
    assert min_poly(QI, (0, 1)) == P(1, 0, 1)
    for K in TEST_FIELDS:
        assert min_poly(K, [2] + [0] * (K.degree - 1)) == P(1, -2)
    # sqrt2 inside Q(zeta_8) is t + t^7 = t - t^3
    assert min_poly(CYC8, (0, 1, 0, -1)) == P(1, 0, -2)


# --- root-in-field -----------------------------------------------------------------


def test_has_root_examples():
    assert has_root_in_field(Q2, P(1, 0, -2))
    assert not has_root_in_field(Q2, P(1, 0, -3))
    assert not has_root_in_field(Q2, P(1, 0, 1))
    for K in TEST_FIELDS:
        assert has_root_in_field(K, P(1, -5))
    assert has_root_in_field(CUBIC, P(1, 0, 0, -2))
    assert not has_root_in_field(CUBIC, P(1, 0, 0, -3))
    assert has_root_in_field(CYC8, P(1, 0, 2))
    assert not has_root_in_field(CYC8, P(1, 0, -3))
    assert not has_root_in_field(CUBIC, P(1, 0, 1))  # degree 2 does not divide 3


@pytest.mark.parametrize("d, hmax", [(-1, 30), (5, 30), (2, 14), (-3, 14)])
def test_strategies_agree_on_quadratics(d, hmax):
    K = quadratic_field(d)
    for b in range(-hmax, hmax + 1):
        for c in range(-hmax, hmax + 1):
            m = Polynomial([c, b, 1])
            if b * b - 4 * c >= 0 and math.isqrt(b * b - 4 * c) ** 2 == b * b - 4 * c:
                continue  # reducible
            a = has_root_in_field(K, m, strategy="A")
            assert a == has_root_in_field(K, m, strategy="B")
            assert a == quadratic_has_root_in(d, b, c)


@pytest.mark.parametrize("K", TEST_FIELDS, ids=lambda K: K.label)
def test_enumerated_elements_are_roots_of_their_min_polys(K):
    for a in enumerate_integers(K, 2.5):
        m = min_poly(K, a)
        assert K.degree % m.degree == 0
        assert poly_eval_in_field(K, m, a).is_zero()
        assert has_root_in_field(K, m)


def test_enumeration_too_large():
    with pytest.raises(EnumerationTooLarge):
        enumerate_integers(QI, 10_000, box_limit=1000)


# --- enumeration ----------------------------------------------------------------------


def test_enumerate_examples():
    assert {a.coords for a in enumerate_integers(QI, 1)} == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(enumerate_integers(QI, 1.5)) == 9


@pytest.mark.parametrize("K, w", [(QI, 4), (QM3, 6), (Q2, 2), (CYC8, 8)], ids=lambda x: getattr(x, "label", str(x)))
def test_house_one_contains_roots_of_unity(K, w):
    units = [a for a in enumerate_integers(K, 1, include_zero=False)]
    roots = [a for a in units if any(elem_pow(K, a, k) == K.one() for k in range(1, 25))]
    assert len(roots) == w


@pytest.mark.parametrize("K, zeta", [(QI, (0, 1)), (QM3, (0, 1)), (CYC8, (0, 1, 0, 0))], ids=lambda x: getattr(x, "label", str(x)))
def test_enumeration_closed_under_units_of_finite_order(K, zeta):
    pts = {a.coords for a in enumerate_integers(K, 3.2)}
    assert {elem_neg(K, a).coords for a in pts} == pts
    assert {elem_mul(K, zeta, a).coords for a in pts} == pts


def test_enumeration_is_complete_against_wide_box():
    # oracle: scan a coordinate box wider than needed and filter numerically
    B = 4.0
    got = {a.coords for a in enumerate_integers(Q5, B)}
    brute = set()
    for x in range(-12, 13):
        for y in range(-12, 13):
            if all(abs(complex(v)) <= B + 1e-12 for v in embed(Q5, (x, y), 64)):
                brute.add((x, y))
    assert got == brute


# --- log embedding ----------------------------------------------------------------------


def test_log_embedding_examples():
    v = log_embedding(Q2, (1, 1))
    assert v == pytest.approx([0.881373587019543, -0.881373587019543], rel=1e-12)
    assert log_embedding(QI, (1, 1)) == pytest.approx([math.log(2)], rel=1e-14)
    assert log_embedding(CYC8, (1, 0, 0, 0)) == pytest.approx([0, 0], abs=1e-30)
    with pytest.raises(FieldError):
        log_embedding(Q2, (0, 0))


coords3 = st.lists(st.integers(-50, 50), min_size=3, max_size=3).filter(any)


@given(coords3)
def test_log_embedding_sums_to_log_norm(a):
    assert sum(log_embedding(CUBIC, a)) == pytest.approx(math.log(abs(norm(CUBIC, a))), abs=1e-9)


def test_conjugate_sandwich_on_census_members():
    # every non-zero root in K of a box member lies in [(2H)^-(n-1), 2H]
    H, n = 4, 3
    import itertools

    for low in itertools.product(range(-H, H + 1), repeat=n):
        p = Polynomial(list(low) + [1])
        for g, _ in factor(p).factors:
            if has_root_in_field(Q2, g):
                for r in complex_roots(g, 64):
                    z = abs(complex(r.center))
                    if z > 1e-12:
                        assert (2 * H) ** -(n - 1) - 1e-12 <= z <= 2 * H + 1e-12


# --- configuration -------------------------------------------------------------------------


def test_parse_field_spec(tmp_path):
    assert parse_field_spec("quad:-1") == QI
    assert parse_field_spec("rational").degree == 1
    cfg = tmp_path / "cubic.json"
    cfg.write_text(json.dumps({"kind": "power-basis", "f": [-2, 0, 0, 1], "monogenic": True}))
    K = parse_field_spec(f"powbasis:{cfg}")
    assert K.mul_table == CUBIC.mul_table and K.monogenic
    toml = tmp_path / "q5.toml"
    toml.write_text('kind = "quadratic"\nd = 5\n')
    assert load_field_config(toml) == Q5
    with pytest.raises(FieldError):
        parse_field_spec("quad:x")
    with pytest.raises(FieldError):
        parse_field_spec("nonsense")


def test_power_basis_config_defaults_to_non_monogenic(tmp_path):
    cfg = tmp_path / "f.json"
    cfg.write_text(json.dumps({"kind": "power-basis", "f": [1, 0, 1]}))
    assert not load_field_config(cfg).monogenic
