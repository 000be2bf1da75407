"""Units and principal ideals of quadratic fields, plus the zeta residue.

Real quadratic fundamental units come from continued fractions; ideal
counts are exact lattice-point counts with unit orbits collapsed to one
canonical generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .numfield import (
    FieldDescriptor,
    FieldElement,
    FieldError,
    elem_mul,
    elem_pow,
    embed,
    norm,
    quadratic_field,
)

# fields with class number one that the ideal counter accepts without config
IMAG_H1 = (-1, -2, -3, -7, -11, -19, -43, -67, -163)
REAL_H1 = (2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31)


class UnsupportedField(FieldError):
    pass


@dataclass(frozen=True)
class UnitGroupData:
    rank: int
    roots_of_unity_count: int
    fundamental_units: tuple[FieldElement, ...]
    regulator: float

    @property
    def w(self) -> int:
        return self.roots_of_unity_count


@dataclass(frozen=True)
class ZetaResidueInputs:
    r1: int
    r2: int
    class_number: int
    regulator: float
    w: int
    abs_discriminant: int

    def __post_init__(self):
        if min(self.class_number, self.w, self.abs_discriminant) <= 0 or self.regulator <= 0:
            raise ValueError("zeta residue inputs must be positive")
        if self.r1 < 0 or self.r2 < 0 or self.r1 + self.r2 == 0:
            raise ValueError("bad signature")


# ---------------------------------------------------------------------------
# exact sign tests in Q(sqrt d)


def _half_sqrt_form(K: FieldDescriptor, a) -> tuple[int, int, int]:
    """Write sigma_1(a) = (u + v sqrt d) / s exactly; sigma_2 flips v."""
    d = K.quadratic_d
    x, y = tuple(a)
    if d % 4 == 1:
        return 2 * x + y, y, 2
    return x, y, 1


def _sign_u_v_sqrt(u: int, v: int, d: int) -> int:
    """Sign of u + v*sqrt(d) for d > 0 not a square."""
    if u >= 0 and v >= 0:
        return 0 if u == 0 and v == 0 else 1
    if u <= 0 and v <= 0:
        return -1
    lhs, rhs = u * u, v * v * d
    if u > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def real_sign(K: FieldDescriptor, a, conj: bool = False) -> int:
    """Exact sign of sigma_1(a) (or sigma_2(a)) in a real quadratic field."""
    u, v, _ = _half_sqrt_form(K, a)
    return _sign_u_v_sqrt(u, -v if conj else v, K.quadratic_d)


# ---------------------------------------------------------------------------
# units


def _cf_floor(P: int, Q: int, d: int, s: int) -> int:
    """floor((P + sqrt d) / Q) with s = isqrt(d), d not a square."""
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


def fundamental_unit_real_quadratic(d: int) -> FieldElement:
    """Fundamental unit eps > 1 of the maximal order of Q(sqrt d).

    Walks the continued fraction of the basis generator w and returns the
    first convergent p/q with N(p - q w) = +-1, normalised to eps > 1.

    >>> fundamental_unit_real_quadratic(2)
    FieldElement(coords=(1, 1))
    """
    K = quadratic_field(d)
    if d < 2:
        raise FieldError("real quadratic fields need d >= 2")
    s = math.isqrt(d)
    # w = (P + sqrt d)/Q with Q | d - P^2
    P, Q = (1, 2) if d % 4 == 1 else (0, 1)
    p0, q0 = 1, 0  # p_{-1}, q_{-1}
    p1, q1 = 0, 1  # p_{-2}, q_{-2}
    for _ in range(10_000):
        a = _cf_floor(P, Q, d, s)
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        u = FieldElement((p0, -q0))
        if abs(norm(K, u)) == 1:
            break
        P = a * Q - P
        Q = (d - P * P) // Q
    else:  # pragma: no cover
        raise ArithmeticError("continued fraction did not produce a unit")
    eps = _normalise_unit(K, u)
    assert abs(norm(K, eps)) == 1
    return eps


def _unit_inverse(K: FieldDescriptor, u: FieldElement) -> FieldElement:
    # u^-1 = N(u) * conj(u); conj(x + y w) = (x + y tr(w)) - y w
    x, y = u.coords
    tr = 1 if K.quadratic_d % 4 == 1 else 0
    n = norm(K, u)
    return FieldElement((n * (x + y * tr), -n * y))


def _normalise_unit(K: FieldDescriptor, u: FieldElement) -> FieldElement:
    """Pick the element of {+-u, +-u^-1} whose first real embedding exceeds 1."""
    one = K.one()
    for c in (u, FieldElement(-x for x in u), _unit_inverse(K, u),
              FieldElement(-x for x in _unit_inverse(K, u))):
        diff = FieldElement(a - b for a, b in zip(c.coords, one.coords))
        if real_sign(K, diff) > 0:
            return c
    raise ArithmeticError("unit normalisation failed")


def regulator_real_quadratic(d: int, bits: int = 128) -> float:
    """log of the larger real embedding of the fundamental unit."""
    K = quadratic_field(d)
    eps = fundamental_unit_real_quadratic(d)
    with mpmath.workprec(bits):
        e1, e2 = embed(K, eps, bits)
        return float(mpmath.log(max(abs(e1), abs(e2))))


def roots_of_unity_count(K: FieldDescriptor) -> int:
    if K.is_rational:
        return 2
    if not K.is_quadratic:
        raise UnsupportedField("roots of unity known only for Q and quadratic fields")
    d = K.quadratic_d
    return {-1: 4, -3: 6}.get(d, 2)


def unit_group(K: FieldDescriptor) -> UnitGroupData:
    r1, r2 = K.signature
    rank = r1 + r2 - 1
    w = roots_of_unity_count(K)
    if rank == 0:
        return UnitGroupData(0, w, (), 1.0)
    if K.is_quadratic and K.quadratic_d > 0:
        eps = fundamental_unit_real_quadratic(K.quadratic_d)
        return UnitGroupData(1, w, (eps,), regulator_real_quadratic(K.quadratic_d))
    raise UnsupportedField("unit group supported for quadratic fields only")


def count_units_in_logbox(K: FieldDescriptor, U: UnitGroupData, L: float) -> int:
    """Number of units u with |log|sigma_i(u)|| <= L at every embedding.

    Real quadratic: the units are +-eps^k, so the count is
    2*(2*floor(L/R) + 1).  A relative tie margin of 1e-12 resolves
    L = k*R (given in floating point) by inclusion.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    if U.rank == 0:
        return U.w
    if U.rank > 1:
        raise UnsupportedField("exact mode unsupported; supply lattice basis")
    k = math.floor(L / U.regulator * (1 + 1e-12))
    return U.w * (2 * k + 1)


# ---------------------------------------------------------------------------
# ideals


def zeta_inputs(K: FieldDescriptor) -> ZetaResidueInputs:
    """Built-in class-number-formula data, or the field's config table."""
    if K.zeta_inputs:
        z = K.zeta_inputs
        return ZetaResidueInputs(int(z["r1"]), int(z["r2"]), int(z["h"] if "h" in z else z["class_number"]),
                                 float(z["R"] if "R" in z else z["regulator"]), int(z["w"]),
                                 int(z["abs_disc"] if "abs_disc" in z else z["abs_discriminant"]))
    if not K.is_quadratic:
        raise UnsupportedField(f"no zeta inputs for {K.label}; supply them in the field config")
    d = K.quadratic_d
    if d not in IMAG_H1 and d not in REAL_H1:
        raise UnsupportedField(f"class number of {K.label} is not built in")
    disc = abs(d) if d % 4 == 1 else 4 * abs(d)
    r1, r2 = K.signature
    R = regulator_real_quadratic(d) if d > 0 else 1.0
    return ZetaResidueInputs(r1, r2, 1, R, roots_of_unity_count(K), disc)


def kappa(z: ZetaResidueInputs) -> float:
    """Residue 2^r1 (2 pi)^r2 h R / (w sqrt|D_K|).

    >>> round(kappa(ZetaResidueInputs(0, 1, 1, 1.0, 4, 4)), 6)
    0.785398
    """
    return (2.0**z.r1 * (2 * math.pi) ** z.r2 * z.class_number * z.regulator
            / (z.w * math.sqrt(z.abs_discriminant)))


def _check_ideal_support(K: FieldDescriptor) -> None:
    if not K.is_quadratic:
        raise UnsupportedField("principal ideal counting needs a quadratic field")
    d = K.quadratic_d
    if d < 0 and d not in IMAG_H1:
        raise UnsupportedField(f"{K.label} does not have class number 1")
    if d > 0 and d not in REAL_H1 and not (K.zeta_inputs and int(K.zeta_inputs.get("h", 0)) == 1):
        raise UnsupportedField(f"{K.label}: class number 1 not known; flag h = 1 in the config")


def _norm_form(K: FieldDescriptor) -> tuple[int, int]:
    """(t, c) with N(x + y w) = x^2 + t x y + c y^2."""
    d = K.quadratic_d
    if d % 4 == 1:
        return 1, (1 - d) // 4
    return 0, -d


def _imag_lattice_count(K: FieldDescriptor, X: int) -> int:
    """#{a != 0 : N(a) <= X} by exact row counting of the norm ellipse."""
    t, c = _norm_form(K)
    dk = 4 * c - t * t  # |disc K| > 0
    total = 0
    ymax = math.isqrt(4 * X // dk)
    for y in range(-ymax - 1, ymax + 2):
        delta = 4 * X - dk * y * y
        if delta < 0:
            continue
        s = math.isqrt(delta)
        hi = (-t * y + s) // 2
        lo = -((t * y + s) // 2)
        if hi >= lo:
            total += hi - lo + 1
    return total - 1


def canonical_generator(K: FieldDescriptor, a, U: UnitGroupData | None = None) -> FieldElement:
    """Distinguished generator of the principal ideal (a).

    Imaginary quadratic: the lexicographically smallest coordinate vector in
    the orbit under roots of unity.  Real quadratic: the associate with
    sigma_1 > 0 and |N| <= sigma_1^2 < eps^2 |N|, i.e. the first log
    coordinate shifted into [log sqrt|N|, log sqrt|N| + R); decided exactly.
    """
    a = FieldElement(tuple(a))
    if a.is_zero():
        raise FieldError("zero generates no ideal")
    U = U or unit_group(K)
    if U.rank == 0:
        return min(_torsion_orbit(K, a, U.w), key=lambda e: e.coords)
    eps = U.fundamental_units[0]
    eps_inv = _unit_inverse(K, eps)
    N = abs(norm(K, a))
    b = a
    # coarse shift by the numeric log, then exact correction steps
    e1 = embed(K, b, 64)[0]
    k = int(mpmath.floor((mpmath.log(abs(e1)) - mpmath.log(N) / 2) / U.regulator))
    b = elem_mul(K, b, elem_pow(K, eps_inv if k > 0 else eps, abs(k)))
    eps2 = elem_mul(K, eps, eps)
    for _ in range(64):
        sq = elem_mul(K, b, b)
        if _lt_int(K, sq, N):
            b = elem_mul(K, b, eps)
        elif not _lt_elem(K, sq, eps2, N):
            b = elem_mul(K, b, eps_inv)
        else:
            break
    else:  # pragma: no cover
        raise ArithmeticError("canonical generator did not settle")
    if real_sign(K, b) < 0:
        b = FieldElement(-x for x in b)
    return b


def _lt_int(K: FieldDescriptor, a: FieldElement, n: int) -> bool:
    """sigma_1(a) < n exactly."""
    u, v, s = _half_sqrt_form(K, a)
    return _sign_u_v_sqrt(u - s * n, v, K.quadratic_d) < 0


def _lt_elem(K: FieldDescriptor, a: FieldElement, e: FieldElement, n: int) -> bool:
    """sigma_1(a) < n * sigma_1(e) exactly."""
    diff = FieldElement(x - n * y for x, y in zip(a.coords, e.coords))
    u, v, _ = _half_sqrt_form(K, diff)
    return _sign_u_v_sqrt(u, v, K.quadratic_d) < 0


def _torsion_orbit(K: FieldDescriptor, a: FieldElement, w: int) -> list[FieldElement]:
    d = K.quadratic_d
    if w == 2:
        return [a, FieldElement(-x for x in a)]
    # (0, 1) is i for d = -1 and (1 + sqrt -3)/2, a primitive sixth root, for d = -3
    zeta = FieldElement((0, 1))
    out = [a]
    for _ in range(w - 1):
        out.append(elem_mul(K, out[-1], zeta))
    return out


def principal_ideal_generators(K: FieldDescriptor, X: int) -> list[FieldElement]:
    """Canonical generators of all non-zero principal ideals of norm <= X,
    found by explicit enumeration (slow route; used as an oracle)."""
    _check_ideal_support(K)
    U = unit_group(K)
    t, c = _norm_form(K)
    reps = set()
    if U.rank == 0:
        dk = 4 * c - t * t
        ymax = math.isqrt(4 * X // dk) + 1
        for y in range(-ymax, ymax + 1):
            xr = math.isqrt(X) + abs(t * y) + 1
            for x in range(-xr, xr + 1):
                n = x * x + t * x * y + c * y * y
                if 0 < n <= X:
                    reps.add(canonical_generator(K, (x, y), U))
        return sorted(reps, key=lambda e: e.coords)
    for a in _real_fundamental_domain(K, X, U):
        reps.add(a)
    return sorted(reps, key=lambda e: e.coords)


def _real_fundamental_domain(K: FieldDescriptor, X: int, U: UnitGroupData):
    """Elements with 0 < |N| <= X, sigma_1 > 0 and |N| <= sigma_1^2 < eps^2|N|.

    Such elements satisfy sigma_1 < eps sqrt X and |sigma_2| <= sqrt X, which
    bounds the coordinates; every candidate is then tested exactly.
    """
    d = K.quadratic_d
    eps = U.fundamental_units[0]
    eps2 = elem_mul(K, eps, eps)
    e1 = float(embed(K, eps, 64)[0].real)
    s = 2 if d % 4 == 1 else 1
    # sigma_1 = (u + v sqrt d)/s in (0, A), sigma_2 = (u - v sqrt d)/s in [-B, B]
    A = s * (e1 * math.sqrt(X) + 1)
    B = s * (math.sqrt(X) + 1)
    sd = math.sqrt(d)
    t, c = _norm_form(K)
    vlo = math.floor(-B / (2 * sd)) - 1
    vhi = math.ceil((A + B) / (2 * sd)) + 1
    for v in range(vlo, vhi + 1):
        ulo = math.floor(max(-v * sd, v * sd - B)) - 1
        uhi = math.ceil(min(A - v * sd, v * sd + B)) + 1
        for u in range(ulo, uhi + 1):
            if s == 2:
                if (u - v) % 2:
                    continue
                x, y = (u - v) // 2, v
            else:
                x, y = u, v
            n = abs(x * x + t * x * y + c * y * y)
            if n == 0 or n > X:
                continue
            a = FieldElement((x, y))
            if real_sign(K, a) <= 0:
                continue
            sq = elem_mul(K, a, a)
            if _lt_int(K, sq, n) or not _lt_elem(K, sq, eps2, n):
                continue
            yield a


def count_principal_ideals(K: FieldDescriptor, X: int) -> int:
    """Number of non-zero principal ideals of norm <= X.

    >>> count_principal_ideals(quadratic_field(-1), 5)
    5
    """
    if X < 1:
        return 0
    _check_ideal_support(K)
    U = unit_group(K)
    if U.rank == 0:
        n = _imag_lattice_count(K, X)
        if n % U.w:
            raise ArithmeticError("element count not divisible by unit orbit size")
        return n // U.w
    return sum(1 for _ in _real_fundamental_domain(K, X, U))


def ideal_count_deviation(K: FieldDescriptor, X_values) -> list[tuple[int, int, float, float]]:
    """Rows (X, count, count/X, count/X - kappa)."""
    kap = kappa(zeta_inputs(K))
    rows = []
    for X in X_values:
        cnt = count_principal_ideals(K, int(X))
        rows.append((int(X), cnt, cnt / X, cnt / X - kap))
    return rows
