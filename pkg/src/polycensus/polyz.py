"""Exact integer polynomials: heights, Mahler measure, certified roots and
factorization over Z.

Polynomials are stored lowest degree first.  Everything that decides a
mathematical fact (divisibility, irreducibility, height inequalities) is done
in exact integer arithmetic; floating point is only used to *propose*
candidates that are then verified exactly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

DEFAULT_PRECISION = 128
PRECISION_CEILING = 4096


class PolynomialError(ValueError):
    pass


class NotADivisorError(PolynomialError):
    def __init__(self, msg: str = "not a divisor"):
        super().__init__(msg)


class RootFindingError(ArithmeticError):
    """Root approximations did not certify at the requested precision."""

    def __init__(self, achieved_bits: float, requested_bits: int):
        super().__init__(
            f"roots not certified: achieved ~{achieved_bits:.1f} bits, requested {requested_bits}"
        )
        self.achieved_bits = achieved_bits
        self.requested_bits = requested_bits


class FactorizationError(ArithmeticError):
    def __init__(self, poly: "Polynomial", msg: str = "factorization unresolved"):
        super().__init__(f"{msg}: {poly}")
        self.poly = poly


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Dense integer polynomial; ``coeffs[i]`` is the coefficient of x**i.

    >>> Polynomial.from_roots([2, -3])
    Polynomial(x^2 + x - 6)
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def monomial(cls, deg: int, c: int = 1) -> "Polynomial":
        return cls([0] * deg + [c])

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-a for a in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return mul(self, other)

    def __pow__(self, e: int) -> "Polynomial":
        out = Polynomial([1])
        for _ in range(e):
            out = out * self
        return out

    def derivative(self) -> "Polynomial":
        return Polynomial([i * a for i, a in enumerate(self.coeffs)][1:])

    def to_json(self) -> str:
        return json.dumps([str(a) for a in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        return cls(int(s) for s in json.loads(text))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            a = self.coeffs[i]
            if a == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(a)
            body = (str(mag) if mag != 1 or i == 0 else "") + mono
            if not terms:
                terms.append(("-" if a < 0 else "") + body)
            else:
                terms.append(("- " if a < 0 else "+ ") + body)
        return " ".join(terms)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _as_poly(p) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial(p)


# ---------------------------------------------------------------------------
# heights and elementary arithmetic


def height(p: Polynomial, all_coeffs: bool = False) -> int:
    """Coefficient height.

    With ``all_coeffs=False`` (default) a monic polynomial is measured on its
    non-leading coefficients only; a non-monic one always uses every
    coefficient.

    >>> height(Polynomial([-5, 3, 1]))
    5
    >>> height(Polynomial([0, 0, 0, 1])), height(Polynomial([0, 0, 0, 1]), all_coeffs=True)
    (0, 1)
    """
    p = _as_poly(p)
    if p.is_zero():
        raise PolynomialError("undefined height")
    c = p.coeffs if (all_coeffs or not p.is_monic()) else p.coeffs[:-1]
    return max((abs(a) for a in c), default=0)


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    a, b = p.coeffs, q.coeffs
    if not a or not b:
        return Polynomial()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return Polynomial(out)


def divmod_poly(p: Polynomial, d: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Division by a polynomial whose leading coefficient divides every
    intermediate leading term (always true for monic ``d``)."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(p.coeffs)
    dd = d.degree
    lead = d.lead
    if len(r) - 1 < dd:
        return Polynomial(), Polynomial(r)
    q = [0] * (len(r) - dd)
    dc = d.coeffs
    for k in range(len(r) - 1, dd - 1, -1):
        c = r[k]
        if c == 0:
            continue
        if c % lead:
            raise NotADivisorError()
        c //= lead
        q[k - dd] = c
        base = k - dd
        for i in range(dd + 1):
            r[base + i] -= c * dc[i]
    return Polynomial(q), Polynomial(r[:dd])


def exact_div(p: Polynomial, d: Polynomial) -> Polynomial:
    """Return q with p == d*q, or raise :class:`NotADivisorError`.

    >>> exact_div(Polynomial([-6, 1, 1]), Polynomial([-2, 1]))
    Polynomial(x + 3)
    """
    q, r = divmod_poly(_as_poly(p), _as_poly(d))
    if not r.is_zero():
        raise NotADivisorError()
    return q


def cauchy_root_bound(p: Polynomial) -> int:
    """1 + max |a_i| over the non-leading coefficients of a monic polynomial;
    every complex root has modulus at most this value."""
    p = _as_poly(p)
    if p.degree < 1 or not p.is_monic():
        raise PolynomialError("cauchy_root_bound needs a monic polynomial of degree >= 1")
    return 1 + height(p)


def landau_mignotte_constant(n: int) -> float:
    """2**n * sqrt(n + 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0**n * math.sqrt(n + 1)


def landau_mignotte_holds(hm: int, hq: int, hp: int, n: int) -> bool:
    """Exact test of hm*hq <= 2**n*sqrt(n+1)*hp on integers (squared form)."""
    return (hm * hq) ** 2 <= 4**n * (n + 1) * hp * hp


# ---------------------------------------------------------------------------
# gcd / squarefree decomposition over Q (monic integer in, monic integer out)


def _frac_trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _frac_rem(a: list, b: list) -> list:
    a = list(a)
    db = len(b) - 1
    inv = 1 / Fraction(b[-1])
    while len(a) - 1 >= db and a:
        c = a[-1] * inv
        s = len(a) - 1 - db
        for i in range(db + 1):
            a[s + i] -= c * b[i]
        a.pop()
        _frac_trim(a)
    return a


def gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd over Q.  For monic integer inputs the result has integer
    coefficients (Gauss); otherwise it is scaled to a primitive integer
    polynomial with positive leading coefficient."""
    a = [Fraction(x) for x in p.coeffs]
    b = [Fraction(x) for x in q.coeffs]
    while b:
        a, b = b, _frac_rem(a, b)
    if not a:
        return Polynomial()
    lead = a[-1]
    a = [x / lead for x in a]
    den = 1
    for x in a:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in a]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return Polynomial([x // g for x in ints])


def squarefree_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm for monic p: returns [(s_i, i)] with p = prod s_i**i,
    each s_i squarefree, pairwise coprime and non-constant.

    Every division is by a monic integer polynomial, so the whole run stays
    in Z[x].
    """
    dp = p.derivative()
    a = gcd(p, dp)
    b = exact_div(p, a)
    c = exact_div(dp, a)
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        a = gcd(b, d) if d else b
        if a.degree > 0:
            out.append((a, i))
        b = exact_div(b, a)
        c = exact_div(d, a)
        d = c - b.derivative()
        i += 1
    return out


# ---------------------------------------------------------------------------
# certified complex roots


@dataclass(frozen=True)
class RootApprox:
    """A root approximation ``center`` whose disc of radius ``radius``
    contains a root; ``cluster`` counts the approximations sharing one
    inclusion component (1 for an isolated simple root)."""

    center: mpmath.mpc
    radius: mpmath.mpf
    cluster: int = 1


def _horner_with_bound(c: Sequence, z):
    acc = mpmath.mpc(0)
    mag = mpmath.mpf(0)
    az = abs(z)
    for a in reversed(c):
        acc = acc * z + a
        mag = mag * az + abs(a)
    u = mpmath.mpf(2) ** (-mpmath.mp.prec + 1)
    return acc, 2 * (len(c) + 1) * u * mag


def _components(centers, radii) -> list[list[int]]:
    n = len(centers)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _certify(c, z, bits):
    """Inclusion discs for monic c (lowest first) at approximations z.

    Returns (roots, worst) where worst <= 1 means every component meets its
    radius target.
    """
    n = len(z)
    radii = []
    for i in range(n):
        pv, err = _horner_with_bound(c, z[i])
        den = mpmath.fprod(z[i] - z[j] for j in range(n) if j != i)
        if den == 0:
            return None, mpmath.inf
        radii.append(n * (abs(pv) + err) / abs(den) * (1 + mpmath.mpf(2) ** (-bits)))
    out: list = [None] * n
    worst = mpmath.mpf(0)
    for comp in _components(z, radii):
        k = len(comp)
        if k == 1:
            i = comp[0]
            out[i] = RootApprox(z[i], radii[i], 1)
            worst = max(worst, radii[i] / mpmath.mpf(2) ** (-bits / 2))
        else:
            center = mpmath.fsum(z[i] for i in comp) / k
            rad = max(abs(z[i] - center) + radii[i] for i in comp)
            worst = max(worst, rad / mpmath.mpf(2) ** (-bits / (2 * k)))
            for i in comp:
                out[i] = RootApprox(z[i], rad, k)
    return out, worst


def complex_roots(p: Polynomial, precision_bits: int = DEFAULT_PRECISION,
                  max_iter: int = 400) -> list[RootApprox]:
    """All deg(p) complex roots, with multiplicity, as certified discs.

    Seeds are companion-matrix eigenvalues refined by Aberth-Ehrlich steps at
    ``precision_bits``.  Radii are Braess-Hadeler inclusion discs n*|W_i|
    (W_i the Weierstrass correction) inflated by the Horner rounding bound; a
    connected union of k discs holds exactly k roots.  An isolated root must
    certify to 2**(-bits/2), a cluster of k approximations (a multiple root)
    to 2**(-bits/(2k)); otherwise :class:`RootFindingError` is raised.
    """
    p = _as_poly(p)
    if p.degree < 1:
        raise PolynomialError("complex_roots needs degree >= 1")
    v = next(i for i, a in enumerate(p.coeffs) if a != 0)
    rest = Polynomial(p.coeffs[v:])
    n = rest.degree
    with mpmath.workprec(precision_bits + 16):
        zeros = [RootApprox(mpmath.mpc(0), mpmath.mpf(0), v) for _ in range(v)]
        if n == 0:
            return zeros
        lead = mpmath.mpf(rest.lead)
        c = [mpmath.mpf(a) / lead for a in rest.coeffs]
        if n == 1:
            z0 = mpmath.mpc(-c[0])
            return zeros + [RootApprox(z0, abs(z0) * mpmath.mpf(2) ** (-precision_bits), 1)]
        hi_first = c[::-1]
        dhi = [(n - i) * a for i, a in enumerate(hi_first[:-1])]
        seeds = np.roots([float(a) for a in reversed(rest.coeffs)])
        z = [mpmath.mpc(complex(s)) for s in seeds]
        for i in range(n):
            for j in range(i):
                if z[i] == z[j]:
                    z[i] += mpmath.mpc(0, 1) * mpmath.mpf(2) ** (-20) * (i + 1)
        tol = mpmath.mpf(2) ** (-precision_bits - 4)
        worst = mpmath.inf
        roots = None
        for it in range(max_iter):
            biggest = mpmath.mpf(0)
            for i in range(n):
                pv = mpmath.polyval(hi_first, z[i])
                if pv == 0:
                    continue
                dv = mpmath.polyval(dhi, z[i])
                s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i)
                if dv == 0:
                    w = mpmath.mpc(tol, tol)
                else:
                    ratio = pv / dv
                    w = ratio / (1 - ratio * s)
                z[i] -= w
                biggest = max(biggest, abs(w) / max(1, abs(z[i])))
            if biggest < tol or it % 4 == 3:
                roots, worst = _certify(c, z, precision_bits)
                if worst <= 1:
                    break
                if biggest < tol and it > 8:
                    break
        if roots is None or worst > 1:
            achieved = 0.0 if worst == mpmath.inf else float(precision_bits / 2 - mpmath.log(worst, 2))
            raise RootFindingError(achieved, precision_bits)
    return zeros + roots


def _mahler_squarefree(s: Polynomial, bits: int):
    lo = mpmath.mpf(abs(s.lead))
    hi = mpmath.mpf(abs(s.lead))
    for r in complex_roots(s, bits):
        m = abs(r.center)
        hi *= max(1, m + r.radius)
        lo *= max(1, m - r.radius)
    return lo, hi


def mahler_measure_interval(p: Polynomial, precision_bits: int = DEFAULT_PRECISION):
    """Certified enclosure (lo, hi) of M(p).  Monic inputs are split into
    squarefree parts first so that every root is simple."""
    p = _as_poly(p)
    if p.is_zero():
        raise PolynomialError("Mahler measure of the zero polynomial")
    if p.degree == 0:
        v = mpmath.mpf(abs(p.lead))
        return v, v
    parts = squarefree_decomposition(p) if p.is_monic() else [(p, 1)]
    bits = precision_bits
    while True:
        try:
            with mpmath.workprec(bits + 16):
                lo = mpmath.mpf(1)
                hi = mpmath.mpf(1)
                for s, e in parts:
                    a, b = _mahler_squarefree(s, bits)
                    lo *= a**e
                    hi *= b**e
                return lo, hi
        except RootFindingError:
            if bits >= PRECISION_CEILING:
                raise
            bits *= 2


def mahler_measure(p: Polynomial, precision_bits: int = DEFAULT_PRECISION) -> tuple[float, float]:
    """Return (M(p), error bound) as floats.

    >>> mahler_measure(Polynomial([6, -5, 1]))[0]
    6.0
    """
    lo, hi = mahler_measure_interval(p, precision_bits)
    with mpmath.workprec(precision_bits + 16):
        return float((lo + hi) / 2), float((hi - lo) / 2)


# ---------------------------------------------------------------------------
# factorization


@dataclass(frozen=True)
class FactorizationResult:
    factors: tuple[tuple[Polynomial, int], ...]

    def expand(self) -> Polynomial:
        out = Polynomial([1])
        for f, e in self.factors:
            for _ in range(e):
                out = out * f
        return out

    @property
    def is_irreducible(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    def flat(self) -> list[Polynomial]:
        """Factors repeated by multiplicity."""
        return [f for f, e in self.factors for _ in range(e)]


@lru_cache(maxsize=8192)
def divisors(n: int) -> tuple[int, ...]:
    """Positive divisors of |n| in increasing order."""
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return tuple(small + large[::-1])


def _eval_int(c: tuple[int, ...], x: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _synthetic_div(c: tuple[int, ...], r: int) -> tuple[int, ...]:
    out = [0] * (len(c) - 1)
    acc = 0
    for i in range(len(c) - 1, 0, -1):
        acc = acc * r + c[i]
        out[i - 1] = acc
    return tuple(out)


def _strip_rational_roots(c: tuple[int, ...]) -> tuple[list[tuple[int, int]], tuple[int, ...]]:
    found = []
    v = 0
    while v < len(c) - 1 and c[v] == 0:
        v += 1
    if v:
        found.append((0, v))
        c = c[v:]
    if len(c) <= 1:
        return found, c
    bound = 1 + max(abs(a) for a in c[:-1])
    for d in divisors(c[0]):
        if d > bound:
            break
        for r in (d, -d):
            e = 0
            while len(c) > 1 and _eval_int(c, r) == 0:
                c = _synthetic_div(c, r)
                e += 1
            if e:
                found.append((r, e))
        if len(c) <= 1:
            break
    return sorted(found), c


def rational_roots(p: Polynomial) -> list[tuple[int, int]]:
    """Rational (hence integer) roots of a monic p with multiplicities, found
    by exact evaluation at divisors of the lowest non-zero coefficient.

    >>> rational_roots(Polynomial([0, 0, -4, 0, 1]))
    [(-2, 1), (0, 2), (2, 1)]
    """
    return _strip_rational_roots(_as_poly(p).coeffs)[0]


def _esym(vals: Sequence) -> list:
    e = [1]
    for m in vals:
        e = [a + (m * e[i - 1] if i > 0 else 0) for i, a in enumerate(e)] + [m * e[-1]]
    return e


def _subset_candidate(roots: list[RootApprox], idx: Sequence[int], bits: int):
    """Round the coefficients of prod_{i in idx}(x - z_i) to integers.

    Returns the monic candidate when every coefficient enclosure contains
    exactly one integer, ``None`` when one contains no integer (the true
    product is not in Z[x], so not a factor), and raises
    :class:`RootFindingError` when an enclosure is too wide to decide.
    The first pass uses double precision with a rigorous rounding bound and
    falls back to mpmath at ``bits`` only when that is inconclusive.
    """
    k = len(idx)
    try:
        zs = [complex(roots[i].center) for i in idx]
        rs = [float(roots[i].radius) + abs(z) * 2.0**-52 for i, z in zip(idx, zs)]
        prod = _esym([-z for z in zs])
        upper = _esym([abs(z) + r for z, r in zip(zs, rs)])
        base = _esym([abs(z) for z in zs])
        slack = [(upper[j] - base[j]) * (1 + 1e-9) + 8 * (k + 2) * 2.0**-52 * upper[j] for j in range(k + 1)]
        return _round_candidate(prod, slack, bits)
    except RootFindingError:
        pass
    with mpmath.workprec(bits + 16):
        zs = [roots[i].center for i in idx]
        rs = [roots[i].radius for i in idx]
        prod = _esym([-z for z in zs])
        upper = _esym([abs(z) + r for z, r in zip(zs, rs)])
        base = _esym([abs(z) for z in zs])
        u = mpmath.mpf(2) ** (-bits)
        slack = [(upper[j] - base[j]) + 8 * (k + 2) * u * upper[j] for j in range(k + 1)]
        return _round_candidate(prod, slack, bits)


def _round_candidate(prod, slack, bits):
    # prod[j] = (-1)^j e_j(z) is the coefficient of x^(k-j)
    k = len(prod) - 1
    coeffs = []
    for j in range(1, k + 1):
        val, err = prod[j], slack[j]
        if abs(val.imag) > err:
            return None
        lo, hi = val.real - err, val.real + err
        ilo, ihi = math.ceil(lo), math.floor(hi)
        if ilo > ihi:
            return None
        if ilo != ihi:
            raise RootFindingError(float(-mpmath.log(err + 1e-300, 2)), bits)
        coeffs.append(int(ilo))
    return Polynomial(coeffs[::-1] + [1])


def _split_squarefree(p: Polynomial, bits: int) -> list[Polynomial]:
    """Irreducible factors of a squarefree monic p without rational roots.

    Subsets of the numeric roots are tried by increasing size, so the first
    exact divisor found has minimal degree and is irreducible.
    """
    n = p.degree
    if n <= 3:
        return [p]
    roots = complex_roots(p, bits)
    for size in range(2, n // 2 + 1):
        for idx in itertools.combinations(range(n), size):
            cand = _subset_candidate(roots, idx, bits)
            if cand is None:
                continue
            try:
                q = exact_div(p, cand)
            except NotADivisorError:
                continue
            return [cand] + _split_squarefree(q, bits)
    return [p]


def factor(p: Polynomial, precision_bits: int = DEFAULT_PRECISION,
           precision_ceiling: int = PRECISION_CEILING) -> FactorizationResult:
    """Factor a monic integer polynomial into monic irreducibles over Q.

    Factors are sorted by (degree, coefficient vector lowest first).  Every
    reported factor is verified by exact division, and the product is checked
    against the input before returning.

    >>> factor(Polynomial([-4, 0, 0, 0, 1])).factors
    ((Polynomial(x^2 - 2), 1), (Polynomial(x^2 + 2), 1))
    """
    p = _as_poly(p)
    if p.degree < 1:
        raise PolynomialError("factor needs degree >= 1")
    if not p.is_monic():
        raise PolynomialError("factor needs a monic polynomial")
    found: dict[Polynomial, int] = {}
    roots, rest = _strip_rational_roots(p.coeffs)
    for r, e in roots:
        found[Polynomial((-r, 1))] = e
    if len(rest) > 4:
        for s, e in squarefree_decomposition(Polynomial(rest)):
            bits = precision_bits
            while True:
                try:
                    parts = _split_squarefree(s, bits)
                    break
                except RootFindingError:
                    bits *= 2
                    if bits > precision_ceiling:
                        raise FactorizationError(p) from None
            for f in parts:
                found[f] = found.get(f, 0) + e
    elif len(rest) > 1:
        # degree 2 or 3 with no rational root is irreducible
        found[Polynomial(rest)] = 1
    res = FactorizationResult(tuple(sorted(found.items(), key=lambda fe: (fe[0].degree, fe[0].coeffs))))
    if len(rest) > 4 and res.expand() != p:
        raise FactorizationError(p, "factorization failed verification")
    return res
