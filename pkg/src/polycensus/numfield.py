"""Number fields given by an integral basis and its multiplication table.

A field is described by a :class:`FieldDescriptor`; elements are integer
coordinate vectors over the basis.  Exact questions (products, norms,
minimal polynomials, "is this a root") are answered in integer arithmetic;
the numeric embeddings are only used to bound or prefilter enumerations.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .polyz import (
    Polynomial,
    PolynomialError,
    RootFindingError,
    cauchy_root_bound,
    complex_roots,
    exact_div,
    factor,
    gcd,
)

EMBED_BITS = 192
DEFAULT_BOX_LIMIT = 50_000_000


class FieldError(ValueError):
    pass


class EnumerationTooLarge(RuntimeError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"enumeration too large: {size} candidates > limit {limit}")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class FieldElement:
    coords: tuple[int, ...]

    def __init__(self, coords: Iterable[int]):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True, eq=False)
class FieldDescriptor:
    """K = Q(basis) with ``mul_table[i][j]`` the coordinates of b_i*b_j.

    ``embeddings[k][i]`` is sigma_k(b_i); the r1 real embeddings come first,
    then one representative of each complex pair, then the conjugates of
    those representatives in the same order.
    """

    degree: int
    mul_table: tuple
    embeddings: tuple
    signature: tuple[int, int]
    label: str
    monogenic: bool = True
    quadratic_d: int | None = None
    defining_poly: Polynomial | None = None
    zeta_inputs: dict | None = field(default=None)

    def __post_init__(self):
        r1, r2 = self.signature
        if r1 + 2 * r2 != self.degree:
            raise FieldError("signature does not match degree")
        D = self.degree
        if len(self.mul_table) != D or any(len(row) != D for row in self.mul_table):
            raise FieldError("multiplication table has wrong shape")
        for j in range(D):
            e = tuple(1 if k == j else 0 for k in range(D))
            if tuple(self.mul_table[0][j]) != e or tuple(self.mul_table[j][0]) != e:
                raise FieldError("basis element 0 is not the identity")

    def __eq__(self, other):
        return isinstance(other, FieldDescriptor) and self.label == other.label and self.mul_table == other.mul_table

    def __hash__(self):
        return hash((self.label, self.mul_table))

    @property
    def is_quadratic(self) -> bool:
        return self.quadratic_d is not None

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def one(self) -> FieldElement:
        return FieldElement([1] + [0] * (self.degree - 1))

    def element(self, *coords: int) -> FieldElement:
        if len(coords) != self.degree:
            raise FieldError(f"expected {self.degree} coordinates")
        return FieldElement(coords)

    @cached_property
    def embedding_matrix(self) -> np.ndarray:
        """V[k, i] = sigma_k(b_i) as complex128."""
        return np.array([[complex(v) for v in row] for row in self.embeddings], dtype=complex)

    @cached_property
    def coordinate_bounds(self) -> tuple[float, ...]:
        """Row sums of |V^-1|, rounded outward, computed at high precision.

        An element whose conjugates all have modulus <= B has coordinate i
        bounded by coordinate_bounds[i] * B.
        """
        with mpmath.workprec(EMBED_BITS):
            V = mpmath.matrix([[v for v in row] for row in self.embeddings])
            W = V**-1
            out = []
            for i in range(self.degree):
                s = mpmath.fsum(abs(W[i, k]) for k in range(self.degree))
                out.append(float(s * (1 + mpmath.mpf(2) ** -40)) + 1e-12)
        return tuple(out)

    def check_table(self) -> None:
        """Spot-check commutativity and associativity on all basis triples."""
        D = self.degree
        basis = [FieldElement([1 if k == i else 0 for k in range(D)]) for i in range(D)]
        for a, b in itertools.product(basis, repeat=2):
            if elem_mul(self, a, b) != elem_mul(self, b, a):
                raise FieldError("multiplication table is not commutative")
        for a, b, c in itertools.product(basis, repeat=3):
            if elem_mul(self, elem_mul(self, a, b), c) != elem_mul(self, a, elem_mul(self, b, c)):
                raise FieldError("multiplication table is not associative")


def _is_squarefree(d: int) -> bool:
    d = abs(d)
    if d == 0:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


def rational_field() -> FieldDescriptor:
    """K = Q, the degree-1 base case."""
    return FieldDescriptor(
        degree=1,
        mul_table=(((1,),),),
        embeddings=((mpmath.mpc(1),),),
        signature=(1, 0),
        label="Q",
        monogenic=True,
        defining_poly=Polynomial([0, 1]),
    )


@lru_cache(maxsize=None)
def quadratic_field(d: int) -> FieldDescriptor:
    """Q(sqrt d) with its ring of integers: basis {1, w}, w = (1+sqrt d)/2 when
    d = 1 mod 4 and w = sqrt d otherwise."""
    d = int(d)
    if d in (0, 1) or not _is_squarefree(d):
        raise FieldError(f"d = {d} is not a squarefree integer other than 0, 1")
    if d % 4 == 1:
        # w^2 = w + (d-1)/4
        table = (((1, 0), (0, 1)), ((0, 1), ((d - 1) // 4, 1)))
        poly = Polynomial([-(d - 1) // 4, -1, 1])
    else:
        table = (((1, 0), (0, 1)), ((0, 1), (d, 0)))
        poly = Polynomial([-d, 0, 1])
    with mpmath.workprec(EMBED_BITS):
        s = mpmath.sqrt(mpmath.mpf(d)) if d > 0 else mpmath.mpc(0, mpmath.sqrt(-d))
        if d % 4 == 1:
            w1, w2 = (1 + s) / 2, (1 - s) / 2
        else:
            w1, w2 = s, -s
        emb = ((mpmath.mpc(1), mpmath.mpc(w1)), (mpmath.mpc(1), mpmath.mpc(w2)))
    sig = (2, 0) if d > 0 else (0, 1)
    label = {-1: "Q(i)"}.get(d, f"Q(sqrt({d}))")
    return FieldDescriptor(2, table, emb, sig, label, True, d, poly)


def power_basis_field(f: Polynomial, monogenic: bool = True, label: str | None = None) -> FieldDescriptor:
    """K = Q[x]/(f) with basis 1, t, ..., t^(D-1).

    Z[t] may be a proper suborder of O_K; ``monogenic`` records the caller's
    assertion that it is not.
    """
    f = f if isinstance(f, Polynomial) else Polynomial(f)
    if f.degree < 2 or not f.is_monic():
        raise FieldError("power-basis field needs a monic polynomial of degree >= 2")
    if not factor(f).is_irreducible:
        raise FieldError(f"{f} is reducible")
    D = f.degree
    # t^k for k < 2D-1 reduced mod f
    powers = []
    for k in range(2 * D - 1):
        c = [0] * D
        if k < D:
            c[k] = 1
        else:
            prev = powers[k - 1]
            top = prev[-1]
            c = [0] + list(prev[:-1])
            for i in range(D):
                c[i] -= top * f.coeffs[i]
        powers.append(tuple(c))
    table = tuple(tuple(powers[i + j] for j in range(D)) for i in range(D))
    roots = complex_roots(f, EMBED_BITS)
    with mpmath.workprec(EMBED_BITS):
        real = sorted([r.center.real for r in roots if abs(r.center.imag) <= r.radius])
        cplx = sorted([r.center for r in roots if r.center.imag > r.radius], key=lambda z: (z.real, z.imag))
        ordered = [mpmath.mpc(x) for x in real] + cplx + [mpmath.conj(z) for z in cplx]
        if len(ordered) != D:
            raise FieldError("could not separate real and complex roots")
        emb = tuple(tuple(z**i for i in range(D)) for z in ordered)
    return FieldDescriptor(D, table, emb, (len(real), len(cplx)), label or f"Q[x]/({f})",
                           bool(monogenic), None, f)


# ---------------------------------------------------------------------------
# arithmetic


def _coords(a) -> tuple[int, ...]:
    return a.coords if isinstance(a, FieldElement) else tuple(a)


def elem_add(K: FieldDescriptor, a, b) -> FieldElement:
    return FieldElement(x + y for x, y in zip(_coords(a), _coords(b)))


def elem_neg(K: FieldDescriptor, a) -> FieldElement:
    return FieldElement(-x for x in _coords(a))


def elem_sub(K: FieldDescriptor, a, b) -> FieldElement:
    return FieldElement(x - y for x, y in zip(_coords(a), _coords(b)))


def elem_mul(K: FieldDescriptor, a, b) -> FieldElement:
    """Product via the multiplication table.

    >>> K = quadratic_field(-1)
    >>> elem_mul(K, (3, 2), (3, -2))
    FieldElement(coords=(13, 0))
    """
    a, b = _coords(a), _coords(b)
    D = K.degree
    out = [0] * D
    T = K.mul_table
    for i, x in enumerate(a):
        if not x:
            continue
        row = T[i]
        for j, y in enumerate(b):
            if not y:
                continue
            xy = x * y
            for k, t in enumerate(row[j]):
                if t:
                    out[k] += xy * t
    return FieldElement(out)


def elem_pow(K: FieldDescriptor, a, e: int) -> FieldElement:
    if e < 0:
        raise FieldError("negative powers need elem_inverse")
    out = K.one()
    base = FieldElement(_coords(a))
    while e:
        if e & 1:
            out = elem_mul(K, out, base)
        base = elem_mul(K, base, base)
        e >>= 1
    return out


def mul_matrix(K: FieldDescriptor, a) -> list[list[int]]:
    """Matrix of x -> a*x; column j holds the coordinates of a*b_j."""
    D = K.degree
    cols = [elem_mul(K, a, [1 if k == j else 0 for k in range(D)]).coords for j in range(D)]
    return [[cols[j][i] for j in range(D)] for i in range(D)]


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * akk - A[i][k] * A[k][j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def norm(K: FieldDescriptor, a) -> int:
    """Signed algebraic norm, det of multiplication by a.

    >>> norm(quadratic_field(2), (1, 1))
    -1
    """
    return bareiss_det(mul_matrix(K, a))


def trace(K: FieldDescriptor, a) -> int:
    M = mul_matrix(K, a)
    return sum(M[i][i] for i in range(K.degree))


def charpoly(M: Sequence[Sequence[int]]) -> Polynomial:
    """Characteristic polynomial det(xI - M) by Faddeev-LeVerrier; every
    division is exact over Z."""
    n = len(M)
    A = [list(r) for r in M]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = [[0] * n for _ in range(n)]  # M_0 = 0
    c = 1
    for k in range(1, n + 1):
        # M_k = A*M_{k-1} + c_{n-k+1} I
        prod = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c
        Mk = prod
        AM = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(AM[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("Faddeev-LeVerrier division not exact")
        c = -tr // k
        coeffs[n - k] = c
    return Polynomial(coeffs)


def min_poly(K: FieldDescriptor, a) -> Polynomial:
    """Monic minimal polynomial over Q of a, as the squarefree part of the
    characteristic polynomial of multiplication by a.

    >>> min_poly(quadratic_field(2), (1, 1))
    Polynomial(x^2 - 2x - 1)
    """
    chi = charpoly(mul_matrix(K, a))
    g = gcd(chi, chi.derivative())
    m = exact_div(chi, g) if g.degree > 0 else chi
    d = m.degree
    if K.degree % d:
        raise ArithmeticError("degree of minimal polynomial does not divide [K:Q]")
    if m ** (K.degree // d) != chi:
        raise ArithmeticError("characteristic polynomial is not a power of the minimal polynomial")
    return m


def poly_eval_in_field(K: FieldDescriptor, m: Polynomial, a) -> FieldElement:
    acc = [0] * K.degree
    for c in reversed(m.coeffs):
        acc = list(elem_mul(K, acc, a).coords)
        acc[0] += c
    return FieldElement(acc)


# ---------------------------------------------------------------------------
# enumeration


def _float_margin(V_abs_rowmax: np.ndarray, coord_abs_sum: np.ndarray, D: int) -> np.ndarray:
    return 8 * (D + 2) * 2.0**-52 * coord_abs_sum * V_abs_rowmax + 1e-12


def box_points(K: FieldDescriptor, house_bound: float, box_limit: int = DEFAULT_BOX_LIMIT,
               extra_filter=None) -> np.ndarray:
    """Integer coordinate vectors (int64 array, lexicographic order) of the
    elements whose conjugates all have modulus <= house_bound, up to numeric
    ties which are included."""
    D = K.degree
    bounds = [int(math.floor(b * house_bound + 1e-9)) for b in K.coordinate_bounds]
    size = 1
    for b in bounds:
        size *= 2 * b + 1
    if size > box_limit:
        raise EnumerationTooLarge(size, box_limit)
    V = K.embedding_matrix
    Vabs = np.abs(V)
    chunks = []
    ranges = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    # slab over the first coordinate keeps memory bounded
    tail = np.array(list(itertools.product(*ranges[1:])), dtype=np.int64).reshape(-1, D - 1) \
        if D > 1 else np.zeros((1, 0), dtype=np.int64)
    for x0 in ranges[0]:
        pts = np.empty((tail.shape[0], D), dtype=np.int64)
        pts[:, 0] = x0
        pts[:, 1:] = tail
        f = pts.astype(float)
        sig = f @ V.T
        err = (np.abs(f) @ Vabs.T) * 8 * (D + 2) * 2.0**-52 + 1e-12
        ok = np.all(np.abs(sig) <= house_bound + err, axis=1)
        if extra_filter is not None:
            ok &= extra_filter(pts, sig, err)
        if ok.any():
            chunks.append(pts[ok])
    if not chunks:
        return np.zeros((0, D), dtype=np.int64)
    return np.concatenate(chunks)


def enumerate_integers(K: FieldDescriptor, house_bound: float, include_zero: bool = True,
                       box_limit: int = DEFAULT_BOX_LIMIT) -> list[FieldElement]:
    """All elements of the order with every |sigma(a)| <= house_bound, in
    lexicographic coordinate order.  Boundary ties are included.

    >>> len(enumerate_integers(quadratic_field(-1), 1.5))
    9
    """
    if house_bound < 1:
        raise FieldError("house_bound must be >= 1")
    pts = box_points(K, house_bound, box_limit)
    out = [FieldElement(map(int, row)) for row in pts]
    if not include_zero:
        out = [a for a in out if not a.is_zero()]
    return out


def log_embedding(K: FieldDescriptor, a, bits: int = 128) -> list[float]:
    """(log|s_1(a)|, ..., log|s_r1(a)|, 2 log|s_r1+1(a)|, ...).

    >>> [round(v, 5) for v in log_embedding(quadratic_field(-1), (1, 1))]
    [0.69315]
    """
    c = _coords(a)
    if not any(c):
        raise FieldError("log embedding of zero")
    r1, r2 = K.signature
    with mpmath.workprec(bits + 32):
        out = []
        for k in range(r1 + r2):
            s = mpmath.fsum(mpmath.mpf(x) * v for x, v in zip(c, K.embeddings[k]))
            w = 1 if k < r1 else 2
            out.append(float(w * mpmath.log(abs(s))))
    return out


def embed(K: FieldDescriptor, a, bits: int = 128) -> list:
    c = _coords(a)
    with mpmath.workprec(bits + 32):
        return [mpmath.fsum(mpmath.mpf(x) * v for x, v in zip(c, K.embeddings[k])) for k in range(K.degree)]


# ---------------------------------------------------------------------------
# root-in-field predicate


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _root_in_quadratic(d: int, m: Polynomial) -> bool:
    if m.degree == 1:
        return True
    if m.degree != 2:
        return False
    disc = m.coeffs[1] ** 2 - 4 * m.coeffs[0]
    if disc % d:
        return False
    q = disc // d
    return q != 0 and _is_square(q)


@lru_cache(maxsize=65536)
def _root_in_generic(K: FieldDescriptor, m: Polynomial, box_limit: int) -> bool:
    bound = cauchy_root_bound(m) + 1
    # every conjugate of a root of m is a root of m: when the certified
    # discs are isolated, their outer radius is a tighter house bound
    try:
        rs = complex_roots(m, 64)
        if all(r.cluster == 1 for r in rs):
            outer = max(float(abs(r.center) + r.radius) for r in rs)
            bound = min(bound, outer * (1 + 1e-9) + 1e-9)
    except RootFindingError:
        pass
    mc = np.array([float(a) for a in m.coeffs])

    def near_root(pts, sig, err):
        # prefilter: |m(sigma_0(a))| must vanish up to evaluation error
        z = sig[:, 0]
        val = np.zeros_like(z)
        mag = np.zeros(z.shape)
        az = np.abs(z) + err[:, 0]
        for a in mc[::-1]:
            val = val * z + a
            mag = mag * az + abs(a)
        # generous slack: covers rounding and the error in z itself
        return np.abs(val) <= mag * 1e-6 + 1e-9

    pts = box_points(K, bound, box_limit, near_root)
    for row in pts:
        a = FieldElement(map(int, row))
        if poly_eval_in_field(K, m, a).is_zero():
            return True
    return False


def has_root_in_field(K: FieldDescriptor, m: Polynomial, strategy: str | None = None,
                      box_limit: int = DEFAULT_BOX_LIMIT) -> bool:
    """Whether the monic irreducible m has a root in K.

    Strategy "A" (quadratic and rational fields) reads the answer off the
    discriminant; strategy "B" searches the order for an exact root among
    elements of house <= cauchy_root_bound(m) + 1.
    """
    m = m if isinstance(m, Polynomial) else Polynomial(m)
    if m.degree < 1:
        raise PolynomialError("constant polynomial")
    if m.degree == 1:
        return True
    if K.degree % m.degree:
        return False
    if strategy is None:
        strategy = "A" if (K.is_quadratic or K.is_rational) else "B"
    if strategy == "A":
        if K.is_rational:
            return False
        if not K.is_quadratic:
            raise FieldError("strategy A needs a quadratic field")
        return _root_in_quadratic(K.quadratic_d, m)
    return _root_in_generic(K, m, box_limit)


# ---------------------------------------------------------------------------
# configuration


def field_from_config(cfg: dict, base_dir: Path | None = None) -> FieldDescriptor:
    """Build a field from {"kind": "quadratic", "d": ...} or
    {"kind": "power-basis", "f": [...], "monogenic": bool}; an optional
    "zeta_inputs" table is attached verbatim."""
    kind = cfg.get("kind")
    if kind == "quadratic":
        K = quadratic_field(int(cfg["d"]))
    elif kind == "rational":
        K = rational_field()
    elif kind == "power-basis":
        f = Polynomial(int(x) for x in cfg["f"])
        K = power_basis_field(f, bool(cfg.get("monogenic", False)), cfg.get("label"))
    else:
        raise FieldError(f"unknown field kind {kind!r}")
    if "zeta_inputs" in cfg:
        K = FieldDescriptor(K.degree, K.mul_table, K.embeddings, K.signature, K.label, K.monogenic,
                            K.quadratic_d, K.defining_poly, dict(cfg["zeta_inputs"]))
    return K


def load_field_config(path: str | Path) -> FieldDescriptor:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        cfg = tomllib.loads(text)
    else:
        cfg = json.loads(text)
    return field_from_config(cfg, path.parent)


def parse_field_spec(spec: str) -> FieldDescriptor:
    """"rational", "quad:<d>", "powbasis:<config file>" or a config path."""
    if spec in ("rational", "Q"):
        return rational_field()
    if spec.startswith("quad:"):
        try:
            d = int(spec[5:])
        except ValueError:
            raise FieldError(f"bad quadratic field spec {spec!r}") from None
        return quadratic_field(d)
    if spec.startswith("powbasis:"):
        return load_field_config(spec[len("powbasis:"):])
    if Path(spec).exists():
        return load_field_config(spec)
    raise FieldError(f"unrecognised field spec {spec!r}")
