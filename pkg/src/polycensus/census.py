"""Exact census of monic degree-n polynomials of height <= H with a root in K.

Two independent pipelines produce the same :class:`CensusReport`:

* ``census_bruteforce`` scans the whole box and factors every polynomial;
* ``census_constructive`` builds the members as products m*Q, where m runs
  over minimal polynomials of algebraic integers of K with bounded house.

Both split work into independent tasks whose results are merged by
order-independent operations (addition, minimum), so any worker count
gives the same report.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .numfield import (
    DEFAULT_BOX_LIMIT,
    FieldDescriptor,
    FieldElement,
    box_points,
    has_root_in_field,
    min_poly,
)
from .polyz import Polynomial, factor, height, landau_mignotte_holds

SCHEMA_VERSION = 1
CSV_COLUMNS = ("field_label", "n", "H", "box_size", "red_count", "irr_count",
               "rational_root_count", "zero_constant_count", "pipeline", "elapsed_seconds")
DEFAULT_CENSUS_LIMIT = 20_000_000
DEFAULT_SET_LIMIT = 20_000_000


class ResourceLimitError(RuntimeError):
    pass


class NotMonogenicError(ValueError):
    pass


@dataclass
class CensusReport:
    field_label: str
    n: int
    H: int
    box_size: int
    red_count: int
    irr_count: int
    rational_root_count: int
    zero_constant_count: int
    pipeline: str
    elapsed_seconds: float = 0.0
    # members per minimal witnessing degree d (smallest degree of a factor with a root in K)
    witness_degrees: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.red_count + self.irr_count

    def counts(self) -> tuple[int, int, int, int, int]:
        return (self.box_size, self.red_count, self.irr_count,
                self.rational_root_count, self.zero_constant_count)

    def same_counts(self, other: "CensusReport") -> bool:
        return (self.field_label, self.n, self.H) == (other.field_label, other.n, other.H) \
            and self.counts() == other.counts() and self.witness_degrees == other.witness_degrees

    def csv_values(self, timing: bool = False) -> list:
        return [self.field_label, self.n, self.H, self.box_size, self.red_count, self.irr_count,
                self.rational_root_count, self.zero_constant_count, self.pipeline,
                f"{self.elapsed_seconds:.3f}" if timing else ""]

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        d["witness_degrees"] = {str(k): v for k, v in sorted(self.witness_degrees.items())}
        if not timing:
            d["elapsed_seconds"] = None
        d["schema"] = SCHEMA_VERSION
        return d


def reports_to_csv(reports, timing: bool = False) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.csv_values(timing))
    return buf.getvalue()


def reports_to_json(reports, timing: bool = False) -> str:
    return json.dumps([r.to_dict(timing) for r in reports], indent=2, sort_keys=True) + "\n"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("POLYCENSUS_WORKERS", "1")))
    except ValueError:
        return 1


def _check_inputs(K: FieldDescriptor, n: int, H: int, allow_non_monogenic: bool, limit: int) -> int:
    if n < 2:
        raise ValueError("n must be >= 2")
    if H < 1:
        raise ValueError("H must be >= 1")
    if not K.monogenic and not allow_non_monogenic:
        raise NotMonogenicError(f"{K.label}: basis not known to span O_K; census would undercount")
    box = (2 * H + 1) ** n
    if box > limit:
        raise ResourceLimitError(f"box size {box} exceeds limit {limit}")
    return box


def _map(func, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# ---------------------------------------------------------------------------
# membership of a single polynomial


def classify(K: FieldDescriptor, p: Polynomial) -> tuple[bool, bool, bool, int]:
    """(member, reducible, has_rational_root, minimal witnessing degree).

    The witnessing degree is 0 for non-members.
    """
    f = factor(p)
    D = K.degree
    witness = 0
    for g, _ in f.factors:  # sorted by degree, so the first hit is minimal
        d = g.degree
        if D % d == 0 and has_root_in_field(K, g):
            witness = d
            break
    if not witness:
        return False, False, False, 0
    reducible = not f.is_irreducible
    rational = f.factors[0][0].degree == 1
    return True, reducible, rational, witness


def _brute_slab(args):
    K, n, H, top, collect = args
    red = irr = rat = zero = 0
    wd: dict[int, int] = {}
    members = []
    rng = range(-H, H + 1)
    for low in itertools.product(rng, repeat=n - 1):
        coeffs = low + (top, 1)
        member, reducible, rational, w = classify(K, Polynomial(coeffs))
        if not member:
            continue
        if reducible:
            red += 1
        else:
            irr += 1
        rat += rational
        zero += coeffs[0] == 0
        wd[w] = wd.get(w, 0) + 1
        if collect:
            members.append(coeffs[:-1])
    return red, irr, rat, zero, wd, members


def census_bruteforce(K: FieldDescriptor, n: int, H: int, workers: int = 1,
                      box_limit: int = DEFAULT_CENSUS_LIMIT, allow_non_monogenic: bool = False,
                      collect_members: bool = False):
    """Scan every (a_0, ..., a_{n-1}) in [-H, H]^n and classify it.

    Work is split by the value of a_{n-1}.  With ``collect_members`` the
    return value is (report, sorted member coefficient tuples).
    """
    t0 = time.perf_counter()
    box = _check_inputs(K, n, H, allow_non_monogenic, box_limit)
    tasks = [(K, n, H, top, collect_members) for top in range(-H, H + 1)]
    parts = _map(_brute_slab, tasks, workers)
    red = irr = rat = zero = 0
    wd: dict[int, int] = {}
    members = []
    for r, i, q, z, w, mem in parts:
        red += r
        irr += i
        rat += q
        zero += z
        for k, v in w.items():
            wd[k] = wd.get(k, 0) + v
        members.extend(mem)
    rep = CensusReport(K.label, n, H, box, red, irr, rat, zero, "bruteforce",
                       time.perf_counter() - t0, dict(sorted(wd.items())))
    if collect_members:
        return rep, sorted(members)
    return rep


# ---------------------------------------------------------------------------
# constructive pipeline


def _perfect_power_mask(N: np.ndarray, e: int, H: int) -> np.ndarray:
    if e == 1:
        return N <= H
    r = np.rint(np.power(N.astype(float), 1.0 / e)).astype(np.int64)
    ok = np.zeros(N.shape, dtype=bool)
    for dr in (-1, 0, 1):
        rr = r + dr
        ok |= (rr >= 0) & (rr <= H) & (rr**e == N)
    return ok


def candidate_roots(K: FieldDescriptor, H: int, box_limit: int = DEFAULT_BOX_LIMIT) -> list[FieldElement]:
    """Algebraic integers of house <= 1 + H that can be a root of a member.

    For alpha != 0 a root of P in the box, m_alpha(0) divides the lowest
    non-zero coefficient of P, so |m_alpha(0)| <= H and
    |N_K(alpha)| = |m_alpha(0)|^(D/deg m) is a perfect power of an integer
    <= H.  That test is applied to a numeric norm as a prefilter (ambiguous
    cases are kept); the exact check happens on the minimal polynomial.
    """
    D = K.degree
    exps = [e for e in range(1, D + 1) if D % e == 0]

    def norm_filter(pts, sig, err):
        prod = np.prod(sig, axis=1)
        mags = np.prod(np.abs(sig) + err, axis=1)
        slack = mags - np.prod(np.abs(sig), axis=1) + 1e-9 * mags + 1e-9
        N = np.rint(np.abs(prod.real)).astype(np.int64)
        sure = np.abs(np.abs(prod.real) - N) + np.abs(prod.imag) < np.minimum(slack, 0.25)
        ok = np.zeros(len(N), dtype=bool)
        for e in exps:
            ok |= _perfect_power_mask(N, e, H)
        return ok | ~sure | (N == 0)

    pts = box_points(K, 1 + H, box_limit, norm_filter)
    return [FieldElement(map(int, row)) for row in pts]


def minimal_polynomial_inventory(K: FieldDescriptor, n: int, H: int,
                                 box_limit: int = DEFAULT_BOX_LIMIT) -> list[Polynomial]:
    """Distinct minimal polynomials (degree <= n) of algebraic integers of K
    with house <= 1 + H, restricted by the exact prunes |m(0)| <= H and
    H(m) <= C_n H (all-coefficients heights; Landau-Mignotte)."""
    seen = set()
    for a in candidate_roots(K, H, box_limit):
        m = min_poly(K, a)
        if m.degree > n or m in seen:
            continue
        if abs(m.coeffs[0]) > H:
            continue
        if not landau_mignotte_holds(height(m, all_coeffs=True), 1, H, n):
            continue
        seen.add(m)
    return sorted(seen, key=lambda m: (m.degree, m.coeffs))


def _cofactor_products(mc: tuple[int, ...], n: int, H: int):
    """Yield (P coefficients without the leading 1, Q coefficients) for all
    monic Q of degree n - d with m*Q in the box.

    Q is chosen from the top coefficient down: the coefficient of x^(j+d) in
    m*Q is q_j plus already-fixed terms, which pins q_j to an interval of
    length 2H+1.  The Landau-Mignotte bound |q_j| <= C_n H / H(m) and
    |q_0| <= H / |m_0| further narrow the range; the low coefficients of the
    product are checked exactly at the end.
    """
    d = len(mc) - 1
    e = n - d
    hm = max(abs(c) for c in mc)
    # B = floor(C_n H / hm) computed exactly
    B = math.isqrt(4**n * (n + 1) * H * H // (hm * hm))
    q = [0] * e + [1]

    def rec(j):
        if j < 0:
            low = []
            for i in range(d):
                s = 0
                for l in range(max(0, i - e), i + 1):
                    s += mc[l] * q[i - l]
                if s > H or s < -H:
                    return
                low.append(s)
            high = []
            for i in range(d, n):
                s = 0
                for l in range(max(0, i - e), min(d, i) + 1):
                    s += mc[l] * q[i - l]
                high.append(s)
            yield tuple(low + high), tuple(q)
            return
        s = 0
        for l in range(d):
            k = j + d - l
            if k <= e:
                s += mc[l] * q[k]
        lo, hi = max(-H - s, -B), min(H - s, B)
        if j == 0 and mc[0] != 0:
            c = H // abs(mc[0])
            lo, hi = max(lo, -c), min(hi, c)
        for v in range(lo, hi + 1):
            q[j] = v
            yield from rec(j - 1)
        q[j] = 0

    yield from rec(e - 1)


def constructive_pairs(K: FieldDescriptor, n: int, H: int):
    """Every admitted (m, Q) pair with d = deg m < n, as Polynomials."""
    for m in minimal_polynomial_inventory(K, n, H):
        if m.degree < n:
            for _, qc in _cofactor_products(m.coeffs, n, H):
                yield m, Polynomial(qc)


def _constructive_chunk(args):
    ms, n, H = args
    out: dict[tuple, int] = {}
    for mc in ms:
        d = len(mc) - 1
        if d == n:
            if max(abs(c) for c in mc[:-1]) <= H:
                key = mc[:-1]
                if out.get(key, n + 1) > d:
                    out[key] = d
            continue
        for key, _ in _cofactor_products(mc, n, H):
            if out.get(key, n + 1) > d:
                out[key] = d
    return out


def constructive_members(K: FieldDescriptor, n: int, H: int, workers: int = 1,
                         box_limit: int = DEFAULT_BOX_LIMIT,
                         set_limit: int = DEFAULT_SET_LIMIT) -> dict[tuple, int]:
    """Map from member coefficient tuples (a_0..a_{n-1}) to the minimal
    degree of a minimal polynomial m with m | P."""
    inv = [m.coeffs for m in minimal_polynomial_inventory(K, n, H, box_limit)]
    k = max(1, workers * 4)
    tasks = [(inv[i::k], n, H) for i in range(k)]
    merged: dict[tuple, int] = {}
    for part in _map(_constructive_chunk, tasks, workers):
        for key, d in part.items():
            if merged.get(key, n + 1) > d:
                merged[key] = d
        if len(merged) > set_limit:
            raise ResourceLimitError(f"member set exceeds {set_limit} entries")
    return merged


def census_constructive(K: FieldDescriptor, n: int, H: int, workers: int = 1,
                        box_limit: int = DEFAULT_CENSUS_LIMIT, allow_non_monogenic: bool = False,
                        collect_members: bool = False):
    t0 = time.perf_counter()
    box = _check_inputs(K, n, H, allow_non_monogenic, box_limit)
    members = constructive_members(K, n, H, workers)
    red = irr = rat = zero = 0
    wd: dict[int, int] = {}
    for key, d in members.items():
        if d < n:
            red += 1
        else:
            irr += 1
        rat += d == 1
        zero += key[0] == 0
        wd[d] = wd.get(d, 0) + 1
    rep = CensusReport(K.label, n, H, box, red, irr, rat, zero, "constructive",
                       time.perf_counter() - t0, dict(sorted(wd.items())))
    if collect_members:
        return rep, sorted(members)
    return rep


def run_census(K: FieldDescriptor, n: int, H: int, pipeline: str = "constructive", **kw) -> CensusReport:
    if pipeline == "bruteforce":
        return census_bruteforce(K, n, H, **kw)
    if pipeline == "constructive":
        return census_constructive(K, n, H, **kw)
    raise ValueError(f"unknown pipeline {pipeline!r}")


# ---------------------------------------------------------------------------
# statistics


def dominance_stats(K: FieldDescriptor, n: int, H: int, report: CensusReport | None = None,
                    **kw) -> tuple[float, dict[int, int]]:
    """(fraction of members with a rational root, members per minimal
    witnessing degree d for d = 1..min(n-1, D) and d = n)."""
    if report is None:
        report = census_constructive(K, n, H, **kw)
    total = report.total
    frac = report.rational_root_count / total if total else 0.0
    degrees = list(range(1, min(n - 1, K.degree) + 1))
    if n not in degrees:
        degrees.append(n)
    return frac, {d: report.witness_degrees.get(d, 0) for d in degrees}


RATE_COLUMNS = ("H", "total", "density", "density_x_H", "density_x_H_over_logH",
                "red_over_H^(n-1)", "irr_over_H_logH^(n-1)")


def rate_table(reports: list[CensusReport]) -> list[tuple]:
    """Rows (H, total, total/box, density*H, density*H/log H,
    red/H^(n-1), irr/(H (log H)^(n-1))) for a ladder of heights."""
    if len(reports) < 2:
        raise ValueError("rate_table needs at least two reports")
    if len({(r.field_label, r.n) for r in reports}) != 1:
        raise ValueError("rate_table needs reports for one (K, n)")
    rows = []
    for r in sorted(reports, key=lambda r: r.H):
        n, H = r.n, r.H
        dens = r.total / r.box_size
        lg = math.log(H)
        rows.append((
            H, r.total, dens, dens * H,
            dens * H / lg if lg > 0 else math.nan,
            r.red_count / H ** (n - 1),
            r.irr_count / (H * lg ** (n - 1)) if lg > 0 else math.nan,
        ))
    return rows
