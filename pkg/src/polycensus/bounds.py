"""Explicit upper bounds for the reducible and irreducible parts of the count,
plus the asymptotic classes they predict.

All floors involving C_n = 2^n sqrt(n+1) are computed with exact integer
square roots of C_n^2 H^2 = 4^n (n+1) H^2, so every value of the reducible
bound is a platform-independent integer.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

from .census import CensusReport


class BoundViolation(AssertionError):
    pass


def cn_times(n: int, H: int) -> int:
    """floor(C_n * H) as an exact integer."""
    return math.isqrt(4**n * (n + 1) * H * H)


def cn_over_k(n: int, H: int, k: int) -> int:
    """floor(C_n * H / k) as an exact integer."""
    return math.isqrt(4**n * (n + 1) * H * H // (k * k))


def _red_terms(n: int, H: int, D: int, ks):
    total = 0
    for d in range(1, min(n - 1, D) + 1):
        for k in ks:
            total += ((2 * k + 1) ** d - (2 * k - 1) ** d) * (2 * cn_over_k(n, H, k) + 1) ** (n - d)
    return total


def red_bound_cor2(n: int, H: int, D: int, descending: bool = False) -> tuple[int, int]:
    """(main double sum, height-0 correction).

    The main sum runs over d = 1..min(n-1, D) and k = 1..floor(C_n H) of
    [(2k+1)^d - (2k-1)^d] (2 floor(C_n H / k) + 1)^(n-d).  It skips the
    factors m = x^d of height 0; the correction sum_d (2H+1)^(n-d) counts the
    box members they produce, so the two together bound every reducible
    member including those with a_0 = 0.

    >>> red_bound_cor2(2, 1, 2)
    (68, 3)
    """
    if n < 2 or H < 1 or D < 1:
        raise ValueError("need n >= 2, H >= 1, D >= 1")
    top = cn_times(n, H)
    ks = range(top, 0, -1) if descending else range(1, top + 1)
    main = _red_terms(n, H, D, ks)
    corr = sum((2 * H + 1) ** (n - d) for d in range(1, min(n - 1, D) + 1))
    return main, corr


@dataclass(frozen=True)
class SubfieldInputs:
    """Data for one subfield F of degree n.

    ``volume`` None means the modeled volume (2 log 2H)^rank is used.
    """

    kappa: float
    w: int
    regulator: float
    rank: int = 0
    C1: float = 0.0
    C2: float = 0.0
    volume: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.kappa <= 0 or self.w <= 0 or self.regulator <= 0:
            raise ValueError("kappa, w and regulator must be positive")
        if self.C1 < 0 or self.C2 < 0 or self.rank < 0:
            raise ValueError("C1, C2 and rank must be non-negative")
        if self.volume is not None and self.volume <= 0:
            raise ValueError("volume must be positive")


def modeled_volume(rank: int, H: int) -> float:
    return (2.0 * math.log(2 * H)) ** rank


def irr_bound_cor3(subfields: list[SubfieldInputs], n: int, H: int) -> tuple[float, bool, bool]:
    """(value, any volume modeled, empty subfield list).

    value = sum_F (kappa_F H + C1_F H^(1-1/n)) ((w_F / R_F) Vol_F + C2_F).
    """
    if n < 1 or H < 1:
        raise ValueError("need n >= 1, H >= 1")
    if not subfields:
        warnings.warn("no subfield of degree n: irreducible bound is 0", stacklevel=2)
        return 0.0, False, True
    total = 0.0
    modeled = False
    for F in subfields:
        vol = F.volume
        if vol is None:
            vol = modeled_volume(F.rank, H)
            modeled = True
        total += (F.kappa * H + F.C1 * H ** (1 - 1 / n)) * (F.w / F.regulator * vol + F.C2)
    return total, modeled, False


def subfield_inputs_for(K, C1: float = 0.0, C2: float = 0.0, volume: float | None = None) -> SubfieldInputs:
    """Inputs for F = K itself from the lattice module's invariants."""
    from .lattice import kappa, unit_group, zeta_inputs

    z = zeta_inputs(K)
    U = unit_group(K)
    # rank 0: the regulator is 1 by convention, and the modeled volume is 1
    return SubfieldInputs(kappa=kappa(z), w=z.w, regulator=z.regulator, rank=U.rank,
                          C1=C1, C2=C2, volume=volume, label=K.label)


@dataclass(frozen=True)
class AsymptoticClass:
    kind: str  # "HlogH" or "Hpow"
    exponent: int

    def __str__(self):
        return "H log H" if self.kind == "HlogH" else f"H^{self.exponent}"


def predicted_class(n: int, D: int) -> AsymptoticClass:
    """H log H for n = 2; otherwise H^(n-1) when D >= n-1 and H^(n-D) when
    D < n-1.

    >>> str(predicted_class(5, 2))
    'H^3'
    """
    if n < 2 or D < 1:
        raise ValueError("need n >= 2, D >= 1")
    if n == 2:
        return AsymptoticClass("HlogH", 1)
    return AsymptoticClass("Hpow", n - 1 if D >= n - 1 else n - D)


@dataclass(frozen=True)
class TrichotomyTerm:
    p: int
    regime: str  # convergent, harmonic, polynomial
    exponent: int
    log: bool


def trichotomy_term(n: int, d: int) -> TrichotomyTerm:
    """Order of the degree-d part H^(n-d) sum_k k^(2d-n-1) of the reducible
    count.  The resulting exponent is always max(d, n-d); the log factor
    appears only in the harmonic regime."""
    if not 1 <= d <= n - 1:
        raise ValueError(f"d must lie in 1..{n - 1}")
    p = 2 * d - n - 1
    if p < -1:
        return TrichotomyTerm(p, "convergent", n - d, False)
    if p == -1:
        return TrichotomyTerm(p, "harmonic", n - d, True)
    return TrichotomyTerm(p, "polynomial", d, False)


@dataclass
class BoundReport:
    n: int
    H: int
    D: int
    cor2_value: int
    cor2_zero_height_correction: int
    predicted_class: str
    predicted_exponent: int
    cor3_value: float | None = None
    cor3_volume_modeled: bool = False
    cor3_empty: bool = False
    comparison: dict | None = field(default=None)

    @property
    def red_total(self) -> int:
        return self.cor2_value + self.cor2_zero_height_correction

    def to_json(self) -> str:
        d = asdict(self)
        d["cor2_value"] = str(self.cor2_value)
        d["cor2_zero_height_correction"] = str(self.cor2_zero_height_correction)
        d["schema"] = 1
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def bound_report(n: int, H: int, D: int, subfields: list[SubfieldInputs] | None = None) -> BoundReport:
    main, corr = red_bound_cor2(n, H, D)
    cls = predicted_class(n, D)
    rep = BoundReport(n, H, D, main, corr, cls.kind, cls.exponent)
    if subfields is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep.cor3_value, rep.cor3_volume_modeled, rep.cor3_empty = irr_bound_cor3(subfields, n, H)
    return rep


def compare(rep: BoundReport, census: CensusReport) -> dict:
    """Attach slack ratios bound / exact.  Raises if a bound fails to bound."""
    if (census.n, census.H) != (rep.n, rep.H):
        raise ValueError("census and bound configurations differ")
    out = {"census_total": census.total, "red_count": census.red_count, "irr_count": census.irr_count}
    out["red_slack"] = rep.red_total / census.red_count if census.red_count else math.inf
    if rep.red_total < census.red_count:
        raise BoundViolation(f"reducible bound {rep.red_total} < exact {census.red_count}")
    if rep.cor3_value is not None:
        out["irr_slack"] = rep.cor3_value / census.irr_count if census.irr_count else math.inf
        if rep.cor3_value < census.irr_count:
            raise BoundViolation(f"irreducible bound {rep.cor3_value} < exact {census.irr_count}")
    rep.comparison = out
    return out
