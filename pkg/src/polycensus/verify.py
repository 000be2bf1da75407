"""Seeded randomized checks of the height inequalities.

The corpus mixes uniformly random monic polynomials with products of random
monic factors (so that non-trivial factorizations are well represented).
Heights here use the all-coefficients convention, under which both
inequalities hold for every monic integer polynomial.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .polyz import Polynomial, factor, height, landau_mignotte_holds, mahler_measure


def random_monic(rng: random.Random, max_degree: int = 6, max_height: int = 50) -> Polynomial:
    """Uniform coefficients for half the draws, products of small random
    factors for the other half (rejecting products above max_height)."""
    n = rng.randint(1, max_degree)
    if rng.random() < 0.5 or n == 1:
        return Polynomial([rng.randint(-max_height, max_height) for _ in range(n)] + [1])
    while True:
        p = Polynomial((1,))
        left = n
        while left:
            d = rng.randint(1, left)
            b = rng.choice((1, 2, 3, 5))
            p = p * Polynomial([rng.randint(-b, b) for _ in range(d)] + [1])
            left -= d
        if height(p) <= max_height:
            return p


def corpus(samples: int, seed: int, max_degree: int = 6, max_height: int = 50) -> list[Polynomial]:
    rng = random.Random(seed)
    return [random_monic(rng, max_degree, max_height) for _ in range(samples)]


def two_part_groupings(p: Polynomial):
    """Yield every (m, q) with m*q = p, both monic of positive degree, built
    from sub-multisets of the irreducible factorization."""
    fs = factor(p).factors
    for exps in itertools.product(*(range(e + 1) for _, e in fs)):
        m = Polynomial((1,))
        for (g, _), k in zip(fs, exps):
            m = m * g**k
        if 0 < m.degree < p.degree:
            q = Polynomial((1,))
            for (g, e), k in zip(fs, exps):
                q = q * g ** (e - k)
            yield m, q


@dataclass
class VerifyResult:
    checked: int
    pairs: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_landau(polys) -> VerifyResult:
    pairs = 0
    bad = []
    for p in polys:
        hp = height(p, all_coeffs=True)
        for m, q in two_part_groupings(p):
            pairs += 1
            if not landau_mignotte_holds(height(m, all_coeffs=True), height(q, all_coeffs=True), hp, p.degree):
                bad.append((p, m, q))
    return VerifyResult(len(polys), pairs, bad)


def verify_mahler(polys, rel_tol: float = 1e-9) -> VerifyResult:
    bad = []
    for p in polys:
        n = p.degree
        h = height(p, all_coeffs=True)
        M, _ = mahler_measure(p)
        lower_ok = h == 0 or h * 2.0**-n <= M * (1 + rel_tol)
        upper_ok = M <= h * math.sqrt(n + 1) * (1 + rel_tol)
        if not (lower_ok and upper_ok):
            bad.append((p, M))
    return VerifyResult(len(polys), 0, bad)
