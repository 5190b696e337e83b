"""Entanglement rate of pure states as exact fractions.

A factor of ``s`` entangled sites contributes the fraction of all site pairs
it contains, ``s(s-1) / (n(n-1))``; the total rate sums over the factors of
the finest tensor factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .separability import PURITY_TOL, Factorization, finest_factorization
from .states import PureState, reduced_purity

SEPARABLE = "separable"
PARTIAL = "partial"
MAXIMAL = "maximal"


def pair_count(s: int) -> int:
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s}")
    return s * (s - 1) // 2


def factor_rate(s: int, n: int) -> Fraction:
    if not 2 <= s <= n:
        raise ValueError(f"need 2 <= s <= n, got s={s}, n={n}")
    return Fraction(pair_count(s), pair_count(n))


@dataclass(frozen=True)
class FactorRate:
    sites: tuple[int, ...]
    rate: Fraction
    plausibly_maximal: bool | None  # None for singletons

    @property
    def s(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class RateReport:
    n: int
    per_factor: tuple[FactorRate, ...]
    e_total: Fraction

    @property
    def classification(self) -> str:
        if self.e_total == 0:
            return SEPARABLE
        return MAXIMAL if self.e_total == 1 else PARTIAL

    @property
    def measure_caveat(self) -> bool:
        """Set when some entangled factor fails the maximal-entanglement heuristic."""
        return any(f.plausibly_maximal is False for f in self.per_factor)

    @property
    def value(self) -> float:
        return float(self.e_total)


def plausibly_maximal(psi: PureState, sites, tol: float = PURITY_TOL) -> bool:
    """Heuristic: every single site of the factor is maximally mixed.

    Necessary, not sufficient, for the factor to be maximally entangled.
    """
    return all(abs(reduced_purity(psi, (i,)) - 1.0 / psi.dims[i]) <= tol for i in sites)


def rate_from_factorization(psi: PureState, fac: Factorization, tol: float = PURITY_TOL) -> RateReport:
    n = fac.n
    per_factor = []
    total = Fraction(0)
    for f in fac.factors:
        sites = f.sites.members
        if f.size < 2:
            per_factor.append(FactorRate(sites, Fraction(0), None))
            continue
        r = factor_rate(f.size, n)
        total += r
        per_factor.append(FactorRate(sites, r, plausibly_maximal(psi, sites, tol)))
    return RateReport(n, tuple(per_factor), total)


def total_rate(psi: PureState, tol: float = PURITY_TOL, workers: int = 1) -> RateReport:
    return rate_from_factorization(psi, finest_factorization(psi, tol, workers), tol)
