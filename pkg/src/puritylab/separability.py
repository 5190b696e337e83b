"""Purity numbers, separability verdicts and tensor factorizations.

The purity number ``gamma_s`` of an n-site state counts the size-``s`` site
subsets whose reduced state is pure.  For pure states it reaches
``C(n, s)`` for every ``s`` exactly when the state is a full product, and is
zero for every ``s`` exactly when no subset splits off.  Mixed states get
the sequential trace-out count, which yields the number of sites living in
pure sub-states (``n_p``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .states import (
    DensityMatrix,
    PureState,
    SiteSubset,
    State,
    as_density,
    partial_trace,
    reduced_purity,
    subsets_of_size,
)

PURITY_TOL = 1e-9

# Cross-check gamma_1-based verdicts against the full profile (tests turn this on).
CROSS_CHECK = os.environ.get("PURITYLAB_CROSS_CHECK", "") not in ("", "0")

SEPARABLE = "SEPARABLE"
ENTANGLEMENT_PRESENT = "ENTANGLEMENT-PRESENT"

ENTANGLEMENT_DETECTED = "entanglement-detected"
NECESSARY_CONDITION_PASSED = "necessary-condition-passed"
INCONCLUSIVE = "inconclusive-no-pure-substates"


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    # per-item predicate, results kept in input order, so worker count cannot change the outcome
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def is_pure_subset(state: State, subset, tol: float = PURITY_TOL) -> bool:
    return reduced_purity(state, subset) >= 1.0 - tol


def gamma_max_pure(n: int, s: int) -> int:
    """Binomial coefficient C(n, s) by the multiplicative recurrence."""
    if not 0 <= s <= n:
        raise ValueError(f"need 0 <= s <= n, got n={n}, s={s}")
    s = min(s, n - s)
    out = 1
    for k in range(1, s + 1):
        out = out * (n - s + k) // k
    return out


def gamma(state: State, s: int, tol: float = PURITY_TOL, workers: int = 1) -> int:
    """Number of size-``s`` subsets whose reduced state has purity 1 within ``tol``."""
    n = state.n
    if not 1 <= s <= n - 1:
        raise ValueError(f"s must lie in [1, {n - 1}], got {s}")
    subsets = list(subsets_of_size(range(n), s, n))
    return sum(_map(lambda S: is_pure_subset(state, S, tol), subsets, workers))


@dataclass(frozen=True)
class PurityProfile:
    n: int
    gammas: tuple[int, ...]
    gamma_max: tuple[int, ...]
    tol: float

    def gamma(self, s: int) -> int:
        return self.gammas[s - 1]

    @property
    def at_maximum(self) -> bool:
        return self.gammas == self.gamma_max

    @property
    def all_zero(self) -> bool:
        return not any(self.gammas)


def purity_profile(state: State, tol: float = PURITY_TOL, workers: int = 1) -> PurityProfile:
    n = state.n
    gammas = tuple(gamma(state, s, tol, workers) for s in range(1, n))
    maxima = tuple(gamma_max_pure(n, s) for s in range(1, n))
    return PurityProfile(n, gammas, maxima, tol)


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    n: int
    gamma_1: int
    witnesses: tuple[int, ...]  # sites whose single-site reduction is mixed

    @property
    def label(self) -> str:
        return SEPARABLE if self.separable else ENTANGLEMENT_PRESENT


def is_separable_pure(psi: PureState, tol: float = PURITY_TOL, workers: int = 1) -> SeparabilityVerdict:
    n = psi.n
    flags = _map(lambda i: is_pure_subset(psi, (i,), tol), list(range(n)), workers)
    witnesses = tuple(i for i, ok in enumerate(flags) if not ok)
    verdict = SeparabilityVerdict(not witnesses, n, n - len(witnesses), witnesses)
    if CROSS_CHECK and 1 < n and psi.dims.total_dim <= 4096:
        profile = purity_profile(psi, tol, workers)
        assert profile.at_maximum == verdict.separable, (profile, verdict)
    return verdict


def fully_entangled(psi: PureState, tol: float = PURITY_TOL, workers: int = 1) -> bool:
    """True iff no proper subset of sites splits off as a pure factor."""
    n = psi.n
    for s in range(1, n):
        subsets = list(subsets_of_size(range(n), s, n))
        if any(_map(lambda S: is_pure_subset(psi, S, tol), subsets, workers)):
            return False
    return True


@dataclass(frozen=True)
class Factor:
    sites: SiteSubset

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def tag(self) -> str:
        return "entangled" if self.size >= 2 else "singleton"


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[Factor, ...]

    @property
    def partition(self) -> list[tuple[int, ...]]:
        return [f.sites.members for f in self.factors]

    @property
    def sizes(self) -> list[int]:
        return [f.size for f in self.factors]


def _greedy_stage(state: State, candidates: list[SiteSubset], pure: Callable,
                  workers: int) -> list[SiteSubset]:
    flags = _map(pure, candidates, workers)
    taken: list[SiteSubset] = []
    used = 0
    for cand, ok in zip(candidates, flags):
        if ok and not cand.mask & used:
            taken.append(cand)
            used |= cand.mask
    return taken


def finest_factorization(psi: PureState, tol: float = PURITY_TOL, workers: int = 1) -> Factorization:
    """Split ``psi`` into its minimal tensor factors.

    Subsets are scanned by increasing size, lexicographically within a size.
    For a pure state the subsets with pure reductions are exactly the unions
    of true factors, so the first qualifying subsets disjoint from earlier
    picks are the true factors.  Sites never picked form one last factor.
    """
    n = psi.n
    uncovered = list(range(n))
    found: list[SiteSubset] = []
    for s in range(1, n):
        if len(uncovered) <= s:
            break
        candidates = list(subsets_of_size(uncovered, s, n))
        taken = _greedy_stage(psi, candidates, lambda S: is_pure_subset(psi, S, tol), workers)
        found.extend(taken)
        used = 0
        for t in taken:
            used |= t.mask
        uncovered = [i for i in uncovered if not used >> i & 1]
    if uncovered:
        found.append(SiteSubset(uncovered, n))
    found.sort(key=lambda S: S.members[0])
    return Factorization(n, tuple(Factor(S) for S in found))


@dataclass(frozen=True)
class MixedAnalysis:
    n: int
    stage_gammas: tuple[int, ...]
    n_p: int
    gamma_max_mixed: tuple[int | None, ...]
    verdict: str
    pure_factors: tuple[tuple[int, ...], ...]
    tol: float


def np_mixed(rho: State, tol: float = PURITY_TOL, workers: int = 1) -> MixedAnalysis:
    """Sequential trace-out count of sites in pure sub-states.

    Stage ``s`` picks disjoint size-``s`` subsets of the remaining sites with
    pure reductions (same scan order as :func:`finest_factorization`), counts
    them as ``gamma_s`` and traces them out before the next stage.
    """
    rho = as_density(rho)
    n = rho.n
    if n < 2:
        raise ValueError("the n_p algorithm needs at least two sites")
    remaining = list(range(n))
    current: DensityMatrix = rho
    stage_gammas: list[int] = []
    pure_factors: list[tuple[int, ...]] = []
    for s in range(1, n):
        if len(remaining) < s:
            stage_gammas.append(0)
            continue
        local = {site: k for k, site in enumerate(remaining)}
        cur = current
        candidates = list(subsets_of_size(remaining, s, n))
        taken = _greedy_stage(
            cur, candidates,
            lambda S: is_pure_subset(cur, [local[i] for i in S.members], tol),
            workers)
        stage_gammas.append(len(taken))
        pure_factors.extend(S.members for S in taken)
        if taken:
            gone = {i for S in taken for i in S.members}
            kept = [i for i in remaining if i not in gone]
            if kept:
                current = partial_trace(current, [local[i] for i in kept])
            remaining = kept
    n_p = sum(s * g for s, g in enumerate(stage_gammas, start=1))
    maxima = tuple(gamma_max_pure(n_p, s) if s < n_p else None for s in range(1, n))
    if n_p == 0:
        verdict = INCONCLUSIVE
    elif n_p > 1 and stage_gammas[0] < maxima[0]:
        # gamma_1 below n_p: some pure sub-state of >= 2 sites does not split further
        verdict = ENTANGLEMENT_DETECTED
    else:
        verdict = NECESSARY_CONDITION_PASSED
    return MixedAnalysis(n, tuple(stage_gammas), n_p, maxima, verdict,
                         tuple(sorted(pure_factors)), tol)


def subsets_with_pure_reduction(state: State, tol: float = PURITY_TOL) -> Iterable[SiteSubset]:
    n = state.n
    for mask in range(1, (1 << n) - 1):
        S = SiteSubset.from_mask(mask, n)
        if is_pure_subset(state, S, tol):
            yield S
