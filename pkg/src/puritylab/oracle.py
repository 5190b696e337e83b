"""Slow, independent ground truth for the purity-based predicates.

Nothing here calls into :mod:`puritylab.separability`; partial traces are
done by explicit index loops rather than the reshaping used in
:mod:`puritylab.states`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import DensityMatrix, LocalDims, PureState, SiteSubset, State, StateError, as_density

RANK_TOL = 1e-8


class InvalidCut(StateError):
    pass


@dataclass(frozen=True)
class CutSpectrum:
    cut: SiteSubset
    singular_values: tuple[float, ...]
    schmidt_rank: int

    @property
    def purity(self) -> float:
        """tr(rho_S^2) read off the Schmidt coefficients."""
        return float(sum(v ** 4 for v in self.singular_values))


def _proper_cut(cut, n: int) -> SiteSubset:
    if not isinstance(cut, SiteSubset):
        cut = SiteSubset(cut, n)
    if cut.n != n or not 0 < len(cut) < n:
        raise InvalidCut(f"{cut} is not a non-empty proper subset of {n} sites")
    return cut


def schmidt_rank(psi: PureState, cut, rank_tol: float = RANK_TOL) -> CutSpectrum:
    """Singular values of the amplitudes reshaped across ``cut | complement``."""
    cut = _proper_cut(cut, psi.n)
    rows, cols = cut.members, cut.complement().members
    dims = psi.dims
    dr = int(np.prod([dims[i] for i in rows]))
    dc = int(np.prod([dims[i] for i in cols]))
    m = np.zeros((dr, dc), dtype=complex)
    row_dims = LocalDims(tuple(dims[i] for i in rows))
    col_dims = LocalDims(tuple(dims[i] for i in cols))
    for idx, amp in enumerate(psi.amplitudes):
        digits = dims.digits(idx)
        r = row_dims.index([digits[i] for i in rows])
        c = col_dims.index([digits[i] for i in cols])
        m[r, c] = amp
    sv = np.linalg.svd(m, compute_uv=False)
    return CutSpectrum(cut, tuple(float(v) for v in sv), int(np.sum(sv > rank_tol)))


def brute_partial_trace(rho: DensityMatrix, keep) -> np.ndarray:
    """Partial trace by summing matrix entries whose traced digits agree."""
    n = rho.n
    keep = keep if isinstance(keep, SiteSubset) else SiteSubset(keep, n)
    kept = keep.members
    traced = keep.complement().members
    dims = rho.dims
    kdims = LocalDims(tuple(dims[i] for i in kept)) if kept else None
    if kdims is None:
        raise InvalidCut("keep set must be non-empty")
    out = np.zeros((kdims.total_dim, kdims.total_dim), dtype=complex)
    digits = [dims.digits(i) for i in range(dims.total_dim)]
    for r, dr in enumerate(digits):
        for c, dc in enumerate(digits):
            if all(dr[t] == dc[t] for t in traced):
                out[kdims.index([dr[k] for k in kept]), kdims.index([dc[k] for k in kept])] += rho.matrix[r, c]
    return out


def factor_check(rho: State, cut, tol: float = 1e-9) -> bool:
    """True iff rho equals rho_S (x) rho_complement with sites put back in order."""
    rho = as_density(rho)
    cut = _proper_cut(cut, rho.n)
    rest = cut.complement()
    a = brute_partial_trace(rho, cut)
    b = brute_partial_trace(rho, rest)
    dims = rho.dims
    adims = LocalDims(tuple(dims[i] for i in cut.members))
    bdims = LocalDims(tuple(dims[i] for i in rest.members))
    digits = [dims.digits(i) for i in range(dims.total_dim)]
    split = [
        (adims.index([d[i] for i in cut.members]), bdims.index([d[i] for i in rest.members]))
        for d in digits
    ]
    for r, (ra, rb) in enumerate(split):
        for c, (ca, cb) in enumerate(split):
            if abs(a[ra, ca] * b[rb, cb] - rho.matrix[r, c]) > tol:
                return False
    return True


def all_cut_spectra(psi: PureState, rank_tol: float = RANK_TOL) -> list[CutSpectrum]:
    """Spectra for every non-empty proper subset, ordered by bitmask."""
    n = psi.n
    return [schmidt_rank(psi, SiteSubset.from_mask(mask, n), rank_tol) for mask in range(1, (1 << n) - 1)]
