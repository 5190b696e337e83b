"""Dense multi-qudit states and the primitives built on them.

Basis ordering is mixed-radix with site 0 as the most significant digit, so
the amplitude of ``|i_1 i_2 ... i_n>`` sits at index
``((i_1 * d_2 + i_2) * d_3 + i_3) ...``.  This matches ``np.kron`` and a
C-order reshape to ``dims``.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_MAX_DIM = 4096
ATOL = 1e-9
PSD_TOL = -1e-8

_max_dim: contextvars.ContextVar[int] = contextvars.ContextVar("max_dim", default=DEFAULT_MAX_DIM)


class StateError(ValueError):
    """Base class for invalid-state errors."""


class DimensionCapExceeded(StateError):
    pass


class ValidationError(StateError):
    pass


def get_max_dim() -> int:
    return _max_dim.get()


@contextlib.contextmanager
def dim_cap(max_dim: int) -> Iterator[int]:
    """Temporarily change the total-dimension cap for the current context."""
    if max_dim < 2:
        raise ValueError("dimension cap must be at least 2")
    token = _max_dim.set(int(max_dim))
    try:
        yield max_dim
    finally:
        _max_dim.reset(token)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class LocalDims:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise StateError("a state needs at least one site")
        if any(d < 2 for d in dims):
            raise StateError(f"local dimensions must be >= 2, got {list(dims)}")
        cap = get_max_dim()
        if self.total_dim > cap:
            raise DimensionCapExceeded(
                f"total dimension {self.total_dim} exceeds cap {cap}")

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, i):
        return self.dims[i]

    def __add__(self, other: "LocalDims") -> "LocalDims":
        return LocalDims(self.dims + tuple(other))

    def index(self, digits: Sequence[int]) -> int:
        """Flat index of the basis ket with the given per-site digits."""
        if len(digits) != self.n:
            raise StateError(f"expected {self.n} digits, got {len(digits)}")
        idx = 0
        for digit, d in zip(digits, self.dims):
            if not 0 <= digit < d:
                raise StateError(f"digit {digit} out of range for local dimension {d}")
            idx = idx * d + digit
        return idx

    def digits(self, index: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            index, r = divmod(index, d)
            out.append(r)
        return tuple(reversed(out))


def as_dims(dims) -> LocalDims:
    return dims if isinstance(dims, LocalDims) else LocalDims(tuple(dims))


class SiteSubset:
    """An ordered set of site indices out of ``n`` sites, stored as a bitmask."""

    __slots__ = ("mask", "n")

    def __init__(self, sites: Iterable[int], n: int):
        mask = 0
        for s in sites:
            s = int(s)
            if not 0 <= s < n:
                raise IndexError(f"site {s} out of range for {n} sites")
            mask |= 1 << s
        self.mask = mask
        self.n = n

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "SiteSubset":
        if mask >> n:
            raise IndexError(f"mask {mask:b} has bits beyond {n} sites")
        sub = cls((), n)
        sub.mask = mask
        return sub

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def complement(self) -> "SiteSubset":
        return SiteSubset.from_mask(~self.mask & ((1 << self.n) - 1), self.n)

    def isdisjoint(self, other: "SiteSubset") -> bool:
        return not self.mask & other.mask

    def __or__(self, other: "SiteSubset") -> "SiteSubset":
        return SiteSubset.from_mask(self.mask | other.mask, self.n)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, site):
        return bool(self.mask >> site & 1)

    def __eq__(self, other):
        return isinstance(other, SiteSubset) and (self.mask, self.n) == (other.mask, other.n)

    def __hash__(self):
        return hash((self.mask, self.n))

    def __repr__(self):
        return f"SiteSubset({list(self.members)}, n={self.n})"


def subsets_of_size(sites: Sequence[int], s: int, n: int) -> Iterator[SiteSubset]:
    """Size-``s`` subsets of ``sites`` in lexicographic order."""
    for combo in combinations(sorted(sites), s):
        yield SiteSubset(combo, n)


def _keep_sites(keep, n: int) -> tuple[int, ...]:
    if isinstance(keep, SiteSubset):
        if keep.n != n:
            raise StateError(f"subset is over {keep.n} sites, state has {n}")
        members = keep.members
    else:
        members = tuple(sorted(set(int(k) for k in keep)))
        for k in members:
            if not 0 <= k < n:
                raise IndexError(f"site {k} out of range for {n} sites")
    if not members:
        raise StateError("keep set must be non-empty")
    return members


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over sites with local dimensions ``dims``."""

    dims: LocalDims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (dims.total_dim,):
            raise StateError(
                f"expected {dims.total_dim} amplitudes for dims {list(dims)}, got {amps.size}")
        if abs(self.norm_squared() - 1.0) > ATOL:
            raise ValidationError(f"state is not normalized (norm^2 = {self.norm_squared():.12g})")
        # real amplitudes let cut computations run in real arithmetic
        work = amps
        if not np.any(amps.imag):
            work = np.ascontiguousarray(amps.real)
            work.flags.writeable = False
        object.__setattr__(self, "_work", work)

    @property
    def n(self) -> int:
        return self.dims.n

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @classmethod
    def basis(cls, digits: Sequence[int], dims: Sequence[int] | None = None) -> "PureState":
        dims = as_dims(dims if dims is not None else [max(2, d + 1) for d in digits])
        amps = np.zeros(dims.total_dim, dtype=complex)
        amps[dims.index(digits)] = 1.0
        return cls(dims, amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix over sites with local dimensions ``dims``.

    The constructor only checks shapes; use :meth:`checked` for untrusted
    input, which also runs :func:`validate`.
    """

    dims: LocalDims
    matrix: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        m = _frozen(self.matrix)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)
        d = dims.total_dim
        if m.shape != (d, d):
            raise StateError(f"expected a {d}x{d} matrix for dims {list(dims)}, got {m.shape}")

    @classmethod
    def checked(cls, dims, matrix) -> "DensityMatrix":
        rho = cls(dims, matrix)
        diag = validate(rho)
        if not diag.ok:
            raise ValidationError(diag.describe())
        return rho

    @property
    def n(self) -> int:
        return self.dims.n


State = PureState | DensityMatrix


@dataclass(frozen=True)
class Diagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: float = ATOL
    psd_tol: float = PSD_TOL

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_defect <= self.tol

    @property
    def unit_trace(self) -> bool:
        return self.trace_defect <= self.tol

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= self.psd_tol

    @property
    def ok(self) -> bool:
        return self.hermitian and self.unit_trace and self.psd

    def describe(self) -> str:
        problems = []
        if not self.hermitian:
            problems.append(f"not Hermitian (max |rho - rho^H| = {self.hermiticity_defect:.3g})")
        if not self.unit_trace:
            problems.append(f"trace defect {self.trace_defect:.3g}")
        if not self.psd:
            problems.append(f"negative eigenvalue {self.min_eigenvalue:.3g}")
        return "; ".join(problems) or "valid density matrix"


def validate(rho: DensityMatrix) -> Diagnostics:
    """Report Hermiticity defect, trace defect and smallest eigenvalue."""
    m = rho.matrix
    herm = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    trace_defect = float(abs(np.trace(m) - 1.0))
    # eigvalsh reads one triangle only; symmetrize so the estimate is of the Hermitian part
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    return Diagnostics(herm, trace_defect, min_eig)


def tensor_product(a: State, b: State) -> State:
    """Tensor product with ``a``'s sites first (most significant)."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        dims = a.dims + b.dims
        return PureState(dims, np.kron(a.amplitudes, b.amplitudes))
    a, b = as_density(a), as_density(b)
    dims = a.dims + b.dims
    return DensityMatrix(dims, np.kron(a.matrix, b.matrix))


def tensor_all(states: Iterable[State]) -> State:
    it = iter(states)
    out = next(it)
    for s in it:
        out = tensor_product(out, s)
    return out


def density_from_pure(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(psi.dims, np.outer(a, a.conj()))


def as_density(state: State) -> DensityMatrix:
    return density_from_pure(state) if isinstance(state, PureState) else state


def mix(weights: Sequence[float], states: Sequence[State]) -> DensityMatrix:
    """Convex combination of states sharing the same dims."""
    if len(weights) != len(states) or not states:
        raise StateError("need one weight per state and at least one state")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise StateError("mixture weights must be non-negative")
    if abs(w.sum() - 1.0) > ATOL:
        raise StateError(f"mixture weights sum to {w.sum():.12g}, not 1")
    rhos = [as_density(s) for s in states]
    dims = rhos[0].dims
    for r in rhos[1:]:
        if r.dims != dims:
            raise StateError(f"cannot mix states with dims {list(dims)} and {list(r.dims)}")
    return DensityMatrix(dims, sum(wi * r.matrix for wi, r in zip(w, rhos)))


def partial_trace(rho: State, keep) -> DensityMatrix:
    """Reduced density matrix on ``keep``; kept sites stay in ascending order."""
    if isinstance(rho, PureState):
        return reduced_density(rho, keep)
    n = rho.n
    kept = _keep_sites(keep, n)
    traced = tuple(i for i in range(n) if i not in kept)
    dims = rho.dims.dims
    dk = math.prod(dims[i] for i in kept)
    dt = math.prod(dims[i] for i in traced)
    t = rho.matrix.reshape(dims + dims)
    perm = kept + traced
    t = t.transpose(perm + tuple(n + p for p in perm)).reshape(dk, dt, dk, dt)
    return DensityMatrix(tuple(dims[i] for i in kept), np.einsum("ijkj->ik", t))


def _cut_matrix(psi: PureState, kept: tuple[int, ...]) -> np.ndarray:
    n = psi.n
    rest = tuple(i for i in range(n) if i not in kept)
    dims = psi.dims.dims
    dk = math.prod(dims[i] for i in kept)
    return psi._work.reshape(dims).transpose(kept + rest).reshape(dk, -1)


def reduced_density(psi: PureState, keep) -> DensityMatrix:
    """Reduction of a pure state without forming the full outer product."""
    kept = _keep_sites(keep, psi.n)
    m = _cut_matrix(psi, kept)
    return DensityMatrix(tuple(psi.dims[i] for i in kept), m @ m.conj().T)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), as the sum of squared entry moduli (valid for Hermitian rho)."""
    m = rho.matrix
    return float(np.vdot(m, m).real)


def reduced_purity(state: State, keep) -> float:
    """Purity of the reduction of ``state`` to ``keep``.

    Pure inputs go through the Gram matrix of the smaller side of the cut,
    which has the same nonzero spectrum as the reduced state.
    """
    if isinstance(state, DensityMatrix):
        return purity(partial_trace(state, keep))
    kept = _keep_sites(keep, state.n)
    m = _cut_matrix(state, kept)
    if m.shape[0] > m.shape[1]:
        m = m.T
    g = m @ (m.T if m.dtype.kind == "f" else m.conj().T)
    return float(np.vdot(g, g).real)


def permute_sites(state: State, order: Sequence[int]) -> State:
    """Relabel sites: new site ``i`` is old site ``order[i]``."""
    order = tuple(order)
    n = state.n
    if sorted(order) != list(range(n)):
        raise StateError(f"{order} is not a permutation of {n} sites")
    dims = tuple(state.dims[i] for i in order)
    if isinstance(state, PureState):
        return PureState(dims, state.tensor().transpose(order).reshape(-1))
    t = state.matrix.reshape(state.dims.dims * 2)
    t = t.transpose(order + tuple(n + i for i in order))
    d = math.prod(dims)
    return DensityMatrix(dims, t.reshape(d, d))


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix((d,), np.eye(d) / d)
