import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puritylab.corpus import GHZ_BELL
from puritylab.dsl import state
from puritylab.oracle import brute_partial_trace
from puritylab.statefile import load_state, save_state, state_from_json, state_to_json
from puritylab.states import (
    DensityMatrix,
    DimensionCapExceeded,
    LocalDims,
    PureState,
    SiteSubset,
    StateError,
    ValidationError,
    density_from_pure,
    dim_cap,
    mix,
    partial_trace,
    permute_sites,
    purity,
    reduced_density,
    reduced_purity,
    tensor_product,
    validate,
)

from conftest import haar_vector, random_density

R2 = 1 / math.sqrt(2)


def ket(*digits):
    return PureState.basis(digits, [2] * len(digits))


def test_tensor_basis_kets():
    out = tensor_product(ket(0), ket(1))
    assert list(out.dims) == [2, 2]
    np.testing.assert_array_equal(out.amplitudes, [0, 1, 0, 0])


def test_tensor_bell_bell():
    out = tensor_product(state("bell"), state("bell"))
    expected = np.zeros(16)
    expected[[0b0000, 0b0011, 0b1100, 0b1111]] = 0.5
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


def test_tensor_ghz_bell_matches_expression():
    out = tensor_product(state("ghz(3)"), state("bell"))
    expected = np.zeros(32)
    for a in (0, 7):
        for b in (0, 3):
            expected[(a << 2) | b] = 0.5
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)
    np.testing.assert_allclose(state(GHZ_BELL).amplitudes, expected, atol=1e-15)


def test_tensor_density_overload_and_cap():
    rho = tensor_product(density_from_pure(ket(0)), DensityMatrix((3,), np.eye(3) / 3))
    assert list(rho.dims) == [2, 3]
    with dim_cap(8):
        with pytest.raises(DimensionCapExceeded):
            tensor_product(ket(0, 0), ket(0, 0))


def test_density_from_pure_examples():
    np.testing.assert_array_equal(density_from_pure(ket(0)).matrix, [[1, 0], [0, 0]])
    bell = density_from_pure(state("bell")).matrix
    expected = np.zeros((4, 4))
    for r in (0, 3):
        for c in (0, 3):
            expected[r, c] = 0.5
    np.testing.assert_allclose(bell, expected, atol=1e-15)
    plus = density_from_pure(state("(|0> + |1>)/sqrt(2)")).matrix
    np.testing.assert_allclose(plus, np.full((2, 2), 0.5), atol=1e-15)


def test_mix_examples():
    rho = density_from_pure(state("bell"))
    np.testing.assert_array_equal(mix([1.0], [rho]).matrix, rho.matrix)
    np.testing.assert_allclose(mix([0.5, 0.5], [ket(0), ket(1)]).matrix, np.eye(2) / 2)
    out = mix([0.5, 0.5], [state("bell"), ket(0, 0)]).matrix
    expected = np.zeros((4, 4))
    expected[0, 0], expected[0, 3], expected[3, 0], expected[3, 3] = 0.75, 0.25, 0.25, 0.25
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_mix_errors():
    with pytest.raises(StateError, match="sum"):
        mix([0.5, 0.4], [ket(0), ket(1)])
    with pytest.raises(StateError, match="dims"):
        mix([0.5, 0.5], [ket(0), ket(0, 0)])


def test_partial_trace_examples():
    rho = density_from_pure(state("bell"))
    np.testing.assert_array_equal(partial_trace(rho, [0, 1]).matrix, rho.matrix)
    np.testing.assert_allclose(partial_trace(rho, [0]).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(partial_trace(density_from_pure(ket(0, 1)), [0]).matrix,
                               [[1, 0], [0, 0]])


def test_partial_trace_errors():
    rho = density_from_pure(state("bell"))
    with pytest.raises(StateError):
        partial_trace(rho, [])
    with pytest.raises(IndexError):
        partial_trace(rho, [2])


def test_purity_examples():
    assert purity(density_from_pure(state("w(3)"))) == pytest.approx(1, abs=1e-12)
    assert purity(DensityMatrix((2,), np.eye(2) / 2)) == pytest.approx(0.5, abs=1e-15)
    ghz = density_from_pure(state("ghz(3)"))
    assert purity(partial_trace(ghz, [1])) == pytest.approx(0.5, abs=1e-12)


def test_validate_examples():
    good = validate(density_from_pure(state("ghz(3)")))
    assert good.ok and good.hermiticity_defect <= 1e-9 and good.trace_defect <= 1e-9
    short = validate(DensityMatrix((2,), np.diag([0.6, 0.3])))
    assert not short.ok and short.trace_defect == pytest.approx(0.1)
    m = np.eye(2) / 2 + 0j
    m[0, 1] = 1e-3
    skew = validate(DensityMatrix((2,), m))
    assert not skew.hermitian and skew.hermiticity_defect == pytest.approx(1e-3)
    neg = validate(DensityMatrix((2,), np.diag([1.1, -0.1])))
    assert not neg.psd
    with pytest.raises(ValidationError):
        DensityMatrix.checked((2,), np.diag([1.1, -0.1]))


def test_local_dims_and_subsets():
    d = LocalDims((2, 3, 2))
    assert d.total_dim == 12
    for i in range(12):
        assert d.index(d.digits(i)) == i
    with pytest.raises(StateError):
        LocalDims((1, 2))
    s = SiteSubset([0, 2], 4)
    assert s.members == (0, 2) and s.complement().members == (1, 3) and len(s) == 2
    with pytest.raises(IndexError):
        SiteSubset([4], 4)


def test_states_are_immutable():
    psi = state("bell")
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1


def test_pure_state_must_be_normalized():
    with pytest.raises(ValidationError):
        PureState((2,), [1, 1])


def test_reduced_density_matches_partial_trace(rng):
    psi = PureState((2, 3, 2), haar_vector(rng, 12))
    rho = density_from_pure(psi)
    for keep in ([0], [1], [2], [0, 2], [1, 2], [0, 1]):
        np.testing.assert_allclose(reduced_density(psi, keep).matrix,
                                   partial_trace(rho, keep).matrix, atol=1e-12)
        assert reduced_purity(psi, keep) == pytest.approx(purity(partial_trace(rho, keep)), abs=1e-12)


def test_permute_sites_pure_and_mixed(rng):
    psi = PureState((2, 3, 2), haar_vector(rng, 12))
    out = permute_sites(psi, (2, 0, 1))
    assert list(out.dims) == [2, 2, 3]
    for idx in range(12):
        a, b, c = psi.dims.digits(idx)
        assert out.amplitudes[out.dims.index((c, a, b))] == psi.amplitudes[idx]
    np.testing.assert_allclose(permute_sites(density_from_pure(psi), (2, 0, 1)).matrix,
                               density_from_pure(out).matrix, atol=1e-15)


def test_state_file_round_trip(tmp_path, rng):
    psi = PureState((2, 3), haar_vector(rng, 6))
    rho = DensityMatrix((3,), random_density(rng, 3))
    for s in (psi, rho):
        path = tmp_path / "s.json"
        save_state(s, path)
        back = load_state(path)
        assert type(back) is type(s) and list(back.dims) == list(s.dims)
        got = back.amplitudes if isinstance(s, PureState) else back.matrix
        want = s.amplitudes if isinstance(s, PureState) else s.matrix
        np.testing.assert_array_equal(got, want)


def test_state_file_rejects_bad_input():
    with pytest.raises(ValidationError):
        state_from_json({"dims": [2], "amplitudes": [[1, 0], [1, 0]]})
    with pytest.raises(ValidationError):
        state_from_json({"dims": [2], "matrix": [[[0.6, 0], [0, 0]], [[0, 0], [0.3, 0]]]})
    with pytest.raises(ValidationError):
        state_from_json({"dims": [2], "amplitudes": [1, 0]})
    with pytest.warns(UserWarning):
        psi = state_from_json({"dims": [2], "amplitudes": [[1, 0], [1, 0]]}, strict=False)
    assert psi.norm_squared() == pytest.approx(1)
    assert state_to_json(psi)["dims"] == [2]


# -- properties ---------------------------------------------------------------

dims_strategy = st.lists(st.integers(2, 3), min_size=1, max_size=4)


@st.composite
def density_matrices(draw):
    dims = draw(dims_strategy)
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    d = math.prod(dims)
    return DensityMatrix(dims, random_density(rng, d))


@st.composite
def pure_states(draw):
    dims = draw(dims_strategy)
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return PureState(dims, haar_vector(rng, math.prod(dims)))


@st.composite
def nonempty_keep(draw, n):
    return draw(st.sets(st.integers(0, n - 1), min_size=1))


@settings(max_examples=60, deadline=None)
@given(density_matrices(), st.data())
def test_partial_trace_agrees_with_brute_force(rho, data):
    keep = sorted(data.draw(nonempty_keep(rho.n)))
    red = partial_trace(rho, keep)
    np.testing.assert_allclose(red.matrix, brute_partial_trace(rho, keep), atol=1e-12)
    assert abs(np.trace(red.matrix) - 1) <= 1e-9
    np.testing.assert_allclose(red.matrix, red.matrix.conj().T, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(density_matrices())
def test_purity_bounds(rho):
    d = rho.dims.total_dim
    p = purity(rho)
    assert 1 / d - 1e-9 <= p <= 1 + 1e-9
    assert p == pytest.approx(np.trace(rho.matrix @ rho.matrix).real, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(pure_states(), st.data())
def test_complement_cut_purities_agree(psi, data):
    if psi.n < 2:
        return
    keep = data.draw(nonempty_keep(psi.n))
    if len(keep) == psi.n:
        return
    rho = density_from_pure(psi)
    S = SiteSubset(keep, psi.n)
    a = purity(partial_trace(rho, S))
    b = purity(partial_trace(rho, S.complement()))
    assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(density_matrices(), density_matrices())
def test_trace_out_tensor_partner(a, b):
    if a.dims.total_dim * b.dims.total_dim > 4096:
        return
    ab = tensor_product(a, b)
    np.testing.assert_allclose(partial_trace(ab, range(a.n)).matrix, a.matrix, atol=1e-9)
    np.testing.assert_allclose(partial_trace(ab, range(a.n, a.n + b.n)).matrix, b.matrix, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(pure_states())
def test_density_from_pure_is_pure(psi):
    rho = density_from_pure(psi)
    assert purity(rho) == pytest.approx(1, abs=1e-12)
    assert validate(rho).ok
