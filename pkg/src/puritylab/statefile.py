"""JSON state files.

Pure states::

    {"dims": [2, 2], "amplitudes": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]}

Density matrices::

    {"dims": [2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}

Complex numbers are ``[re, im]`` pairs; basis order is mixed-radix with
site 0 most significant.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .states import ATOL, DensityMatrix, PureState, State, StateError, ValidationError, as_dims


def _complex_array(data, ndim: int) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _pairs(a: np.ndarray) -> list:
    return np.stack([a.real, a.imag], axis=-1).tolist()


def state_from_json(obj: dict, strict: bool = True) -> State:
    """Build a state from a decoded JSON object, validating it fully.

    With ``strict=False`` a non-normalized amplitude vector is rescaled
    with a warning.
    """
    if not isinstance(obj, dict) or "dims" not in obj:
        raise ValidationError("state file must be an object with a 'dims' key")
    has_amps, has_matrix = "amplitudes" in obj, "matrix" in obj
    if has_amps == has_matrix:
        raise ValidationError("state file needs exactly one of 'amplitudes' or 'matrix'")
    dims = as_dims(obj["dims"])
    try:
        if has_amps:
            amps = _complex_array(obj["amplitudes"], 1)
            norm2 = float(np.vdot(amps, amps).real)
            if not strict and norm2 > 0 and abs(norm2 - 1.0) > ATOL:
                warnings.warn(f"renormalizing state with norm^2 {norm2:.6g}", stacklevel=2)
                amps = amps / np.sqrt(norm2)
            return PureState(dims, amps)
        return DensityMatrix.checked(dims, _complex_array(obj["matrix"], 2))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, StateError):
            raise
        raise ValidationError(str(exc)) from exc


def state_to_json(state: State) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
    return {"dims": list(state.dims), "matrix": _pairs(state.matrix)}


def load_state(path) -> State:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
    return state_from_json(obj)


def save_state(state: State, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(state)) + "\n", encoding="utf-8")
