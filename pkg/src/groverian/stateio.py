"""JSON state files.

A state file is a JSON object::

    {"num_qubits": 2, "kind": "pure", "amplitudes": [[re, im], ...]}
    {"num_qubits": 2, "kind": "density", "matrix": [[[re, im], ...], ...]}

Matrices are written as a list of rows. A flat row-major list of ``4**n``
pairs is also accepted on input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .qstate import DensityMatrix, PureState, StateError


class StateFileError(StateError):
    """A state file could not be parsed; the message names the offending field."""


def _pairs(values: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in values]


def state_to_dict(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        return {
            "num_qubits": state.num_qubits,
            "kind": "pure",
            "amplitudes": _pairs(state.amplitudes),
        }
    return {
        "num_qubits": state.num_qubits,
        "kind": "density",
        "matrix": [_pairs(row) for row in state.matrix],
    }


def _complex_array(raw, where: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{where}: entries must be [real, imaginary] number pairs") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise StateFileError(f"{where}: entries must be [real, imaginary] pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StateFileError(f"{where}: non-finite value")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(doc: dict) -> PureState | DensityMatrix:
    if not isinstance(doc, dict):
        raise StateFileError("top level: expected a JSON object")
    for key in ("num_qubits", "kind"):
        if key not in doc:
            raise StateFileError(f"missing field '{key}'")
    n = doc["num_qubits"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise StateFileError(f"num_qubits: expected a positive integer, got {n!r}")
    dim = 2**n
    kind = doc["kind"]
    try:
        if kind == "pure":
            if "amplitudes" not in doc:
                raise StateFileError("missing field 'amplitudes'")
            amps = _complex_array(doc["amplitudes"], "amplitudes")
            if amps.shape != (dim,):
                raise StateFileError(f"amplitudes: expected {dim} entries for {n} qubits, got shape {amps.shape}")
            return PureState(amps)
        if kind == "density":
            if "matrix" not in doc:
                raise StateFileError("missing field 'matrix'")
            mat = _complex_array(doc["matrix"], "matrix")
            if mat.shape == (dim * dim,):
                mat = mat.reshape(dim, dim)
            if mat.shape != (dim, dim):
                raise StateFileError(f"matrix: expected {dim}x{dim} entries for {n} qubits, got shape {mat.shape}")
            return DensityMatrix(mat)
    except StateFileError:
        raise
    except StateError as exc:
        raise StateFileError(f"{'amplitudes' if kind == 'pure' else 'matrix'}: {exc}") from exc
    raise StateFileError(f"kind: expected 'pure' or 'density', got {kind!r}")


def dumps_state(state: PureState | DensityMatrix) -> str:
    return json.dumps(state_to_dict(state))


def loads_state(text: str) -> PureState | DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return state_from_dict(doc)


def save_state(state: PureState | DensityMatrix, path) -> None:
    Path(path).write_text(dumps_state(state) + "\n")


def load_state(path) -> PureState | DensityMatrix:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from exc
    try:
        return loads_state(text)
    except StateFileError as exc:
        raise StateFileError(f"{path}: {exc}") from exc
