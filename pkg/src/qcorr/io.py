"""JSON state files: ``{"dims": [...], "label": ..., "matrix": [[[re, im], ...], ...]}``."""

import json

import numpy as np

from .states import DensityMatrix, InvalidStateError, PureState, validate


class StateFileError(ValueError):
    """Malformed or unreadable state file."""


def state_to_dict(rho, label=None):
    if isinstance(rho, PureState):
        rho = rho.density()
    op = np.asarray(rho.op)
    doc = {"dims": [int(d) for d in rho.dims]}
    label = label if label is not None else getattr(rho, "label", "")
    if label:
        doc["label"] = label
    doc["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in op]
    return doc


def matrix_to_pairs(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def state_from_dict(doc):
    """Parse a state document; raises :class:`StateFileError` or :class:`InvalidStateError`."""
    if not isinstance(doc, dict):
        raise StateFileError("state file must hold a JSON object")
    try:
        dims = [int(d) for d in doc["dims"]]
        rows = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"missing or malformed field: {exc}") from exc
    if not dims or any(d < 1 for d in dims):
        raise StateFileError(f"invalid dims {dims}")
    n = int(np.prod(dims))
    if not isinstance(rows, list) or len(rows) != n:
        raise StateFileError(f"matrix must have {n} rows")
    op = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise StateFileError(f"row {i} must have {n} entries")
        for j, pair in enumerate(row):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise StateFileError(f"entry ({i}, {j}) is not an [re, im] pair")
            try:
                op[i, j] = complex(float(pair[0]), float(pair[1]))
            except (TypeError, ValueError) as exc:
                raise StateFileError(f"entry ({i}, {j}) is not numeric") from exc
    report = validate(op, dims)
    if not report.ok:
        raise InvalidStateError(report)
    return DensityMatrix(op, tuple(dims), label=str(doc.get("label", "")))


def read_state(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path} is not valid JSON: {exc}") from exc
    return state_from_dict(doc)


def write_state(path, rho, label=None):
    text = json.dumps(state_to_dict(rho, label))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
