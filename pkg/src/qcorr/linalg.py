"""Dense complex matrix primitives: Kronecker products, partial traces and
Hermitian eigendecomposition with the clamping policy shared by every
entropy evaluation in the package.
"""

import os
from functools import reduce

import numpy as np

#: Eigenvalues below this are treated as exactly zero (rank and 0 log 0).
EPS_EIG = 1e-12
#: Frobenius-norm tolerance on ``m - m^dagger`` before a matrix is rejected.
TOL_HERM = 1e-9
DEFAULT_MAX_DIM = 64


class DimensionError(ValueError):
    """Raised when shapes and subsystem dimension lists disagree."""


class NonHermitianError(ValueError):
    """Raised when a matrix is not Hermitian within ``TOL_HERM``."""


def max_dim():
    """Total-dimension cap, overridable through ``QCORR_MAX_DIM``."""
    raw = os.environ.get("QCORR_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"QCORR_MAX_DIM must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("QCORR_MAX_DIM must be positive")
    return value


def as_matrix(m):
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def check_dims(dims, size=None):
    """Validate a subsystem dimension list against a matrix size."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"invalid dimension list {dims}")
    total = int(np.prod(dims))
    if size is not None and total != size:
        raise DimensionError(f"dims {dims} multiply to {total}, operator has size {size}")
    return dims


def tensor_product(*mats):
    """Kronecker product of one or more matrices (or vectors)."""
    if not mats:
        raise ValueError("tensor_product needs at least one operand")
    arrs = [np.asarray(m, dtype=complex) for m in mats]
    rows = int(np.prod([a.shape[0] for a in arrs]))
    cap = max_dim()
    if rows > cap:
        raise DimensionError(f"tensor product dimension {rows} exceeds cap {cap}")
    return reduce(np.kron, arrs)


def permute_subsystems(m, dims, order):
    """Reorder the tensor factors of a square operator.

    ``order[k]`` is the index of the original factor placed at position ``k``.
    """
    m = as_matrix(m)
    dims = check_dims(dims, m.shape[0])
    order = [int(i) for i in order]
    if sorted(order) != list(range(len(dims))):
        raise DimensionError(f"{order} is not a permutation of {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(order + [n + i for i in order])
    new_dims = tuple(dims[i] for i in order)
    size = int(np.prod(new_dims))
    return t.reshape(size, size), new_dims


def partial_trace(m, dims, keep):
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original relative order. The result for a
    full ``keep`` set is ``m`` itself; callers wanting the scalar trace use
    ``np.trace``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"partial trace needs a square matrix, got {m.shape}")
    dims = check_dims(dims, m.shape[0])
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise DimensionError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # Move kept row/col axes to the front, traced axes to the back, then
    # contract the traced row/col pairs.
    order = keep + [n + i for i in keep] + traced + [n + i for i in traced]
    t = t.transpose(order)
    dk = int(np.prod([dims[i] for i in keep]))
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dk, dt, dt)
    return np.einsum("ijkk->ij", t)


def hermitian_part(h, tol=TOL_HERM):
    """Return ``(h + h^dagger)/2`` after checking ``h`` is Hermitian within ``tol``."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got {h.shape}")
    dev = np.linalg.norm(h - h.conj().T)
    if dev > tol:
        raise NonHermitianError(f"matrix deviates from Hermitian by {dev:.3e} (tol {tol:.1e})")
    return 0.5 * (h + h.conj().T)


def eigh(h, tol=TOL_HERM):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, v)`` with ``h = v @ diag(w) @ v^dagger``.
    """
    h = hermitian_part(h, tol)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvalsh(h, tol=TOL_HERM):
    h = hermitian_part(h, tol)
    return np.linalg.eigvalsh(h)[::-1].copy()


def clamp_eigenvalues(w, eps=EPS_EIG):
    w = np.asarray(w, dtype=float).copy()
    w[w < eps] = 0.0
    return w


def numerical_rank(h, eps=EPS_EIG):
    return int(np.count_nonzero(eigvalsh(h) >= eps))


def trace_distance(a, b):
    """Half the trace norm of ``a - b`` for Hermitian ``a``, ``b``."""
    diff = as_matrix(a) - as_matrix(b)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def is_unitary(u, tol=1e-9):
    u = as_matrix(u)
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])) <= tol


def matrices_close(a, b, tol=1e-9):
    """Frobenius-norm comparison."""
    return float(np.linalg.norm(as_matrix(a) - as_matrix(b))) <= tol


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
