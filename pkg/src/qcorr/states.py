"""Density matrices, pure states, subsystem partitions and state generators."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    EPS_EIG,
    TOL_HERM,
    DimensionError,
    as_matrix,
    check_dims,
    eigh,
    max_dim,
    partial_trace,
    permute_subsystems,
)

TOL_TRACE = 1e-9
TOL_POS = 1e-9
TOL_NORM = 1e-9


class InvalidStateError(ValueError):
    """Raised when an operator fails density-matrix validation."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


@dataclass(frozen=True)
class Violation:
    invariant: str
    magnitude: float

    def __str__(self):
        return f"{self.invariant} violated by {self.magnitude:.3e}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def names(self):
        return {v.invariant for v in self.violations}

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


def validate(op, dims=None):
    """Check the density-matrix invariants, reporting each violation's size.

    Accepts a :class:`DensityMatrix` or a raw square array (``dims`` is then
    optional and only checked for consistency).
    """
    if isinstance(op, DensityMatrix):
        op, dims = op.op, op.dims
    m = np.asarray(op, dtype=complex)
    out = []
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return ValidationReport((Violation("square", float("inf")),))
    if not np.all(np.isfinite(m)):
        return ValidationReport((Violation("finite", float("inf")),))
    if dims is not None:
        if int(np.prod(dims)) != m.shape[0]:
            out.append(Violation("dims", float(abs(int(np.prod(dims)) - m.shape[0]))))
    herm = float(np.linalg.norm(m - m.conj().T))
    if herm > TOL_HERM:
        out.append(Violation("hermitian", herm))
    tr = float(abs(np.trace(m) - 1.0))
    if tr > TOL_TRACE:
        out.append(Violation("trace", tr))
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lam_min < -TOL_POS:
        out.append(Violation("positivity", -lam_min))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class Partition:
    """Named groups of tensor factors, e.g. ``A -> (0,)``, ``B -> (1, 2)``."""

    labels: tuple
    groups: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "groups", groups)
        if len(labels) != len(groups):
            raise ValueError("labels and groups differ in length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels {labels}")
        flat = [i for g in groups for i in g]
        if any(not g for g in groups):
            raise ValueError("empty subsystem group")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError(f"groups {groups} are not disjoint and exhaustive")

    @classmethod
    def standard(cls, n, labels=None):
        """One factor per label: ``Partition.standard(3)`` is A, B, C."""
        if labels is None:
            labels = "ABCDEFGH"[:n]
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError(f"need {n} labels, got {labels}")
        return cls(labels, tuple((i,) for i in range(n)))

    @property
    def n_factors(self):
        return sum(len(g) for g in self.groups)

    def indices(self, label):
        try:
            return self.groups[self.labels.index(label)]
        except ValueError:
            raise KeyError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def check(self, dims):
        if self.n_factors != len(dims):
            raise DimensionError(
                f"partition covers {self.n_factors} factors but dims {tuple(dims)} has {len(dims)}"
            )

    def dim(self, dims, label):
        return int(np.prod([dims[i] for i in self.indices(label)]))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    op: np.ndarray
    dims: tuple
    label: str = field(default="", compare=False)

    def __post_init__(self):
        op = as_matrix(self.op)
        if op.shape[0] != op.shape[1]:
            raise DimensionError(f"density matrix must be square, got {op.shape}")
        if op.shape[0] > max_dim():
            raise DimensionError(f"dimension {op.shape[0]} exceeds cap {max_dim()}")
        dims = check_dims(self.dims, op.shape[0])
        op = op.copy()
        op.setflags(write=False)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def checked(cls, op, dims, label=""):
        """Construct and raise :class:`InvalidStateError` unless valid."""
        report = validate(op, dims)
        if not report.ok:
            raise InvalidStateError(report)
        return cls(op, dims, label)

    @classmethod
    def from_pure(cls, psi, dims=None):
        if isinstance(psi, PureState):
            psi, dims = psi.vec, psi.dims
        psi = np.asarray(psi, dtype=complex).ravel()
        if dims is None:
            dims = (psi.size,)
        return cls(np.outer(psi, psi.conj()), dims)

    @property
    def dim(self):
        return self.op.shape[0]

    def validate(self):
        return validate(self.op, self.dims)

    def ptrace(self, keep):
        """Reduced state on the factors in ``keep`` (original order kept)."""
        keep = sorted(set(keep))
        return DensityMatrix(
            partial_trace(self.op, self.dims, keep), tuple(self.dims[i] for i in keep)
        )

    def permute(self, order):
        op, dims = permute_subsystems(self.op, self.dims, order)
        return DensityMatrix(op, dims)

    def spectrum(self):
        return eigh(self.op)[0]

    def rank(self, eps=EPS_EIG):
        return int(np.count_nonzero(self.spectrum() >= eps))


@dataclass(frozen=True, eq=False)
class PureState:
    vec: np.ndarray
    dims: tuple

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex).ravel()
        if not np.all(np.isfinite(vec)):
            raise ValueError("state vector has non-finite entries")
        dims = check_dims(self.dims, vec.size)
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > TOL_NORM:
            raise ValueError(f"state vector norm {norm:.12f} is not 1")
        vec = vec.copy()
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, vec, dims):
        vec = np.asarray(vec, dtype=complex).ravel()
        return cls(vec / np.linalg.norm(vec), dims)

    def density(self):
        return DensityMatrix.from_pure(self)

    def ptrace(self, keep):
        return self.density().ptrace(keep)


def subsystem(rho, part, labels):
    """Reduced state on the listed labels, factors grouped per label in that order.

    The returned matrix has one tensor factor per label (groups are merged),
    so ``subsystem(rho, part, ["A", "B"])`` is always a bipartite operator.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    part.check(rho.dims)
    if isinstance(labels, str):
        labels = [labels]
    idx = [i for lab in labels for i in part.indices(lab)]
    if len(set(idx)) != len(idx):
        raise ValueError(f"labels {labels} overlap")
    reduced = rho.ptrace(idx)
    kept = sorted(idx)
    order = [kept.index(i) for i in idx]
    op, _ = permute_subsystems(reduced.op, reduced.dims, order)
    grouped = tuple(part.dim(rho.dims, lab) for lab in labels)
    return DensityMatrix(op, grouped)


def purify(rho):
    """Canonical purification ``sum_k sqrt(l_k) |k>_sys |k>_E``.

    The environment is appended as the last tensor factor and has dimension
    equal to the numerical rank; coefficients follow the descending
    eigenbasis and are real and nonnegative.
    """
    report = rho.validate()
    if not report.ok:
        raise InvalidStateError(report)
    w, v = eigh(rho.op)
    r = int(np.count_nonzero(w >= EPS_EIG))
    w = w[:r]
    w = w / w.sum()
    # column k of v is |k>_sys; vec[s, k] = sqrt(w_k) v[s, k]
    vec = (v[:, :r] * np.sqrt(w)).reshape(-1)
    return PureState(vec / np.linalg.norm(vec), rho.dims + (r,))


def random_pure(dims, seed):
    """Haar-random pure state; ``seed`` is an int or a ``numpy`` Generator."""
    dims = check_dims(dims)
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z), dims)


def random_density(dims, rank, seed):
    """Induced-measure mixed state: trace out a ``rank``-dimensional ancilla."""
    dims = check_dims(dims)
    d = int(np.prod(dims))
    if not 1 <= rank <= d:
        raise ValueError(f"rank {rank} outside [1, {d}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    op = g @ g.conj().T
    op = op / np.trace(op).real
    return DensityMatrix(0.5 * (op + op.conj().T), dims)


def bell_state(dims=(2, 2)):
    """Maximally entangled ``sum_k |kk>/sqrt(d)`` on two equal factors."""
    d = dims[0]
    if dims != (d, d):
        raise DimensionError("bell_state needs two equal factors")
    vec = np.zeros(d * d, dtype=complex)
    vec[[k * d + k for k in range(d)]] = 1 / np.sqrt(d)
    return PureState(vec, dims)


def maximally_mixed(dims):
    dims = check_dims(dims)
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, dims)


def product_state(*states):
    """Tensor product of density matrices (or pure states)."""
    ops, dims = [], ()
    for s in states:
        if isinstance(s, PureState):
            s = s.density()
        ops.append(s.op)
        dims += s.dims
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return DensityMatrix(out, dims)


def paper_example_state():
    """The 2 x 4 worked example: ``|phi+><phi+|`` on A, B_L tensored with I/2 on B_R.

    Entries are exactly 0 or 1/4; built entry-wise so the file output is
    bit-exact.
    """
    m = np.zeros((8, 8), dtype=complex)
    for i, j in [(0, 0), (0, 6), (1, 1), (1, 7), (6, 0), (6, 6), (7, 1), (7, 7)]:
        m[i, j] = 0.25
    return DensityMatrix(m, (2, 4), label="paper-example")


def constructed_saturating_state(d_l, d_r, d_b, seed, scramble=True):
    """``V (rho_L (x) |phi><phi|) V^dagger`` on A = A_L A_R (dim d_l*d_r) and B.

    ``rho_L`` is a full-rank random state, ``|phi>`` a random pure state on
    A_R (x) B and ``V`` a Haar unitary on A (identity when ``scramble`` is
    false). Returns ``(rho, parts)`` where ``parts`` holds the ingredients.
    """
    from .linalg import random_unitary

    rng = np.random.default_rng(seed)
    rho_l = random_density((d_l,), d_l, rng)
    phi = random_pure((d_r, d_b), rng)
    op = np.kron(rho_l.op, np.outer(phi.vec, phi.vec.conj()))
    d_a = d_l * d_r
    u = random_unitary(d_a, rng) if scramble else np.eye(d_a)
    big = np.kron(u, np.eye(d_b))
    op = big @ op @ big.conj().T
    op = 0.5 * (op + op.conj().T)
    return DensityMatrix(op, (d_a, d_b)), {"rho_l": rho_l, "phi": phi, "unitary": u}
