"""Measurements on one subsystem and the optimizations behind classical
correlation ``J(A|B)`` and quantum discord ``D(A|B) = I(A:B) - J(A|B)``.

The search runs Nelder-Mead from several random starts over either
rank-one projective measurements or rank-one POVMs with ``d**2`` outcomes
(built from an isometry, Naimark style). The conditional-entropy sum that
dominates the run time is evaluated by :mod:`qcorr.kernels`.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .entropy import entropy_from_spectrum, von_neumann_entropy
from .linalg import TOL_HERM, DimensionError, as_matrix
from .states import DensityMatrix, InvalidStateError, Partition, PureState, subsystem

log = logging.getLogger(__name__)

EPS_PROB = 1e-10
TOL_POVM = 1e-9


class NotAPovmError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators on the measured factor summing to the identity."""

    elements: tuple

    def __post_init__(self):
        els = tuple(as_matrix(e) for e in self.elements)
        if not els:
            raise NotAPovmError("a POVM needs at least one element")
        d = els[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in els:
            if e.shape != (d, d):
                raise NotAPovmError("POVM elements have inconsistent shapes")
            if np.linalg.norm(e - e.conj().T) > TOL_HERM:
                raise NotAPovmError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0] < -TOL_POVM:
                raise NotAPovmError("POVM element is not positive")
            total += e
        dev = np.linalg.norm(total - np.eye(d))
        if dev > TOL_POVM:
            raise NotAPovmError(f"POVM elements sum to identity only within {dev:.2e}")
        object.__setattr__(self, "elements", els)

    @classmethod
    def from_vectors(cls, vecs):
        """Rank-one POVM ``{v_k v_k^dagger}`` from the rows of ``vecs``."""
        vecs = np.asarray(vecs, dtype=complex)
        return cls(tuple(np.outer(v, v.conj()) for v in vecs))

    @classmethod
    def projective(cls, basis):
        """Projective measurement onto the columns of a unitary."""
        return cls.from_vectors(np.asarray(basis, dtype=complex).T)

    @classmethod
    def computational(cls, d):
        return cls.projective(np.eye(d))

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class MeasurementRecord:
    probs: tuple
    cond_states: tuple
    cond_entropies: tuple

    def average_entropy(self):
        return float(sum(p * s for p, s in zip(self.probs, self.cond_entropies)))


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings. ``restarts=None`` picks 20 for qubits, 60 otherwise."""

    restarts: int | None = None
    min_restarts: int = 5
    max_iter: int = 4000
    tol: float = 1e-12
    consistency_tol: float = 1e-4
    seed: int = 0
    mode: str = "projective"
    structure_shortcut: bool = True

    def __post_init__(self):
        if self.mode not in ("projective", "povm"):
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be positive")

    def n_restarts(self, d):
        if self.restarts is not None:
            return self.restarts
        return 20 if d == 2 else 60


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    argmax: Povm
    restarts_used: int
    spread: float
    consistent: bool = True
    method: str = "optimizer"
    optima: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {
            "value": self.value,
            "restarts": self.restarts_used,
            "spread": self.spread,
            "consistent": self.consistent,
            "method": self.method,
        }


def measured_pair(rho, part, unmeasured, measured):
    """Bipartite operator ordered (unmeasured, measured)."""
    if isinstance(rho, PureState):
        rho = rho.density()
    if part is None:
        part = Partition.standard(len(rho.dims))
    if unmeasured is None:
        unmeasured = [lab for lab in part.labels if lab != measured]
    elif isinstance(unmeasured, str):
        unmeasured = [unmeasured]
    labels = list(unmeasured) + [measured]
    ab = subsystem(rho, part, labels)
    if len(unmeasured) > 1:
        ab = DensityMatrix(ab.op, (int(np.prod(ab.dims[:-1])), ab.dims[-1]))
    return ab


def _tensor4(ab):
    da, db = ab.dims
    return np.ascontiguousarray(ab.op.reshape(da, db, da, db))


def apply_povm(rho, part, measured, povm, unmeasured=None):
    """Outcome probabilities and normalized conditional states on the rest."""
    ab = measured_pair(rho, part, unmeasured, measured)
    report = ab.validate()
    if not report.ok:
        raise InvalidStateError(report)
    da, db = ab.dims
    if povm.dim != db:
        raise DimensionError(f"POVM acts on dimension {povm.dim}, measured factor has {db}")
    r4 = _tensor4(ab)
    probs, states, ents = [], [], []
    for e in povm.elements:
        cond = np.einsum("bf,afcb->ac", e, r4)
        cond = 0.5 * (cond + cond.conj().T)
        p = float(np.trace(cond).real)
        probs.append(p)
        if p > EPS_PROB:
            c = DensityMatrix(cond / p, (da,))
            states.append(c)
            ents.append(von_neumann_entropy(c, check=False))
        else:
            states.append(None)
            ents.append(0.0)
    return MeasurementRecord(tuple(probs), tuple(states), tuple(ents))


def holevo_objective(rho, part, measured, povm, unmeasured=None):
    """``S(A) - sum_i p_i S(rho_i^A)`` for the given measurement on B."""
    ab = measured_pair(rho, part, unmeasured, measured)
    rec = apply_povm(ab, None, "B", povm, "A")
    return von_neumann_entropy(ab.ptrace([0]), check=False) - rec.average_entropy()


# -- parametrizations ---------------------------------------------------------


def bloch_vectors(theta, phi):
    """Orthonormal qubit basis along Bloch direction ``(theta, phi)``; rows."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    return np.array([[c, e * s], [-s * np.conj(e), c]], dtype=complex)


def unitary_from_params(x, d):
    """``exp(iH)`` for the Hermitian ``H`` packed in ``d**2`` real numbers."""
    x = np.asarray(x, dtype=float)
    h = np.diag(x[:d]).astype(complex)
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    h[iu] = x[d : d + m] + 1j * x[d + m : d + 2 * m]
    h = h + np.triu(h, 1).conj().T
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def isometry_from_params(x, n, d):
    """``n x d`` isometry ``M (M^dagger M)^{-1/2}`` from ``2 n d`` reals."""
    x = np.asarray(x, dtype=float)
    m = (x[: n * d] + 1j * x[n * d :]).reshape(n, d)
    w, v = np.linalg.eigh(m.conj().T @ m)
    w = np.maximum(w, 1e-300)
    return m @ (v * w**-0.5) @ v.conj().T


class _Search:
    """Parameter space for one measured dimension and mode."""

    def __init__(self, d, mode):
        self.d = d
        self.mode = mode
        if mode == "povm":
            self.n_out = d * d
            self.n_params = 2 * self.n_out * d
        elif d == 2:
            self.n_params = 2
        else:
            self.n_params = d * d

    def vectors(self, x):
        if self.mode == "povm":
            return np.ascontiguousarray(isometry_from_params(x, self.n_out, self.d).conj())
        if self.d == 2:
            return bloch_vectors(x[0], x[1])
        return np.ascontiguousarray(unitary_from_params(x, self.d).T)

    def random_start(self, rng):
        if self.mode == "povm":
            return rng.standard_normal(self.n_params)
        if self.d == 2:
            z = rng.standard_normal(3)
            z /= np.linalg.norm(z)
            return np.array([np.arccos(np.clip(z[2], -1, 1)), np.arctan2(z[1], z[0])])
        return rng.uniform(-np.pi, np.pi, self.n_params)

    def informed_starts(self, rho_b):
        """Computational basis and the eigenbasis of the measured marginal."""
        if self.mode == "povm" or self.d != 2:
            return [np.zeros(self.n_params)] if self.mode != "povm" else []
        bx = 2 * rho_b[0, 1].real
        by = -2 * rho_b[0, 1].imag
        bz = (rho_b[0, 0] - rho_b[1, 1]).real
        r = np.sqrt(bx * bx + by * by + bz * bz)
        starts = [np.array([0.0, 0.0])]
        if r > 1e-8:
            starts.append(np.array([np.arccos(np.clip(bz / r, -1, 1)), np.arctan2(by, bx)]))
        return starts

    def step(self):
        return 0.6 if self.mode != "povm" else 0.4


def _maximize_holevo(ab, cfg):
    da, db = ab.dims
    s_a = von_neumann_entropy(ab.ptrace([0]), check=False)
    if db == 1:
        return OptimizationResult(0.0, Povm.computational(1), 0, 0.0)
    search = _Search(db, cfg.mode)
    r4 = _tensor4(ab)
    kernel = kernels.weighted_conditional_entropy

    def f(x):
        return kernel(r4, search.vectors(x))

    rng = np.random.default_rng(cfg.seed)
    n_restarts = cfg.n_restarts(db)
    starts = search.informed_starts(ab.ptrace([1]).op)
    optima, best_x, best_f = [], None, np.inf
    consistent = False
    for r in range(n_restarts):
        x0 = starts[r] if r < len(starts) else search.random_start(rng)
        simplex = np.vstack([x0, x0 + search.step() * np.eye(search.n_params)])
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-9,
                "fatol": cfg.tol,
                "maxiter": cfg.max_iter,
                "maxfev": 2 * cfg.max_iter,
            },
        )
        optima.append(float(res.fun))
        if res.fun < best_f:
            best_f, best_x = float(res.fun), res.x
        if len(optima) >= max(2, min(cfg.min_restarts, n_restarts)):
            low = sorted(optima)[:2]
            if low[1] - low[0] <= cfg.consistency_tol:
                consistent = True
                break
    if not consistent:
        log.warning(
            "measurement search: best two of %d local optima differ by more than %.1e",
            len(optima),
            cfg.consistency_tol,
        )
    povm = Povm.from_vectors(search.vectors(best_x))
    value = s_a - best_f
    return OptimizationResult(
        value=float(value),
        argmax=povm,
        restarts_used=len(optima),
        spread=float(max(optima) - min(optima)),
        consistent=consistent,
        optima=tuple(s_a - o for o in optima),
    )


def classical_correlation(rho, part=None, unmeasured="A", measured="B", cfg=None):
    """``J(unmeasured | measured)``: the Holevo quantity maximized over measurements."""
    cfg = cfg or OptimizerConfig()
    ab = measured_pair(rho, part, unmeasured, measured)
    report = ab.validate()
    if not report.ok:
        raise InvalidStateError(report)
    if ab.dims[1] > 4:
        raise DimensionError("measured subsystems above dimension 4 are not supported")
    return _maximize_holevo(ab, cfg)


def quantum_discord(rho, part=None, unmeasured="A", measured="B", cfg=None):
    """``D(unmeasured | measured) = I - J``; ``value`` holds the discord.

    For measured factors above dimension 2 with ``cfg.structure_shortcut``,
    states of the form ``|psi><psi|_{A B_L} (x) rho_{B_R}`` are detected from
    their entropies and the exact value ``S(A)`` is returned together with
    the measurement that attains it.
    """
    cfg = cfg or OptimizerConfig()
    ab = measured_pair(rho, part, unmeasured, measured)
    report = ab.validate()
    if not report.ok:
        raise InvalidStateError(report)
    s_a = von_neumann_entropy(ab.ptrace([0]), check=False)
    s_b = von_neumann_entropy(ab.ptrace([1]), check=False)
    s_ab = von_neumann_entropy(ab, check=False)
    mi = s_a + s_b - s_ab
    if cfg.structure_shortcut and ab.dims[1] > 2:
        shortcut = _structure_shortcut(ab, s_a)
        if shortcut is not None:
            return shortcut
    j = classical_correlation(ab, None, "A", "B", cfg)
    return replace(j, value=float(mi - j.value), optima=tuple(mi - o for o in j.optima))


def _structure_shortcut(ab, s_a):
    from .monogamy import classify_saturation, structure_extract, StructureError

    verdict = classify_saturation(ab)
    if not verdict.saturates_a_sufficient:
        return None
    try:
        witness = structure_extract(ab, mirrored=True)
    except StructureError:
        return None
    if witness.reconstruction_error > 1e-6:
        return None
    return OptimizationResult(
        value=float(s_a),
        argmax=witness.optimal_measurement(),
        restarts_used=0,
        spread=0.0,
        consistent=True,
        method="structure",
    )


def grid_oracle_qubit(rho, part=None, unmeasured="A", measured="B", n_theta=200, n_phi=100):
    """Brute-force ``J`` over an ``n_theta x n_phi`` grid of qubit projective bases.

    Kept deliberately independent of the optimizer and the compiled kernel.
    """
    ab = measured_pair(rho, part, unmeasured, measured)
    da, db = ab.dims
    if db != 2:
        raise DimensionError(f"grid oracle needs a qubit measured factor, got dimension {db}")
    r4 = ab.op.reshape(da, 2, da, 2)
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    c, s, e = np.cos(tt / 2).ravel(), np.sin(tt / 2).ravel(), np.exp(1j * pp).ravel()
    up = np.stack([c, e * s], axis=1)
    down = np.stack([-s * np.conj(e), c], axis=1)
    total = np.zeros(up.shape[0])
    for v in (up, down):
        cond = np.einsum("nb,abce,ne->nac", v.conj(), r4, v)
        p = np.einsum("naa->n", cond).real
        lam = np.linalg.eigvalsh(cond)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(p[:, None] > EPS_PROB, lam / p[:, None], 0.0)
            h = np.where(x > 1e-12, -x * np.log2(np.where(x > 1e-12, x, 1.0)), 0.0)
        total += p * h.sum(axis=1)
    s_a = entropy_from_spectrum(np.linalg.eigvalsh(ab.ptrace([0]).op))
    return float(s_a - total.min())
