"""Discord/classical-correlation monogamy and the saturation structure of
the bound ``D(A|B) <= S(B)``.

Saturation is decided from entropies alone: ``D(A|B) = S(B)`` exactly when
``S(A) - S(B) = S(AB)``, and then ``rho_AB = rho_{A_L} (x) |phi><phi|_{A_R B}``
for some split of A. :func:`structure_extract` recovers that split.
The mirrored condition ``S(B) - S(A) = S(AB)`` gives
``rho_AB = |psi><psi|_{A B_L} (x) rho_{B_R}`` and ``D(A|B) = S(A)``.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import null_space

from .entanglement import EofResult, eof_pure, eof_two_qubit
from .entropy import entropy_report, von_neumann_entropy
from .linalg import EPS_EIG, eigh, permute_subsystems, trace_distance
from .measurement import OptimizerConfig, Povm, classical_correlation, quantum_discord
from .states import DensityMatrix, InvalidStateError, Partition, PureState, subsystem

TOL_SAT = 1e-7
TOL_STRUCTURE = 1e-7
RANK_EPS = 1e-10


class StructureError(ValueError):
    """The state does not have the product form its entropies claim."""


def _pair(rho, part, labels):
    if isinstance(rho, PureState):
        rho = rho.density()
    if part is None:
        part = Partition.standard(len(rho.dims))
    if labels is None:
        labels = part.labels[:2] if len(part.labels) == 2 else ("A", "B")
    return subsystem(rho, part, list(labels))


# -- trade-off relations ------------------------------------------------------


@dataclass(frozen=True)
class TradeoffReport:
    discord_ab: float
    classical_eb: float
    s_b: float
    spread_d: float = 0.0
    spread_j: float = 0.0

    @property
    def residual(self):
        return self.s_b - self.discord_ab

    @property
    def defect(self):
        return self.discord_ab + self.classical_eb - self.s_b

    def as_dict(self):
        return {
            "D(A|B)": self.discord_ab,
            "J(E|B)": self.classical_eb,
            "S(B)": self.s_b,
            "residual": self.residual,
            "defect": self.defect,
            "spread_d": self.spread_d,
            "spread_j": self.spread_j,
        }


def tradeoff_pure(psi, part=None, cfg=None, labels=("A", "B", "E")):
    """Evaluate both sides of ``D(A|B) + J(E|B) = S(B)`` for a pure state on A, B, E."""
    cfg = cfg or OptimizerConfig()
    if part is None:
        part = Partition.standard(3, labels)
    rho = psi.density() if isinstance(psi, PureState) else psi
    a, b, e = labels
    d = quantum_discord(rho, part, a, b, cfg)
    j = classical_correlation(rho, part, e, b, cfg)
    s_b = von_neumann_entropy(subsystem(rho, part, [b]), check=False)
    return TradeoffReport(d.value, j.value, s_b, d.spread, j.spread)


def residual_capacity(rho, part=None, cfg=None, unmeasured="A", measured="B"):
    """``S(B) - D(A|B)``: the most classical correlation B can share with anything else."""
    cfg = cfg or OptimizerConfig()
    if isinstance(rho, PureState):
        rho = rho.density()
    if part is None:
        part = Partition.standard(len(rho.dims))
    s_b = von_neumann_entropy(subsystem(rho, part, [measured]), check=False)
    d = quantum_discord(rho, part, unmeasured, measured, cfg)
    return float(s_b - d.value)


@dataclass(frozen=True)
class InequalityReport:
    discord_ab: float
    classical_cb: float
    s_b: float
    spread_d: float = 0.0
    spread_j: float = 0.0

    @property
    def lhs(self):
        return self.discord_ab + self.classical_cb

    @property
    def rhs(self):
        return self.s_b

    @property
    def slack(self):
        return self.rhs - self.lhs

    def as_dict(self):
        return {
            "D(A|B)": self.discord_ab,
            "J(C|B)": self.classical_cb,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "spread_d": self.spread_d,
            "spread_j": self.spread_j,
        }


def tripartite_inequality(rho, part=None, cfg=None, labels=("A", "B", "C")):
    """``D(A|B) + J(C|B) <= S(B)`` for any (possibly mixed) state on A, B, C."""
    cfg = cfg or OptimizerConfig()
    if isinstance(rho, PureState):
        rho = rho.density()
    if part is None:
        part = Partition.standard(3, labels)
    a, b, c = labels
    d = quantum_discord(rho, part, a, b, cfg)
    j = classical_correlation(rho, part, c, b, cfg)
    s_b = von_neumann_entropy(subsystem(rho, part, [b]), check=False)
    return InequalityReport(d.value, j.value, s_b, d.spread, j.spread)


# -- saturation ---------------------------------------------------------------


@dataclass(frozen=True)
class SaturationVerdict:
    case: str
    entropy_gaps: tuple
    tolerance_used: float
    saturates_b: bool = False
    saturates_a_sufficient: bool = False

    def as_dict(self):
        return {
            "case": self.case,
            "gap_b": self.entropy_gaps[0],
            "gap_a": self.entropy_gaps[1],
            "saturates_b": self.saturates_b,
            "saturates_a_sufficient": self.saturates_a_sufficient,
            "tol_sat": self.tolerance_used,
        }


def classify_saturation(rho, part=None, tol_sat=TOL_SAT, labels=None):
    """Decide saturation of ``D(A|B) <= S(B)`` (and the mirrored sufficient
    condition for ``D(A|B) = S(A)``) from the three entropies alone."""
    ent = entropy_report(_pair(rho, part, labels))
    gap_b = ent.s_a - ent.s_b - ent.s_ab
    gap_a = ent.s_b - ent.s_a - ent.s_ab
    sat_b = abs(gap_b) <= tol_sat
    sat_a = abs(gap_a) <= tol_sat
    case = "saturates_b" if sat_b else "saturates_a_sufficient" if sat_a else "neither"
    return SaturationVerdict(case, (gap_b, gap_a), tol_sat, sat_b, sat_a)


@dataclass(frozen=True, eq=False)
class StructureWitness:
    """``rho = (V (x) I)(rho_L (x) |phi><phi|)(V (x) I)^dagger``.

    Without ``mirrored`` the split side is A and ``phi`` lives on ``A_R (x) B``.
    With ``mirrored`` the split side is B, ``rho = |phi><phi| (x) rho_{B_R}``
    up to ``V`` on B, and ``phi`` is reported on ``A (x) B_L``.
    """

    rho_l: DensityMatrix
    phi: PureState
    embedding: np.ndarray
    reconstruction_error: float
    mirrored: bool = False
    complete: bool = True
    dims: tuple = ()
    notes: tuple = field(default=(), repr=False)

    @property
    def d_l(self):
        return self.rho_l.dim

    @property
    def d_r(self):
        return self.phi.dims[1] if self.mirrored else self.phi.dims[0]

    def reconstruct(self):
        """Rebuild the bipartite operator in the original (A, B) order."""
        phi_split = self._phi_split_order()
        core = np.kron(self.rho_l.op, np.outer(phi_split, phi_split.conj()))
        d_other = self.dims[0] if self.mirrored else self.dims[1]
        big = np.kron(self.embedding, np.eye(d_other))
        op = big @ core @ big.conj().T
        if self.mirrored:
            op, _ = permute_subsystems(op, (self.dims[1], self.dims[0]), [1, 0])
        return op

    def _phi_split_order(self):
        """``phi`` as a vector on (split-side R factor) (x) (other side)."""
        if not self.mirrored:
            return self.phi.vec
        d_a, d_r = self.phi.dims
        return self.phi.vec.reshape(d_a, d_r).T.reshape(-1)

    def optimal_measurement(self):
        """Measurement on B attaining ``D(A|B) = S(A)`` in the mirrored case.

        Projects onto the Schmidt basis of ``phi`` on B_L, trivially on B_R;
        any part of B outside the embedding gets one extra element.
        """
        if not self.mirrored:
            raise ValueError("optimal_measurement is defined for the mirrored form only")
        d_l, d_r = self.d_l, self.d_r
        d_b = self.embedding.shape[0]
        d_a = self.phi.dims[0]
        m = self.phi.vec.reshape(d_a, d_r)
        _, _, vh = np.linalg.svd(m)
        schmidt = vh.T  # columns: Schmidt vectors on B_L
        elements = []
        for k in range(d_r):
            proj = np.kron(np.eye(d_l), np.outer(schmidt[:, k], schmidt[:, k].conj()))
            elements.append(self.embedding @ proj @ self.embedding.conj().T)
        rest = np.eye(d_b) - sum(elements)
        if np.linalg.norm(rest) > 1e-9:
            elements.append(0.5 * (rest + rest.conj().T))
        return Povm(tuple(0.5 * (e + e.conj().T) for e in elements))

    def pure_factor_eof(self):
        phi = self.phi
        if phi.dims == (2, 2):
            return eof_two_qubit(phi)
        return eof_pure(phi)


def structure_extract(rho, part=None, mirrored=False, tol=TOL_STRUCTURE, labels=None):
    """Recover ``rho_{A_L} (x) |phi><phi|_{A_R B}`` and the embedding of A_L A_R into A.

    With ``mirrored=True`` the roles swap and B is split instead. Raises
    :class:`StructureError` with the offending pair when the cross-trace test
    fails.
    """
    ab = _pair(rho, part, labels)
    report = ab.validate()
    if not report.ok:
        raise InvalidStateError(report)
    dims = ab.dims
    op = ab.op
    if mirrored:
        op, _ = permute_subsystems(op, dims, [1, 0])
        d_x, d_y = dims[1], dims[0]
    else:
        d_x, d_y = dims
    notes = []

    # (1) spectral decomposition of the joint state
    w, v = eigh(op)
    r = int(np.count_nonzero(w > RANK_EPS))
    p = w[:r] / w[:r].sum()
    blocks = [v[:, i].reshape(d_x, d_y) for i in range(r)]

    # (2) Tr_X |e_i><e_j| = delta_ij sigma for a common sigma on Y
    sigma = blocks[0].T @ blocks[0].conj()
    for i in range(r):
        for j in range(r):
            cross = blocks[i].T @ blocks[j].conj()
            target = sigma if i == j else 0.0
            dev = float(np.linalg.norm(cross - target))
            if dev > tol:
                raise StructureError(
                    f"cross-trace test failed for eigenvector pair ({i}, {j}): deviation {dev:.2e}"
                )

    # (3) canonical phi on X_R (x) Y purifying sigma
    s, b = eigh(sigma)
    d_r = int(np.count_nonzero(s > RANK_EPS))
    s = s[:d_r] / s[:d_r].sum()
    b = b[:, :d_r]
    phi_mat = np.sqrt(s)[:, None] * b.T  # phi[k, y] = sqrt(s_k) b_k[y]
    if r * d_r > d_x:
        raise StructureError(f"d_L * d_R = {r * d_r} exceeds dimension {d_x} of the split side")

    # (4) maps M_i : X_R -> X with columns E_i conj(b_k) / sqrt(s_k)
    maps = [blk @ b.conj() / np.sqrt(s) for blk in blocks]
    for i in range(r):
        for j in range(r):
            gram = maps[i].conj().T @ maps[j]
            target = np.eye(d_r) if i == j else np.zeros((d_r, d_r))
            dev = float(np.linalg.norm(gram - target))
            if dev > max(tol, 1e-6):
                raise StructureError(f"maps {i}, {j} are not orthonormal: deviation {dev:.2e}")

    # (5) embedding, completed to a unitary when the dimensions allow it
    emb = np.hstack(maps)
    d_l = r
    complete = r * d_r == d_x
    if not complete and d_x % d_r == 0:
        extra = null_space(emb.conj().T)
        emb = np.hstack([emb, extra[:, : d_x - r * d_r]])
        d_l = d_x // d_r
        complete = True
        notes.append("embedding completed to a unitary")
    elif not complete:
        notes.append("isometric embedding only: split side is not A_L (x) A_R")
    rho_l = np.zeros((d_l, d_l), dtype=complex)
    rho_l[:r, :r] = np.diag(p)

    if mirrored:
        phi = PureState.normalized(phi_mat.T.reshape(-1), (d_y, d_r))
    else:
        phi = PureState.normalized(phi_mat.reshape(-1), (d_r, d_y))
    witness = StructureWitness(
        rho_l=DensityMatrix(rho_l, (d_l,)),
        phi=phi,
        embedding=emb,
        reconstruction_error=0.0,
        mirrored=mirrored,
        complete=complete,
        dims=dims,
        notes=tuple(notes),
    )
    err = trace_distance(witness.reconstruct(), ab.op)
    return StructureWitness(
        rho_l=witness.rho_l,
        phi=phi,
        embedding=emb,
        reconstruction_error=err,
        mirrored=mirrored,
        complete=complete,
        dims=dims,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class EqualityChainReport:
    discord_ab: float
    discord_ba: float
    eof: EofResult
    s_a: float
    s_bl: float
    spread_ab: float = 0.0
    spread_ba: float = 0.0

    def values(self):
        return {
            "D(A|B)": self.discord_ab,
            "D(B|A)": self.discord_ba,
            "E_F(A:B)": self.eof.value,
            "S(A)": self.s_a,
            "S(B_L)": self.s_bl,
        }

    @property
    def max_deviation(self):
        vals = list(self.values().values())
        return float(max(vals) - min(vals))

    def as_dict(self):
        out = dict(self.values())
        out["max_deviation"] = self.max_deviation
        out["eof_method"] = self.eof.method
        out["spread_ab"] = self.spread_ab
        out["spread_ba"] = self.spread_ba
        return out


def equality_chain_check(rho, part=None, cfg=None, tol_sat=TOL_SAT, labels=None):
    """Evaluate ``D(A|B), D(B|A), E_F(A:B), S(A), S(B_L)`` for a state
    ``|psi><psi|_{A B_L} (x) rho_{B_R}``; all five should agree."""
    cfg = cfg or OptimizerConfig()
    ab = _pair(rho, part, labels)
    verdict = classify_saturation(ab, tol_sat=tol_sat)
    if not verdict.saturates_a_sufficient:
        raise StructureError(f"state is not in the mirrored saturation regime ({verdict.case})")
    witness = structure_extract(ab, mirrored=True)
    d_ab = quantum_discord(ab, None, "A", "B", cfg)
    d_ba = quantum_discord(ab, None, "B", "A", cfg)
    s_a = von_neumann_entropy(ab.ptrace([0]), check=False)
    s_bl = von_neumann_entropy(witness.phi.ptrace([1]), check=False)
    return EqualityChainReport(
        d_ab.value, d_ba.value, witness.pure_factor_eof(), s_a, s_bl, d_ab.spread, d_ba.spread
    )


# -- two-qubit strictness ------------------------------------------------------


def near_pure_two_qubit(seed, eps=1e-3):
    """Rank-2 state ``(1-eps)|u><u| + eps|v><v|`` with a random orthonormal pair."""
    from .linalg import random_unitary

    rng = np.random.default_rng(seed)
    u = random_unitary(4, rng)
    op = (1 - eps) * np.outer(u[:, 0], u[:, 0].conj()) + eps * np.outer(u[:, 1], u[:, 1].conj())
    return DensityMatrix(0.5 * (op + op.conj().T), (2, 2))


@dataclass(frozen=True)
class StrictnessScan:
    rows: tuple
    skipped: int
    flag_threshold: float

    @property
    def min_gap_b(self):
        return min(r["gap_b"] for r in self.rows)

    @property
    def min_gap_a(self):
        return min(r["gap_a"] for r in self.rows)

    @property
    def flagged(self):
        return tuple(
            r["seed"] for r in self.rows if min(r["gap_a"], r["gap_b"]) < self.flag_threshold
        )

    def histogram(self, bins=10):
        gaps = np.array([min(r["gap_a"], r["gap_b"]) for r in self.rows])
        counts, edges = np.histogram(gaps, bins=bins)
        return counts.tolist(), edges.tolist()

    def as_dict(self):
        counts, edges = self.histogram()
        return {
            "samples": len(self.rows),
            "skipped": self.skipped,
            "min_gap_b": self.min_gap_b,
            "min_gap_a": self.min_gap_a,
            "flagged": list(self.flagged),
            "histogram": {"counts": counts, "edges": edges},
        }


def strictness_row(rho, seed, cfg):
    ent = entropy_report(rho)
    d_ab = quantum_discord(rho, None, "A", "B", cfg)
    d_ba = quantum_discord(rho, None, "B", "A", cfg)
    return {
        "seed": seed,
        "s_a": ent.s_a,
        "s_b": ent.s_b,
        "discord_ab": d_ab.value,
        "discord_ba": d_ba.value,
        "gap_b": ent.s_b - d_ab.value,
        "gap_a": ent.s_a - d_ba.value,
        "spread": max(d_ab.spread, d_ba.spread),
    }


def two_qubit_strictness_scan(
    n_samples, seed=0, cfg=None, ensemble="full_rank", flag_threshold=1e-4, near_pure_eps=1e-3
):
    """Measure ``S(B) - D(A|B)`` and ``S(A) - D(B|A)`` over random mixed two-qubit states.

    ``ensemble="full_rank"`` draws rank-4 induced-measure states and drops
    anything whose numerical rank is lower; ``"near_pure"`` draws rank-2
    states with smallest eigenvalue ``near_pure_eps``.
    """
    cfg = cfg or OptimizerConfig()
    rows, skipped = [], 0
    for i in range(n_samples):
        s = seed + i
        if ensemble == "full_rank":
            rho = _random_two_qubit(s)
            if rho.rank() < 4:
                skipped += 1
                continue
        elif ensemble == "near_pure":
            rho = near_pure_two_qubit(s, near_pure_eps)
        else:
            raise ValueError(f"unknown ensemble {ensemble!r}")
        row_cfg = replace(cfg, seed=s)
        rows.append(strictness_row(rho, s, row_cfg))
    return StrictnessScan(tuple(rows), skipped, flag_threshold)


def _random_two_qubit(seed):
    from .states import random_density

    return random_density((2, 2), 4, seed)
