"""Entanglement of formation: Wootters' closed form for two qubits and the
Koashi-Winter route ``E_F(A:E) = S(A) - J(A|B)`` for tripartite pure states.
"""

from dataclasses import dataclass

import numpy as np

from .entropy import binary_entropy, von_neumann_entropy
from .linalg import PAULI_Y, DimensionError, clamp_eigenvalues, eigh
from .measurement import OptimizerConfig, classical_correlation
from .states import DensityMatrix, Partition, PureState, subsystem

_YY = np.kron(PAULI_Y, PAULI_Y)


@dataclass(frozen=True)
class EofResult:
    value: float
    method: str
    certified: bool
    spread: float = 0.0

    def as_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "certified": self.certified,
            "spread": self.spread,
        }


def _two_qubit(rho):
    if isinstance(rho, PureState):
        rho = rho.density()
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"two-qubit state required, got dims {rho.dims}")
    return rho


def concurrence(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are square roots of the eigenvalues of
    ``rho (Y (x) Y) rho* (Y (x) Y)``, obtained here as the singular values of
    ``sqrt(rho) (Y (x) Y) sqrt(rho)*`` so no second square root amplifies
    rounding noise on rank-deficient states.
    """
    rho = _two_qubit(rho)
    w, v = eigh(rho.op)
    sq = (v * np.sqrt(clamp_eigenvalues(w))) @ v.conj().T
    lam = np.linalg.svd(sq @ _YY @ sq.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c):
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1.0 + np.sqrt(1.0 - c * c)) / 2.0)


def eof_two_qubit(rho):
    return EofResult(eof_from_concurrence(concurrence(rho)), "concurrence", True)


def eof_pure(psi):
    """Entanglement entropy of a bipartite pure state."""
    if len(psi.dims) != 2:
        raise DimensionError("eof_pure needs a bipartite pure state")
    return EofResult(von_neumann_entropy(psi.ptrace([0]), check=False), "pure_state", True)


def eof_via_koashi_winter(psi, part=None, cfg=None, a="A", b="B", e="E"):
    """``E_F(a:e) = S(a) - J(a|b)`` for a tripartite pure state on a, b, e."""
    if not isinstance(psi, PureState):
        if isinstance(psi, DensityMatrix) and psi.rank() == 1:
            w, v = eigh(psi.op)
            psi = PureState(v[:, 0], psi.dims)
        else:
            raise ValueError("Koashi-Winter route needs a pure tripartite state")
    if part is None:
        part = Partition.standard(3, "ABE")
    rho = psi.density()
    s_a = von_neumann_entropy(subsystem(rho, part, [a]), check=False)
    j = classical_correlation(rho, part, a, b, cfg or OptimizerConfig())
    return EofResult(float(s_a - j.value), "koashi_winter", False, j.spread)
