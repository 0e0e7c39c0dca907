"""Von Neumann entropy (bits), mutual information and the Araki-Lieb gap."""

from dataclasses import dataclass

import numpy as np

from .linalg import EPS_EIG, eigvalsh
from .states import DensityMatrix, InvalidStateError, Partition, PureState, subsystem


def entropy_from_spectrum(w, eps=EPS_EIG):
    """``-sum w log2 w`` with eigenvalues below ``eps`` dropped."""
    w = np.asarray(w, dtype=float)
    w = w[w >= eps]
    if w.size == 0:
        return 0.0
    s = float(-np.sum(w * np.log2(w)))
    return abs(s) if s == 0.0 else s


def binary_entropy(p, eps=EPS_EIG):
    return entropy_from_spectrum([p, 1.0 - p], eps)


def von_neumann_entropy(rho, check=True):
    """Entropy in bits of a density matrix (or raw Hermitian array)."""
    if isinstance(rho, PureState):
        return 0.0
    if isinstance(rho, DensityMatrix):
        if check:
            report = rho.validate()
            if not report.ok:
                raise InvalidStateError(report)
        rho = rho.op
    return entropy_from_spectrum(eigvalsh(rho))


def _bipartite(rho, part, labels):
    if isinstance(rho, PureState):
        rho = rho.density()
    if part is None:
        if len(rho.dims) != 2:
            raise ValueError("a partition is required for states with more than two factors")
        part = Partition.standard(2)
    if labels is None:
        if len(part.labels) != 2:
            raise ValueError("name the two subsystems for a multipartite partition")
        labels = part.labels
    return subsystem(rho, part, list(labels))


@dataclass(frozen=True)
class EntropyReport:
    s_a: float
    s_b: float
    s_ab: float

    @property
    def mutual_information(self):
        return self.s_a + self.s_b - self.s_ab

    @property
    def araki_lieb_gap(self):
        return self.s_ab - abs(self.s_a - self.s_b)

    def as_dict(self):
        return {
            "S(A)": self.s_a,
            "S(B)": self.s_b,
            "S(AB)": self.s_ab,
            "I(A:B)": self.mutual_information,
            "araki_lieb_gap": self.araki_lieb_gap,
        }


def entropy_report(rho, part=None, labels=None):
    """Marginal and joint entropies of a bipartition ``labels = (A, B)``."""
    ab = _bipartite(rho, part, labels)
    report = ab.validate()
    if not report.ok:
        raise InvalidStateError(report)
    return EntropyReport(
        s_a=von_neumann_entropy(ab.ptrace([0]), check=False),
        s_b=von_neumann_entropy(ab.ptrace([1]), check=False),
        s_ab=von_neumann_entropy(ab, check=False),
    )


def mutual_information(rho, part=None, labels=None):
    return entropy_report(rho, part, labels).mutual_information


def araki_lieb_gap(rho, part=None, labels=None):
    """``S(AB) - |S(A) - S(B)|``; zero marks the Araki-Lieb equality regime."""
    return entropy_report(rho, part, labels).araki_lieb_gap
