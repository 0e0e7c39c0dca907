import numpy as np
import pytest
from scipy.optimize import minimize

from qcorr.entanglement import (
    concurrence,
    eof_from_concurrence,
    eof_pure,
    eof_two_qubit,
    eof_via_koashi_winter,
)
from qcorr.entropy import binary_entropy, von_neumann_entropy
from qcorr.linalg import DimensionError, eigh, permute_subsystems
from qcorr.measurement import OptimizerConfig, classical_correlation
from qcorr.states import (
    DensityMatrix,
    Partition,
    PureState,
    bell_state,
    product_state,
    purify,
    random_density,
    random_pure,
    subsystem,
)


def _pure_entanglement(vec):
    p = np.vdot(vec, vec).real
    if p < 1e-14:
        return 0.0, 0.0
    m = vec.reshape(2, 2) / np.sqrt(p)
    s = np.linalg.svd(m, compute_uv=False) ** 2
    return p, binary_entropy(s[0])


def brute_force_eof_rank2(rho, grid=120):
    """Minimize the average entanglement over two-element pure decompositions
    psi_i = sum_j U_ij sqrt(l_j) e_j, U a 2 x 2 unitary (angle t, phase a)."""
    w, v = eigh(rho.op)
    e = v[:, :2] * np.sqrt(w[:2])

    def avg(x):
        t, a = x
        u = np.array([[np.cos(t), np.exp(1j * a) * np.sin(t)], [-np.sin(t), np.exp(1j * a) * np.cos(t)]])
        total = 0.0
        for row in u:
            p, h = _pure_entanglement(e @ row)
            total += p * h
        return total

    ts = np.linspace(0, np.pi, grid)
    as_ = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    best = min(((avg((t, a)), (t, a)) for t in ts for a in as_))
    res = minimize(avg, best[1], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
    return min(best[0], res.fun)


def test_bell_concurrence():
    bell = bell_state().density()
    assert concurrence(bell) == pytest.approx(1.0)
    assert eof_two_qubit(bell).value == pytest.approx(1.0)
    assert eof_two_qubit(bell).certified


def test_product_pure_concurrence():
    psi = PureState.normalized(np.kron([1, 1j], [0.3, 1]), (2, 2))
    assert concurrence(psi) == pytest.approx(0, abs=1e-7)


def test_separable_mixture_eof_zero():
    rho = DensityMatrix(0.5 * np.diag([1, 0, 0, 0]) + 0.5 * np.diag([0, 0, 0, 1]), (2, 2))
    assert eof_two_qubit(rho).value == pytest.approx(0, abs=1e-12)


def test_wrong_dims():
    with pytest.raises(DimensionError):
        concurrence(random_density((2, 3), 2, 0))


def test_pure_state_concurrence_matches_entropy():
    for seed in range(10):
        psi = random_pure((2, 2), seed)
        assert eof_two_qubit(psi).value == pytest.approx(eof_pure(psi).value, abs=1e-7)


def test_concurrence_vs_brute_force_rank2():
    for seed in range(4):
        rho = random_density((2, 2), 2, seed)
        assert abs(eof_two_qubit(rho).value - brute_force_eof_rank2(rho)) <= 1e-3


def test_eof_symmetry():
    for seed in range(20):
        rho = random_density((2, 2), 1 + seed % 4, seed)
        swapped, _ = permute_subsystems(rho.op, (2, 2), [1, 0])
        assert abs(concurrence(rho) - concurrence(DensityMatrix(swapped, (2, 2)))) <= 1e-9


def test_eof_from_concurrence_range():
    assert eof_from_concurrence(0.0) == 0.0
    assert eof_from_concurrence(1.0) == pytest.approx(1.0)


def test_kw_decoupled_b():
    phi_ae = random_pure((2, 2), 1).vec
    b = np.array([1, 0])
    # order A, B, E
    vec = np.einsum("ae,b->abe", phi_ae.reshape(2, 2), b).reshape(-1)
    psi = PureState(vec, (2, 2, 2))
    s_a = von_neumann_entropy(psi.ptrace([0]))
    res = eof_via_koashi_winter(psi, cfg=OptimizerConfig(seed=0))
    assert res.value == pytest.approx(s_a, abs=1e-6)
    assert not res.certified and res.method == "koashi_winter"


def test_kw_decoupled_e():
    phi_ab = random_pure((2, 2), 2)
    psi = PureState(np.kron(phi_ab.vec, [1, 0]), (2, 2, 2))
    assert eof_via_koashi_winter(psi, cfg=OptimizerConfig(seed=0)).value == pytest.approx(0, abs=1e-6)


def test_kw_matches_concurrence_and_reordered():
    part = Partition.standard(3, "ABE")
    for seed in range(20):
        psi = random_pure((2, 2, 2), seed)
        rho = psi.density()
        cfg = OptimizerConfig(seed=seed)
        exact = eof_two_qubit(subsystem(rho, part, ["A", "E"])).value
        assert abs(eof_via_koashi_winter(psi, part, cfg).value - exact) <= 2e-3
        # E_F(E:A) + J(E|B) = S(E)
        j_eb = classical_correlation(rho, part, "E", "B", cfg).value
        s_e = von_neumann_entropy(subsystem(rho, part, ["E"]))
        assert abs(exact + j_eb - s_e) <= 2e-3


def test_kw_rejects_mixed():
    with pytest.raises(ValueError):
        eof_via_koashi_winter(random_density((2, 2, 2), 2, 0))


def test_kw_accepts_rank_one_density():
    rho = purify(random_density((2, 2), 2, 3)).density()
    res = eof_via_koashi_winter(rho, cfg=OptimizerConfig(seed=0))
    exact = eof_two_qubit(rho.ptrace([0, 2])).value
    assert res.value == pytest.approx(exact, abs=2e-3)
