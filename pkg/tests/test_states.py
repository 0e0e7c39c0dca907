import numpy as np
import pytest

from qcorr.linalg import EPS_EIG, eigh
from qcorr.states import (
    DensityMatrix,
    InvalidStateError,
    Partition,
    PureState,
    constructed_saturating_state,
    purify,
    random_density,
    random_pure,
    subsystem,
    validate,
)


def test_validate_maximally_mixed():
    assert validate(np.eye(4) / 4, (2, 2)).ok


def test_validate_reports_trace_and_positivity():
    report = validate(np.diag([2.0, -1.0]) / 1)
    assert not report.ok
    assert report.names() == {"positivity"}
    mags = {v.invariant: v.magnitude for v in report.violations}
    assert mags["positivity"] == pytest.approx(1.0)


def test_validate_trace_violation_magnitude():
    report = validate(np.diag([2.0, -0.5]))
    mags = {v.invariant: v.magnitude for v in report.violations}
    assert mags == {"trace": pytest.approx(0.5), "positivity": pytest.approx(0.5)}


def test_validate_hermiticity():
    report = validate(np.array([[0.5, 0.3], [0.0, 0.5]]))
    assert "hermitian" in report.names()


def test_validate_paper(paper):
    assert paper.validate().ok
    assert paper.dims == (2, 4)


def test_paper_state_matches_construction(paper):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    built = np.kron(np.outer(phi, phi), np.eye(2) / 2)
    assert np.abs(paper.op - built).max() < 1e-15
    assert set(np.unique(paper.op.real)) == {0.0, 0.25}
    assert np.trace(paper.op) == 1


def test_paper_reduced_states(paper):
    assert np.allclose(paper.ptrace([1]).op, np.eye(4) / 4)
    assert np.allclose(paper.ptrace([0]).op, np.eye(2) / 2)
    assert np.allclose(paper.spectrum(), [0.5, 0.5, 0, 0, 0, 0, 0, 0], atol=1e-12)


def test_checked_raises():
    with pytest.raises(InvalidStateError):
        DensityMatrix.checked(np.diag([2.0, -1.0]), (2,))


def test_purify_pure_projector():
    psi = random_pure((2, 2), 3)
    pur = purify(psi.density())
    assert pur.dims == (2, 2, 1)
    # |psi> (x) |0>_E up to a global phase
    overlap = abs(np.vdot(pur.vec, psi.vec))
    assert overlap == pytest.approx(1.0)


def test_purify_maximally_mixed_qubit():
    rho = DensityMatrix(np.eye(2) / 2, (2,))
    pur = purify(rho)
    assert pur.dims == (2, 2)
    # (|00> + |11>)/sqrt(2) written in the eigenbasis eigh returns
    v = eigh(rho.op)[1]
    expected = sum(np.kron(v[:, k], np.eye(2)[k]) for k in range(2)) / np.sqrt(2)
    assert np.allclose(pur.vec, expected)
    assert np.allclose(pur.ptrace([1]).op, np.eye(2) / 2)


def test_purify_paper_rank_two(paper):
    pur = purify(paper)
    assert pur.dims == (2, 4, 2)
    assert np.allclose(pur.ptrace([0, 1]).op, paper.op, atol=1e-9)


def test_purify_coefficients_canonical():
    rho = random_density((2, 2), 3, 11)
    pur = purify(rho)
    w = eigh(rho.op)[0][:3]
    coeffs = pur.vec.reshape(4, 3)
    norms = np.linalg.norm(coeffs, axis=0)
    assert np.allclose(norms, np.sqrt(w / w.sum()), atol=1e-12)


@pytest.mark.parametrize("dims,rank", [((2, 2), 1), ((2, 2), 3), ((2, 3), 6), ((2, 2, 2), 2)])
def test_purification_property(dims, rank):
    for seed in range(25):
        rho = random_density(dims, rank, seed)
        pur = purify(rho)
        keep = list(range(len(dims)))
        assert np.linalg.norm(pur.ptrace(keep).op - rho.op) <= 1e-9
        expected_rank = int(np.count_nonzero(eigh(rho.op)[0] >= EPS_EIG))
        assert pur.dims[-1] == expected_rank == rank


def test_random_pure_reproducible():
    a, b = random_pure((2, 2), 7), random_pure((2, 2), 7)
    assert np.array_equal(a.vec, b.vec)
    assert np.linalg.norm(a.vec) == pytest.approx(1.0)
    assert not np.array_equal(a.vec, random_pure((2, 2), 8).vec)


def test_random_pure_bloch_uniform():
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1, -1])
    mean = np.zeros(3)
    n = 10_000
    for seed in range(n):
        v = random_pure((2,), seed).vec
        mean += [np.vdot(v, op @ v).real for op in (sx, sy, sz)]
    assert np.all(np.abs(mean / n) < 0.05)


def test_random_density_rank_one_is_pure():
    rho = random_density((2, 2), 1, 5)
    assert np.allclose(rho.op @ rho.op, rho.op)


def test_random_density_full_rank():
    for seed in range(50):
        rho = random_density((2, 2), 4, seed)
        assert eigh(rho.op)[0][-1] > 0


def test_random_density_determinism_and_range():
    assert np.array_equal(random_density((2, 3), 2, 1).op, random_density((2, 3), 2, 1).op)
    with pytest.raises(ValueError):
        random_density((2, 2), 5, 0)
    with pytest.raises(ValueError):
        random_density((2, 2), 0, 0)


@pytest.mark.parametrize("dims", [(2, 2), (2, 4), (2, 2, 2)])
def test_random_density_validates(dims):
    d = int(np.prod(dims))
    for seed in range(10_000):
        rank = 1 + seed % d
        assert random_density(dims, rank, seed).validate().ok


def test_pure_state_norm_checked():
    with pytest.raises(ValueError):
        PureState(np.array([1.0, 1.0]), (2,))


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition(("A", "B"), ((0,), (0,)))
    with pytest.raises(ValueError):
        Partition(("A", "B"), ((0,), (2,)))
    part = Partition(("A", "B"), ((0, 2), (1,)))
    assert part.dim((2, 3, 4), "A") == 8


def test_subsystem_groups_and_orders():
    rho = random_density((2, 3, 2), 3, 2)
    part = Partition(("A", "B"), ((0, 2), (1,)))
    ba = subsystem(rho, part, ["B", "A"])
    assert ba.dims == (3, 4)
    assert np.allclose(ba.ptrace([0]).op, rho.ptrace([1]).op)
    assert np.allclose(ba.ptrace([1]).op, rho.ptrace([0, 2]).op)


def test_constructed_state_is_valid():
    rho, parts = constructed_saturating_state(2, 2, 2, 0)
    assert rho.validate().ok
    assert rho.dims == (4, 2)
