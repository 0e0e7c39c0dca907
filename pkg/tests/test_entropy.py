import numpy as np
import pytest

from qcorr.entropy import (
    araki_lieb_gap,
    binary_entropy,
    entropy_report,
    mutual_information,
    von_neumann_entropy,
)
from qcorr.linalg import random_unitary
from qcorr.states import DensityMatrix, Partition, purify, random_density, random_pure, subsystem


def test_pure_state_entropy_zero():
    assert von_neumann_entropy(random_pure((2, 3), 0).density()) == pytest.approx(0, abs=1e-10)


@pytest.mark.parametrize("d,bits", [(2, 1.0), (4, 2.0), (8, 3.0)])
def test_maximally_mixed(d, bits):
    assert von_neumann_entropy(DensityMatrix(np.eye(d) / d, (d,))) == pytest.approx(bits)


def test_binary_entropy_matches_formula():
    for p in (0.1, 0.25, 0.5):
        assert binary_entropy(p) == pytest.approx(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
    assert binary_entropy(0.0) == 0.0


def test_paper_entropies(paper):
    rep = entropy_report(paper)
    assert rep.s_ab == pytest.approx(1, abs=1e-9)
    assert rep.s_a == pytest.approx(1, abs=1e-9)
    assert rep.s_b == pytest.approx(2, abs=1e-9)
    assert rep.mutual_information == pytest.approx(2, abs=1e-9)
    assert rep.araki_lieb_gap == pytest.approx(0, abs=1e-9)


def test_product_mi_zero(product):
    rho, _, _ = product
    assert mutual_information(rho) == pytest.approx(0, abs=1e-10)


def test_bell_mi(bell):
    assert mutual_information(bell) == pytest.approx(2)
    assert araki_lieb_gap(bell) == pytest.approx(0, abs=1e-10)


def test_araki_lieb_maximally_mixed():
    assert araki_lieb_gap(DensityMatrix(np.eye(4) / 4, (2, 2))) == pytest.approx(2)


def test_pure_mi_twice_marginal():
    psi = random_pure((3, 2), 4)
    rep = entropy_report(psi.density())
    assert rep.mutual_information == pytest.approx(2 * rep.s_a, abs=1e-9)
    assert rep.araki_lieb_gap == pytest.approx(0, abs=1e-9)


def test_report_with_labels():
    rho = random_density((2, 2, 2), 3, 0)
    part = Partition.standard(3)
    rep = entropy_report(rho, part, ("C", "A"))
    assert rep.s_a == pytest.approx(von_neumann_entropy(rho.ptrace([2])))
    assert rep.s_ab == pytest.approx(von_neumann_entropy(rho.ptrace([0, 2])))


def test_unitary_invariance():
    rng = np.random.default_rng(0)
    for seed in range(20):
        rho = random_density((2, 3), 4, seed)
        u = random_unitary(6, rng)
        rotated = DensityMatrix(u @ rho.op @ u.conj().T, rho.dims)
        assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) <= 1e-9


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (2, 4)])
def test_subadditivity_and_araki_lieb(dims):
    d = int(np.prod(dims))
    for seed in range(1000):
        rep = entropy_report(random_density(dims, 1 + seed % d, seed))
        assert rep.mutual_information >= -1e-9
        assert rep.araki_lieb_gap >= -1e-9
        assert min(rep.s_a, rep.s_b, rep.s_ab) >= -1e-9


def test_purification_complementarity():
    part = Partition.standard(3, "ABE")
    for seed in range(50):
        rho = random_density((2, 3), 1 + seed % 6, seed)
        pur = purify(rho).density()
        s = lambda labels: von_neumann_entropy(subsystem(pur, part, labels))
        assert abs(s(["E"]) - s(["A", "B"])) <= 1e-9
        assert abs(s(["A"]) - s(["E", "B"])) <= 1e-9
