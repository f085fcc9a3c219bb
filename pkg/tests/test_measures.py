import numpy as np
import pytest

from biphoton.jones import bell_state
from biphoton.linalg import partial_trace, partial_transpose
from biphoton.measures import (
    concurrence,
    entanglement_report,
    fidelity,
    linear_entropy,
    log_negativity,
    renyi2_subsystem,
    tangle_and_eof,
    von_neumann_entropy,
)

from conftest import random_density_matrix, random_pure_state, random_unitary


def bell_rho(phi=0.0):
    psi = bell_state(phi)
    return np.outer(psi, psi.conj())


def product_rho():
    hv = np.zeros((4, 4), dtype=complex)
    hv[1, 1] = 1.0
    return hv


def test_fidelity_self_is_one():
    rng = np.random.default_rng(1)
    for _ in range(20):
        rho = random_density_matrix(rng)
        assert abs(fidelity(rho, rho) - 1.0) < 1e-9


def test_fidelity_orthogonal_bell_states():
    assert fidelity(bell_rho(0.0), bell_rho(np.pi)) < 1e-9


def test_fidelity_published_vs_bell(published_rho):
    f = fidelity(published_rho, bell_rho(0.0))
    assert abs(f - 0.918) < 5e-3
    # direct pure-target evaluation agrees with the Uhlmann form
    psi = bell_state(0.0)
    direct = float(np.real(psi.conj() @ published_rho @ psi))
    assert abs(f - direct) < 1e-7


def test_fidelity_symmetric_and_pure_overlap():
    rng = np.random.default_rng(2)
    for _ in range(20):
        r1 = random_density_matrix(rng, rank=2)
        r2 = random_density_matrix(rng)
        assert abs(fidelity(r1, r2) - fidelity(r2, r1)) < 1e-9
    for _ in range(20):
        v, w = random_pure_state(rng), random_pure_state(rng)
        f = fidelity(np.outer(v, v.conj()), np.outer(w, w.conj()))
        assert abs(f - abs(v.conj() @ w) ** 2) < 1e-9


def test_von_neumann_values(published_rho):
    assert abs(von_neumann_entropy(published_rho) - 0.353) < 5e-3
    assert von_neumann_entropy(bell_rho()) < 1e-9
    assert abs(von_neumann_entropy(np.eye(4) / 4) - 2.0) < 1e-12


def test_linear_entropy_values(published_rho):
    assert abs(linear_entropy(published_rho) - 0.167) < 5e-3
    assert abs(linear_entropy(bell_rho())) < 1e-12
    assert abs(linear_entropy(np.eye(4) / 4) - 1.0) < 1e-12


def test_concurrence_published(published_rho):
    c, r = concurrence(published_rho)
    assert abs(c - 0.876) < 5e-3
    assert np.allclose(r, [0.93, 0.054, 0.0, 0.0], atol=5e-3)
    assert np.all(np.diff(r) <= 0)


def test_concurrence_extremes():
    for phi in (0.0, 1.0, np.pi):
        c, _ = concurrence(bell_rho(phi))
        assert abs(c - 1.0) < 1e-9
    c, _ = concurrence(np.eye(4) / 4)
    assert c == 0.0


def test_tangle_and_eof():
    t, e = tangle_and_eof(0.876)
    assert abs(t - 0.767) < 1e-2
    assert abs(e - 0.825) < 1e-2
    assert tangle_and_eof(1.0) == (1.0, 1.0)
    assert tangle_and_eof(0.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        tangle_and_eof(1.5)


def test_renyi2_values(published_rho):
    assert abs(renyi2_subsystem(published_rho, "A") - 0.684) < 0.02
    assert abs(renyi2_subsystem(bell_rho(), "A") - np.log(2)) < 1e-12
    assert renyi2_subsystem(product_rho(), "A") < 1e-12


def test_log_negativity_values(published_rho):
    assert abs(log_negativity(published_rho) - 0.898) < 0.01
    assert abs(log_negativity(bell_rho()) - 1.0) < 1e-9
    assert log_negativity(product_rho()) == 0.0


def test_tangle_equals_concurrence_squared():
    rng = np.random.default_rng(6)
    for _ in range(50):
        c, _ = concurrence(random_density_matrix(rng, rank=2))
        t, _ = tangle_and_eof(c)
        assert t == c * c


def test_local_unitary_invariance():
    rng = np.random.default_rng(9)
    for _ in range(25):
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rotated = u @ rho @ u.conj().T
        c0, _ = concurrence(rho)
        c1, _ = concurrence(rotated)
        assert abs(c0 - c1) < 1e-8
        assert abs(log_negativity(rho) - log_negativity(rotated)) < 1e-8
        assert abs(von_neumann_entropy(rho) - von_neumann_entropy(rotated)) < 1e-8
        assert abs(linear_entropy(rho) - linear_entropy(rotated)) < 1e-8
        assert abs(renyi2_subsystem(rho, "A") - renyi2_subsystem(rotated, "A")) < 1e-8


def test_pure_state_eof_equals_entanglement_entropy():
    rng = np.random.default_rng(10)
    for _ in range(25):
        v = random_pure_state(rng)
        rho = np.outer(v, v.conj())
        c, _ = concurrence(rho)
        _, eof = tangle_and_eof(c)
        marginal_entropy = von_neumann_entropy(partial_trace(rho, "A"))
        assert abs(eof - marginal_entropy) < 1e-9


def test_ppt_consistency():
    rng = np.random.default_rng(13)
    checked_ppt = checked_npt = 0
    for _ in range(60):
        if rng.random() < 0.5:
            rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        else:
            # random separable mixture of product states
            rho = np.zeros((4, 4), dtype=complex)
            weights = rng.dirichlet(np.ones(4))
            for w in weights:
                a = rng.normal(size=2) + 1j * rng.normal(size=2)
                b = rng.normal(size=2) + 1j * rng.normal(size=2)
                v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
                rho += w * np.outer(v, v.conj())
        min_eig = np.linalg.eigvalsh(partial_transpose(rho, "A")).min()
        en = log_negativity(rho)
        if en == 0.0:
            assert min_eig >= -1e-9
            checked_ppt += 1
        else:
            assert min_eig < 1e-12
            checked_npt += 1
    assert checked_ppt > 5 and checked_npt > 5


def test_entanglement_report_fields(published_rho):
    rep = entanglement_report(published_rho)
    d = rep.as_dict()
    assert set(d) == {
        "fidelity_to_target",
        "von_neumann_bits",
        "linear_entropy",
        "concurrence",
        "tangle",
        "eof_bits",
        "renyi2_a_nats",
        "log_negativity",
        "r_eigenvalues",
    }
    assert 0 <= d["concurrence"] <= 1
    assert d["tangle"] == d["concurrence"] ** 2
    assert len(d["r_eigenvalues"]) == 4
