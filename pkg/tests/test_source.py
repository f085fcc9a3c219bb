import numpy as np
import pytest

from biphoton.bell import chsh_s, fit_freedman_model, freedman_delta
from biphoton.jones import polarizer_state
from biphoton.measures import fidelity
from biphoton.source import (
    SourceModel,
    expected_coincidence,
    expected_singles,
    sample_counts,
    simulate_chsh_grid,
    simulate_freedman_dataset,
    simulate_tomography_dataset,
    simulate_visibility_table,
)
from biphoton.tomography import mle_reconstruct


def ideal_bell(pairs=1e6, **kw):
    kw.setdefault("window_s", 0.0)
    kw.setdefault("integration_s", 1.0)
    return SourceModel.from_bell(phi=0.0, pair_rate=pairs, **kw)


def test_expected_coincidence_anticorrelated():
    model = ideal_bell()
    # analyzers at 0 and 90 degrees pass V and H: the Bell state always coincides
    rate = expected_coincidence(model, polarizer_state(0.0), polarizer_state(90.0))
    assert abs(rate - model.pair_rate / 2) < 1e-6


def test_expected_coincidence_parallel_is_accidentals_only():
    model = ideal_bell(window_s=5e-9)
    rate = expected_coincidence(model, polarizer_state(0.0), polarizer_state(0.0))
    acc = model.window_s * expected_singles(model, polarizer_state(0.0), "A") * \
        expected_singles(model, polarizer_state(0.0), "B")
    assert abs(rate - acc) < 1e-9


def test_expected_coincidence_45deg():
    model = ideal_bell(eps_a=0.8, eps_b=0.7)
    rate = expected_coincidence(model, polarizer_state(0.0), polarizer_state(45.0))
    assert abs(rate - model.pair_rate * 0.8 * 0.7 / 4) < 1e-9


def test_expected_singles_tracks_marginal():
    hv = np.zeros((4, 4), dtype=complex)
    hv[1, 1] = 1.0  # |HV>: arm A sees H, arm B sees V
    model = SourceModel(rho=hv, pair_rate=1e5, window_s=0.0, dark_a=10.0)
    assert abs(expected_singles(model, polarizer_state(90.0), "A") - 1e5 - 10.0) < 1e-9
    assert abs(expected_singles(model, polarizer_state(0.0), "A") - 10.0) < 1e-9
    assert abs(expected_singles(model, polarizer_state(0.0), "B") - 1e5) < 1e-9


def test_sample_counts_zero_source():
    model = SourceModel.from_bell(pair_rate=0.0, window_s=0.0)
    samples = sample_counts(model, [(polarizer_state(0.0), polarizer_state(0.0))] * 3)
    assert all(s.coincidences == 0.0 and s.singles_a == 0.0 for s in samples)


def test_sample_counts_poisson_within_5_sigma():
    model = ideal_bell(pairs=2e6, seed=17)  # coincidence mean 1e6 per 1 s window
    (s,) = sample_counts(model, [(polarizer_state(0.0), polarizer_state(90.0))])
    assert abs(s.coincidences - 1e6) <= 5_000


def test_sample_counts_deterministic():
    model = ideal_bell(seed=123)
    settings = [(polarizer_state(a), polarizer_state(a + 45)) for a in (0.0, 30.0, 60.0)]
    assert sample_counts(model, settings) == sample_counts(model, settings)
    different = sample_counts(model.with_(seed=124), settings)
    assert different != sample_counts(model, settings)


def test_tomography_roundtrip_noiseless():
    model = SourceModel.from_bell(phi=0.3, pair_rate=1e6, window_s=5e-9, integration_s=0.4)
    data = simulate_tomography_dataset(model, noiseless=True)
    res = mle_reconstruct(data)
    assert fidelity(res.rho, model.rho) >= 0.9999


def test_chsh_simulation_converges_to_tsirelson():
    noiseless = simulate_chsh_grid(ideal_bell(pairs=1e7), noiseless=True)
    assert abs(chsh_s(noiseless).s - 2 * np.sqrt(2)) < 1e-12
    sampled = simulate_chsh_grid(ideal_bell(pairs=1e7, seed=5))
    assert abs(chsh_s(sampled).s - 2 * np.sqrt(2)) < 1e-3


def test_visibility_simulation():
    from biphoton.bell import visibility

    table = simulate_visibility_table(ideal_bell(pairs=1e6), noiseless=True)
    assert visibility(table.basis_rates((0.0, 90.0))) == 1.0
    assert visibility(table.basis_rates((45.0, 135.0))) == 1.0


def test_freedman_simulation_ideal():
    data = simulate_freedman_dataset(ideal_bell(pairs=1e7), noiseless=True)
    d = freedman_delta(data.rate_at(0, 22.5), data.rate_at(0, 67.5), data.n0c)
    assert abs(d - (np.sqrt(2) - 1) / 4) < 1e-12
    eps, rms = fit_freedman_model(data)
    assert abs(eps - 1.0) < 1e-12 and rms < 1e-12


def test_freedman_simulation_transmittance_recovery():
    model = SourceModel.from_bell(
        pair_rate=1e6, eps_a=0.8, eps_b=0.625, window_s=0.0, integration_s=1.0
    )
    data = simulate_freedman_dataset(model, noiseless=True)
    eps, _ = fit_freedman_model(data)
    assert abs(eps - 0.5) < 1e-10


def test_invalid_model_rejected():
    with pytest.raises(ValueError):
        SourceModel.from_bell(eps_a=1.5)
    with pytest.raises(ValueError):
        SourceModel.from_bell(pair_rate=-1.0)
    with pytest.raises(ValueError):
        SourceModel(rho=np.eye(2))
