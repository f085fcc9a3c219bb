import numpy as np

from biphoton.jones import (
    WaveplateSetting,
    bell_state,
    hwp_angle_for_polarizer,
    polarizer_angle_from_hwp,
    polarizer_state,
    projection_state,
    standard_16_settings,
    standard_projectors,
    two_qubit_projector,
)

H = np.array([1.0, 0.0])
V = np.array([0.0, 1.0])


def assert_same_ray(v, w, atol=1e-12):
    """Equality up to global phase, via the rank-1 projectors."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    pv = np.outer(v, v.conj()) / (v.conj() @ v)
    pw = np.outer(w, w.conj()) / (w.conj() @ w)
    assert np.abs(pv - pw).max() < atol


def test_projection_state_h():
    assert_same_ray(projection_state(WaveplateSetting(45, 0)).vector, H)


def test_projection_state_v():
    assert_same_ray(projection_state(WaveplateSetting(0, 0)).vector, V)


def test_projection_state_circular():
    # (22.5, 0) selects the circular state (|H> - i|V>)/sqrt2
    assert_same_ray(projection_state(WaveplateSetting(22.5, 0)).vector, (H - 1j * V) / np.sqrt(2))


def test_projection_state_diagonal_and_left():
    assert_same_ray(projection_state(WaveplateSetting(22.5, 45)).vector, (H + V) / np.sqrt(2))
    assert_same_ray(projection_state(WaveplateSetting(22.5, 90)).vector, (H + 1j * V) / np.sqrt(2))


def test_projection_norm_fuzz():
    rng = np.random.default_rng(2024)
    h = rng.uniform(-720, 720, size=10_000)
    q = rng.uniform(-720, 720, size=10_000)
    for hk, qk in zip(h, q):
        v = projection_state(WaveplateSetting(hk, qk)).vector
        assert abs(v.conj() @ v - 1.0) < 1e-12


def test_qwp_180_periodicity():
    rng = np.random.default_rng(8)
    for _ in range(200):
        h, q = rng.uniform(0, 180, size=2)
        p1 = projection_state(WaveplateSetting(h, q)).projector()
        p2 = projection_state(WaveplateSetting(h, q + 180.0)).projector()
        assert np.abs(p1 - p2).max() < 1e-12


def test_standard_settings_table():
    settings = standard_16_settings()
    labels = [label for _, label, _, _ in settings]
    assert labels == ["HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                      "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"]
    assert [nu for nu, *_ in settings] == list(range(1, 17))
    nu1 = settings[0]
    assert nu1[1:] == ("HH", WaveplateSetting(45, 0), WaveplateSetting(45, 0))
    nu10 = settings[9]
    assert nu10[1:] == ("DD", WaveplateSetting(22.5, 45), WaveplateSetting(22.5, 45))
    nu16 = settings[15]
    assert nu16[1:] == ("RL", WaveplateSetting(22.5, 0), WaveplateSetting(22.5, 90))


def test_standard_projectors_unit_norm():
    for proj in standard_projectors():
        v = proj.vector
        assert abs(v.conj() @ v - 1.0) < 1e-12


def test_standard_projectors_tomographically_complete():
    mat = np.array([np.outer(p.vector.conj(), p.vector).reshape(16) for p in standard_projectors()])
    assert np.linalg.matrix_rank(mat, tol=1e-10) == 16


def test_two_qubit_projector_basis_states():
    e_hh = np.array([1, 0, 0, 0], dtype=complex)
    e_vh = np.array([0, 0, 1, 0], dtype=complex)
    assert_same_ray(two_qubit_projector(WaveplateSetting(45, 0), WaveplateSetting(45, 0)).vector, e_hh)
    assert_same_ray(two_qubit_projector(WaveplateSetting(0, 0), WaveplateSetting(45, 0)).vector, e_vh)


def test_bell_state_components():
    for phi in (0.0, 0.7, np.pi, 4.2):
        psi = bell_state(phi)
        assert abs(psi[0]) == 0.0 and abs(psi[3]) == 0.0
        assert abs(psi.conj() @ psi - 1.0) < 1e-12
    assert abs(bell_state(0.0).conj() @ bell_state(np.pi)) < 1e-12


def test_bell_state_rl_overlap():
    rl = standard_projectors()[15].vector
    overlap = abs(rl.conj() @ bell_state(0.0)) ** 2
    assert abs(overlap - 0.5) < 1e-12


def test_polarizer_state_and_conversions():
    assert_same_ray(polarizer_state(0.0).vector, V)
    assert_same_ray(polarizer_state(90.0).vector, H)
    assert polarizer_angle_from_hwp(22.5) == 45.0
    assert hwp_angle_for_polarizer(45.0) == 22.5


def test_waveplate_setting_normalizes_angles():
    s = WaveplateSetting(-45, 270)
    assert s.h == 135.0 and s.q == 90.0


def test_projection_state_rejects_nothing_but_preserves_given_angles():
    s = WaveplateSetting(22.5, 45)
    assert (s.h, s.q) == (22.5, 45.0)
