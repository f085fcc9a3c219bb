"""Jones-calculus model of the measurement apparatus.

A polarization analyzer in each arm is a half-wave plate (fast axis ``h``)
followed by an optional quarter-wave plate (fast axis ``q``) and a PBS.
Angles are degrees, measured from the vertical polarization axis, at the
API boundary; trigonometry happens in radians internally.

The single-qubit projection state for a setting ``(h, q)`` is

    a(h, q) = (sin 2h + i sin 2(h - q)) / sqrt(2)   on |H>
    b(h, q) = (cos 2h - i cos 2(h - q)) / sqrt(2)   on |V>

This sign convention maps the standard tomography settings onto
H, V, R = (H - iV)/sqrt2, D = (H + V)/sqrt2 and L = (H + iV)/sqrt2, and is
the convention that reproduces published two-qubit reconstructions.
Global phase is physically irrelevant: state equality is always tested on
the rank-1 projector |psi><psi|, never on raw amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import BASIS

__all__ = [
    "WaveplateSetting",
    "ProjectionState",
    "TwoQubitProjector",
    "projection_state",
    "two_qubit_projector",
    "standard_16_settings",
    "standard_projectors",
    "bell_state",
    "polarizer_state",
    "polarizer_angle_from_hwp",
    "hwp_angle_for_polarizer",
]

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class WaveplateSetting:
    """HWP and QWP fast-axis angles of one analyzer arm, in degrees."""

    h: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "h", float(self.h) % 180.0)
        object.__setattr__(self, "q", float(self.q) % 180.0)


@dataclass(frozen=True)
class ProjectionState:
    """Single-qubit state a|H> + b|V> selected by one analyzer."""

    a_h: complex
    a_v: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a_h, self.a_v], dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class TwoQubitProjector:
    """Tensor-product projection state |psi_nu> of the two arms."""

    state: tuple
    nu: int | None = None
    label: str | None = None

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.state, dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


def projection_state(setting: WaveplateSetting) -> ProjectionState:
    """Projection state of one arm for a given waveplate setting."""
    h = np.deg2rad(setting.h)
    q = np.deg2rad(setting.q)
    a = (np.sin(2 * h) + 1j * np.sin(2 * (h - q))) / _SQRT2
    b = (np.cos(2 * h) - 1j * np.cos(2 * (h - q))) / _SQRT2
    return ProjectionState(complex(a), complex(b))


def two_qubit_projector(
    setting_a: WaveplateSetting,
    setting_b: WaveplateSetting,
    nu: int | None = None,
    label: str | None = None,
) -> TwoQubitProjector:
    """Tensor product of the two arm projection states, basis (HH,HV,VH,VV)."""
    va = projection_state(setting_a).vector
    vb = projection_state(setting_b).vector
    return TwoQubitProjector(tuple(np.kron(va, vb)), nu=nu, label=label)


# The canonical 16-projection tomography set: (nu, label, (hA,qA), (hB,qB)).
# Ordered so that only one waveplate angle changes between consecutive rows.
_STANDARD_16 = (
    (1, "HH", (45.0, 0.0), (45.0, 0.0)),
    (2, "HV", (45.0, 0.0), (0.0, 0.0)),
    (3, "VV", (0.0, 0.0), (0.0, 0.0)),
    (4, "VH", (0.0, 0.0), (45.0, 0.0)),
    (5, "RH", (22.5, 0.0), (45.0, 0.0)),
    (6, "RV", (22.5, 0.0), (0.0, 0.0)),
    (7, "DV", (22.5, 45.0), (0.0, 0.0)),
    (8, "DH", (22.5, 45.0), (45.0, 0.0)),
    (9, "DR", (22.5, 45.0), (22.5, 0.0)),
    (10, "DD", (22.5, 45.0), (22.5, 45.0)),
    (11, "RD", (22.5, 0.0), (22.5, 45.0)),
    (12, "HD", (45.0, 0.0), (22.5, 45.0)),
    (13, "VD", (0.0, 0.0), (22.5, 45.0)),
    (14, "VL", (0.0, 0.0), (22.5, 90.0)),
    (15, "HL", (45.0, 0.0), (22.5, 90.0)),
    (16, "RL", (22.5, 0.0), (22.5, 90.0)),
)


def standard_16_settings():
    """The standard 16 tomography settings as (nu, label, armA, armB) tuples."""
    return tuple(
        (nu, label, WaveplateSetting(*sa), WaveplateSetting(*sb))
        for nu, label, sa, sb in _STANDARD_16
    )


def standard_projectors() -> tuple[TwoQubitProjector, ...]:
    """Two-qubit projectors for the standard 16 settings, in nu order."""
    return tuple(
        two_qubit_projector(sa, sb, nu=nu, label=label)
        for nu, label, sa, sb in standard_16_settings()
    )


def bell_state(phi: float) -> np.ndarray:
    """The entangled state (|HV> - e^{i phi}|VH>)/sqrt2 as a 4-vector.

    ``phi`` is the relative phase in radians set by the compensator.
    """
    v = np.zeros(4, dtype=complex)
    v[BASIS.index("HV")] = 1.0
    v[BASIS.index("VH")] = -np.exp(1j * phi)
    return v / _SQRT2


def polarizer_state(theta_pol_deg: float) -> ProjectionState:
    """Linear-polarizer projection state at angle theta (degrees from V).

    theta = 0 passes |V>, theta = 90 passes |H>; only angle differences
    matter against rotationally-symmetric states.
    """
    t = np.deg2rad(theta_pol_deg)
    return ProjectionState(complex(np.sin(t)), complex(np.cos(t)))


def polarizer_angle_from_hwp(theta_hwp_deg: float) -> float:
    """Effective polarizer angle of an HWP + PBS analyzer: theta_pol = 2 h."""
    return 2.0 * theta_hwp_deg


def hwp_angle_for_polarizer(theta_pol_deg: float) -> float:
    """HWP angle realizing a given polarizer angle (inverse of the above)."""
    return theta_pol_deg / 2.0
