"""CHSH, visibility and Freedman analyses on coincidence-count tables.

All angles are polarizer angles in degrees (an HWP + PBS analyzer realizes
theta_pol = 2 theta_HWP); angles are compared modulo 180 since a polarizer
is a 2-fold symmetric element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CountRow",
    "ChshGrid",
    "FreedmanRow",
    "FreedmanDataset",
    "VisibilityRow",
    "VisibilityTable",
    "ZeroDenominator",
    "IncompleteGrid",
    "AllZero",
    "ZeroN0",
    "DegenerateFit",
    "correlation_e",
    "chsh_s",
    "ChshResult",
    "visibility",
    "freedman_delta",
    "freedman_sigma",
    "fit_freedman_model",
    "accidental_rate",
    "PAPER_CHSH_ANGLES",
]


class ZeroDenominator(ValueError):
    """Correlation denominator (sum of the four rates) is zero."""


class IncompleteGrid(ValueError):
    """CHSH grid does not contain all 16 required angle pairs."""


class AllZero(ValueError):
    """Visibility is undefined when every rate is zero."""


class ZeroN0(ValueError):
    """Freedman test needs a positive polarizers-removed rate N_0^c."""


class DegenerateFit(ValueError):
    """Freedman fit needs at least 3 distinct analyzer-angle differences."""


#: The canonical analyzer angles (a, b, a', b') of the 16-setting CHSH grid.
PAPER_CHSH_ANGLES = (-45.0, -22.5, 0.0, 22.5)


def _norm_angle(theta: float) -> float:
    return round(float(theta) % 180.0, 9)


@dataclass(frozen=True)
class CountRow:
    """Singles and coincidence rates (cps) at one analyzer-angle pair."""

    theta_a: float
    theta_b: float
    singles_a: float
    singles_b: float
    rate: float
    d_rate: float = 0.0


@dataclass(frozen=True)
class ChshGrid:
    """The 16 coincidence rates of a CHSH measurement."""

    rows: tuple
    integration_s: float = 0.4
    window_s: float = 5e-9

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r.rate < 0 or r.singles_a < 0 or r.singles_b < 0:
                raise ValueError("negative rate in CHSH grid")

    def rate(self, theta_a: float, theta_b: float) -> float:
        key = (_norm_angle(theta_a), _norm_angle(theta_b))
        for r in self.rows:
            if (_norm_angle(r.theta_a), _norm_angle(r.theta_b)) == key:
                return r.rate
        raise IncompleteGrid(f"no row at polarizer angles ({theta_a}, {theta_b})")


def correlation_e(n_ab: float, n_aperp_bperp: float, n_ab_perp: float, n_aperp_b: float) -> float:
    """Polarization correlation E from the four coincidence rates.

    E = [N(a,b) + N(a+90,b+90) - N(a,b+90) - N(a+90,b)] / (sum of the four).
    """
    num = n_ab + n_aperp_bperp - n_ab_perp - n_aperp_b
    den = n_ab + n_aperp_bperp + n_ab_perp + n_aperp_b
    if den <= 0:
        raise ZeroDenominator("sum of the four coincidence rates is zero")
    return num / den


@dataclass(frozen=True)
class ChshResult:
    s: float
    correlations: dict


def chsh_s(grid: ChshGrid, angles: tuple = PAPER_CHSH_ANGLES) -> ChshResult:
    """CHSH parameter S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|."""
    a, b, ap, bp = angles

    def e(alpha: float, beta: float) -> float:
        return correlation_e(
            grid.rate(alpha, beta),
            grid.rate(alpha + 90, beta + 90),
            grid.rate(alpha, beta + 90),
            grid.rate(alpha + 90, beta),
        )

    e_ab, e_abp, e_apb, e_apbp = e(a, b), e(a, bp), e(ap, b), e(ap, bp)
    s = abs(e_ab - e_abp) + abs(e_apb + e_apbp)
    return ChshResult(
        s=s,
        correlations={
            f"E({a:g},{b:g})": e_ab,
            f"E({a:g},{bp:g})": e_abp,
            f"E({ap:g},{b:g})": e_apb,
            f"E({ap:g},{bp:g})": e_apbp,
        },
    )


def visibility(rates) -> float:
    """Fringe contrast (max - min)/(max + min) over one basis's settings."""
    r = np.asarray(rates, dtype=float)
    if r.size == 0 or r.max() <= 0:
        raise AllZero("visibility undefined: no positive rate")
    if r.min() < 0:
        raise ValueError("negative rate")
    return float((r.max() - r.min()) / (r.max() + r.min()))


@dataclass(frozen=True)
class VisibilityRow:
    theta_a: float
    theta_b: float
    rate: float
    d_rate: float = 0.0


@dataclass(frozen=True)
class VisibilityTable:
    rows: tuple
    integration_s: float = 0.4
    window_s: float = 5e-9

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def basis_rates(self, basis_angles: tuple) -> list:
        """Rates whose analyzer angles both belong to one basis (mod 180)."""
        allowed = {_norm_angle(t) for t in basis_angles}
        out = [
            r.rate
            for r in self.rows
            if _norm_angle(r.theta_a) in allowed and _norm_angle(r.theta_b) in allowed
        ]
        return out


@dataclass(frozen=True)
class FreedmanRow:
    theta_a: float
    theta_b: float
    phi: float
    singles_a: float
    singles_b: float
    rate: float


@dataclass(frozen=True)
class FreedmanDataset:
    """Coincidence rates vs analyzer-angle difference plus N_0^c."""

    rows: tuple
    n0c: float
    integration_s: float = 0.4
    window_s: float = 5e-9

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.n0c <= 0:
            raise ZeroN0(f"polarizers-removed rate must be positive, got {self.n0c}")
        for r in self.rows:
            if not 0.0 <= r.phi <= 90.0:
                raise ValueError(f"phi = {r.phi} outside [0, 90] degrees")

    def series(self, theta_a: float) -> tuple:
        return tuple(r for r in self.rows if _norm_angle(r.theta_a) == _norm_angle(theta_a))

    def rate_at(self, theta_a: float, phi: float) -> float:
        for r in self.series(theta_a):
            if abs(r.phi - phi) < 1e-9:
                return r.rate
        raise ValueError(f"no row with theta_a={theta_a}, phi={phi}")


def freedman_delta(nc_phi1: float, nc_phi2: float, n0c: float) -> float:
    """Freedman parameter |N_c(phi1) - N_c(phi2)|/N_0^c - 1/4.

    Nonpositive for every local realistic model; positive values witness
    entanglement.  The optimum angle differences are phi1=22.5, phi2=67.5.
    """
    if n0c <= 0:
        raise ZeroN0("N_0^c must be positive")
    return abs(nc_phi1 - nc_phi2) / n0c - 0.25


def freedman_sigma(nc_phi1: float, nc_phi2: float, n0c: float):
    """Uncertainty bracket for the Freedman parameter, from counts.

    Returns ``(bracket, sqrt(bracket))`` with
    bracket = (N1 + N2)/N0^2 + (N1 - N2)^2/N0^3.  The published error
    formula carries no square root and its quoted magnitude matches the
    bracket; the square root is the conventional standard error.  Both are
    returned so reports can carry both.
    """
    if n0c <= 0:
        raise ZeroN0("N_0^c must be positive")
    bracket = (nc_phi1 + nc_phi2) / n0c**2 + (nc_phi1 - nc_phi2) ** 2 / n0c**3
    return bracket, float(np.sqrt(bracket))


def fit_freedman_model(data: FreedmanDataset):
    """Least-squares fit of N_c(phi)/N_0^c = (eps/2) sin^2(phi).

    Returns ``(eps_bar, rms_residual)`` where eps_bar = eps_a * eps_b is the
    fitted product of arm transmittances.
    """
    phi = np.array([r.phi for r in data.rows], dtype=float)
    if np.unique(np.round(phi, 9)).size < 3:
        raise DegenerateFit("need at least 3 distinct phi values")
    y = np.array([r.rate for r in data.rows], dtype=float) / data.n0c
    s2 = np.sin(np.deg2rad(phi)) ** 2
    denom = float((s2 * s2).sum())
    if denom <= 0:
        raise DegenerateFit("all phi values are zero")
    slope = float((y * s2).sum()) / denom
    resid = y - slope * s2
    return 2.0 * slope, float(np.sqrt((resid**2).mean()))


def accidental_rate(
    singles_a: float,
    singles_b: float,
    window_s: float,
    integration_s: float | None = None,
    compat_divide_by_integration: bool = False,
) -> float:
    """Accidental coincidence rate tau * R_A * R_B (cps).

    The compat flag reproduces the published footnote's tau*R_A*R_B/T,
    which is dimensionally a rate only by convention; the default form is
    the dimensionally consistent one.
    """
    if singles_a < 0 or singles_b < 0:
        raise ValueError("singles rates must be nonnegative")
    acc = window_s * singles_a * singles_b
    if compat_divide_by_integration:
        if not integration_s or integration_s <= 0:
            raise ValueError("compat variant needs a positive integration time")
        acc /= integration_s
    return acc
