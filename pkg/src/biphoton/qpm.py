"""Quasi-phase-matching conditions for a periodically poled KTP crystal.

The collinear QPM mismatch of order m is

    dk_m = 2 pi (n_p/lambda_p - n_s/lambda_s - n_i/lambda_i - m/Lambda(T))

in rad/um, with refractive indices from a pluggable dispersion model and the
poling period thermally expanded from its 25 C reference value.  For the
10-um-class type-II gratings the pump and signal are y-polarized and the
idler z-polarized.

Bundled model "ktp-fan-koenig-fradkin-emanueli": KTP n_y Sellmeier with the
Koenig-Wong updated coefficients, n_z per Fradkin et al., temperature
dependence (thermo-optic polynomials in 1/lambda and thermal expansion of
the poling period) per Emanueli-Arie.  QPM zeros shift between published
dispersion models, so every report must name the model in use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "CrystalSpec",
    "KtpDispersion",
    "DISPERSION_MODELS",
    "DEFAULT_DISPERSION",
    "WavelengthOutOfModelRange",
    "NonPhysical",
    "solve_idler",
    "energy_conserved",
    "poling_period_at",
    "qpm_mismatch",
    "find_degenerate_temperature",
]


class WavelengthOutOfModelRange(ValueError):
    """Wavelength outside the dispersion model's fitted validity range."""


class NonPhysical(ValueError):
    """Energy conservation cannot be satisfied (signal not longer than pump)."""


class KtpDispersion:
    """Flux-grown KTP refractive indices n_y, n_z with temperature dependence.

    Wavelengths in um, temperature in deg C.  Thermo-optic correction
    dn = n1(lambda) (T-25) + n2(lambda) (T-25)^2 with n1 a cubic in 1/lambda
    scaled by 1e-6 and n2 by 1e-8.
    """

    name = "ktp-fan-koenig-fradkin-emanueli"
    valid_range_um = (0.40, 3.5)
    # thermal expansion of the poling period along x
    expansion_alpha = 6.7e-6
    expansion_beta = 11e-9

    _N1 = {
        "y": (6.2897, 6.3061, -6.0629, 2.6486),
        "z": (9.9587, 9.9228, -8.9603, 4.1010),
    }
    _N2 = {
        "y": (-0.14445, 2.2244, -3.5770, 1.3470),
        "z": (-1.1882, 10.459, -9.8136, 3.1481),
    }

    def _check(self, lam_um: float) -> None:
        lo, hi = self.valid_range_um
        if not lo <= lam_um <= hi:
            raise WavelengthOutOfModelRange(
                f"{lam_um:.4f} um outside model validity [{lo}, {hi}] um"
            )

    def _n25(self, lam_um: float, axis: str) -> float:
        l2 = lam_um * lam_um
        if axis == "y":
            return float(np.sqrt(2.09930 + 0.922683 / (1 - 0.0467695 / l2) - 0.0138408 * l2))
        if axis == "z":
            return float(
                np.sqrt(
                    2.12725
                    + 1.18431 / (1 - 5.14852e-2 / l2)
                    + 0.6603 / (1 - 100.00507 / l2)
                    - 9.68956e-3 * l2
                )
            )
        raise ValueError(f"axis must be 'y' or 'z', got {axis!r}")

    def n(self, lam_um: float, temperature_c: float, axis: str) -> float:
        self._check(lam_um)
        x = 1.0 / lam_um
        c1 = self._N1[axis]
        c2 = self._N2[axis]
        n1 = (c1[0] + c1[1] * x + c1[2] * x**2 + c1[3] * x**3) * 1e-6
        n2 = (c2[0] + c2[1] * x + c2[2] * x**2 + c2[3] * x**3) * 1e-8
        dt = temperature_c - 25.0
        return self._n25(lam_um, axis) + n1 * dt + n2 * dt * dt


DISPERSION_MODELS = {KtpDispersion.name: KtpDispersion()}
DEFAULT_DISPERSION = KtpDispersion.name


@dataclass(frozen=True)
class CrystalSpec:
    """Periodically poled crystal and operating point."""

    poling_period_um: float
    temperature_c: float
    lambda_pump_nm: float
    lambda_signal_nm: float
    lambda_idler_nm: float
    length_mm: float = 25.0
    qpm_order: int = 1
    dispersion_model: str = DEFAULT_DISPERSION

    def __post_init__(self):
        if self.poling_period_um <= 0:
            raise ValueError("poling period must be positive")
        if min(self.lambda_pump_nm, self.lambda_signal_nm, self.lambda_idler_nm) <= 0:
            raise ValueError("wavelengths must be positive")
        if self.dispersion_model not in DISPERSION_MODELS:
            raise ValueError(
                f"unknown dispersion model {self.dispersion_model!r}; "
                f"available: {sorted(DISPERSION_MODELS)}"
            )

    @property
    def dispersion(self) -> KtpDispersion:
        return DISPERSION_MODELS[self.dispersion_model]


def solve_idler(lambda_pump_nm: float, lambda_signal_nm: float) -> float:
    """Idler wavelength from energy conservation 1/lp = 1/ls + 1/li."""
    if lambda_signal_nm <= lambda_pump_nm:
        raise NonPhysical("signal wavelength must exceed the pump wavelength")
    return 1.0 / (1.0 / lambda_pump_nm - 1.0 / lambda_signal_nm)


def energy_conserved(
    lambda_pump_nm: float, lambda_signal_nm: float, lambda_idler_nm: float, tol: float = 1e-9
) -> bool:
    return abs(1.0 / lambda_pump_nm - 1.0 / lambda_signal_nm - 1.0 / lambda_idler_nm) <= tol


def poling_period_at(poling_period_um: float, temperature_c: float,
                     model: KtpDispersion | None = None) -> float:
    """Poling period thermally expanded from its 25 C reference value."""
    m = model or DISPERSION_MODELS[DEFAULT_DISPERSION]
    dt = temperature_c - 25.0
    return poling_period_um * (1.0 + m.expansion_alpha * dt + m.expansion_beta * dt * dt)


def crystal_length_at(length_mm: float, temperature_c: float,
                      model: KtpDispersion | None = None) -> float:
    """Crystal length with the same expansion law as the poling period."""
    m = model or DISPERSION_MODELS[DEFAULT_DISPERSION]
    dt = temperature_c - 25.0
    return length_mm * (1.0 + m.expansion_alpha * dt + m.expansion_beta * dt * dt)


def qpm_mismatch(spec: CrystalSpec) -> float:
    """Collinear QPM mismatch dk_m in rad/um at the crystal's operating point."""
    disp = spec.dispersion
    t = spec.temperature_c
    lp = spec.lambda_pump_nm / 1000.0
    ls = spec.lambda_signal_nm / 1000.0
    li = spec.lambda_idler_nm / 1000.0
    dk = (
        disp.n(lp, t, "y") / lp
        - disp.n(ls, t, "y") / ls
        - disp.n(li, t, "z") / li
        - spec.qpm_order / poling_period_at(spec.poling_period_um, t, disp)
    )
    return 2.0 * np.pi * dk


def find_degenerate_temperature(
    spec: CrystalSpec, t_min: float = 20.0, t_max: float = 40.0
) -> float | None:
    """Temperature in [t_min, t_max] where the QPM mismatch crosses zero.

    Returns None when the mismatch does not change sign on the interval.
    """

    def f(t: float) -> float:
        return qpm_mismatch(CrystalSpec(
            poling_period_um=spec.poling_period_um,
            temperature_c=t,
            lambda_pump_nm=spec.lambda_pump_nm,
            lambda_signal_nm=spec.lambda_signal_nm,
            lambda_idler_nm=spec.lambda_idler_nm,
            length_mm=spec.length_mm,
            qpm_order=spec.qpm_order,
            dispersion_model=spec.dispersion_model,
        ))

    lo, hi = f(t_min), f(t_max)
    if lo == 0.0:
        return t_min
    if hi == 0.0:
        return t_max
    if lo * hi > 0:
        return None
    return float(brentq(f, t_min, t_max, xtol=1e-6))
