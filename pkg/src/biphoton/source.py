"""Synthetic count data from a modeled SPDC pair source.

The model is a two-qubit polarization state emitted at ``pair_rate`` pairs/s,
arm transmittances eps_a/eps_b, detector dark rates, and accidental
coincidences tau * R_A * R_B within the coincidence window.  Sampling is
Poisson per integration window and fully deterministic per seed: setting
number k draws from the k-th child of ``SeedSequence(seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bell import ChshGrid, CountRow, FreedmanDataset, FreedmanRow, VisibilityRow, VisibilityTable
from .jones import (
    ProjectionState,
    WaveplateSetting,
    bell_state,
    polarizer_state,
    projection_state,
    standard_16_settings,
)
from .linalg import reduced_state
from .tomography import TomographyDataset, TomographyRecord

__all__ = [
    "SourceModel",
    "expected_singles",
    "expected_coincidence",
    "sample_counts",
    "CountSample",
    "simulate_tomography_dataset",
    "simulate_chsh_grid",
    "simulate_visibility_table",
    "simulate_freedman_dataset",
]


@dataclass(frozen=True)
class SourceModel:
    """Pair source + detection chain parameters.

    ``eps_a``/``eps_b`` are the analyzer-box transmittances of each arm,
    i.e. losses that are present only while the analyzer is in the beam.
    """

    rho: np.ndarray
    pair_rate: float = 1e6
    eps_a: float = 1.0
    eps_b: float = 1.0
    dark_a: float = 0.0
    dark_b: float = 0.0
    window_s: float = 5e-9
    integration_s: float = 0.4
    seed: int = 0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError("state must be a 4x4 density matrix")
        object.__setattr__(self, "rho", rho)
        if self.pair_rate < 0 or self.dark_a < 0 or self.dark_b < 0:
            raise ValueError("rates must be nonnegative")
        if not (0.0 <= self.eps_a <= 1.0 and 0.0 <= self.eps_b <= 1.0):
            raise ValueError("transmittances must lie in [0, 1]")

    @classmethod
    def from_bell(cls, phi: float = 0.0, **kwargs) -> "SourceModel":
        psi = bell_state(phi)
        return cls(rho=np.outer(psi, psi.conj()), **kwargs)

    def with_(self, **kwargs) -> "SourceModel":
        return replace(self, **kwargs)


def _as_projection(setting) -> ProjectionState:
    if isinstance(setting, ProjectionState):
        return setting
    if isinstance(setting, WaveplateSetting):
        return projection_state(setting)
    if isinstance(setting, (int, float)):
        return polarizer_state(float(setting))
    raise TypeError(f"cannot interpret {setting!r} as a projection")


def expected_singles(model: SourceModel, setting, arm: str) -> float:
    """Modeled singles rate (cps) of one arm behind its analyzer.

    Arm "A" is the first letter of the (HH, HV, VH, VV) product order (the
    first factor of every projector built here), arm "B" the second.
    """
    proj = _as_projection(setting)
    eps = model.eps_a if arm == "A" else model.eps_b
    dark = model.dark_a if arm == "A" else model.dark_b
    marginal = reduced_state(model.rho, 0 if arm == "A" else 1)
    v = proj.vector
    p = float(np.real(v.conj() @ marginal @ v))
    return model.pair_rate * eps * p + dark


def expected_coincidence(model: SourceModel, setting_a, setting_b) -> float:
    """Modeled coincidence rate (cps), true pairs plus accidentals."""
    pa = _as_projection(setting_a)
    pb = _as_projection(setting_b)
    v = np.kron(pa.vector, pb.vector)
    p = float(np.real(v.conj() @ model.rho @ v))
    true = model.pair_rate * model.eps_a * model.eps_b * p
    acc = model.window_s * expected_singles(model, pa, "A") * expected_singles(model, pb, "B")
    return true + acc


@dataclass(frozen=True)
class CountSample:
    """Sampled rates for one setting pair (all cps, errors are sqrt(N)/T)."""

    singles_a: float
    d_singles_a: float
    singles_b: float
    d_singles_b: float
    coincidences: float
    d_coincidences: float


def _sample_one(model: SourceModel, setting_a, setting_b, rng, noiseless: bool) -> CountSample:
    t = model.integration_s
    means = np.array(
        [
            expected_singles(model, setting_a, "A") * t,
            expected_singles(model, setting_b, "B") * t,
            expected_coincidence(model, setting_a, setting_b) * t,
        ]
    )
    counts = means if noiseless else rng.poisson(means).astype(float)
    errs = np.sqrt(counts)
    return CountSample(
        singles_a=counts[0] / t,
        d_singles_a=errs[0] / t,
        singles_b=counts[1] / t,
        d_singles_b=errs[1] / t,
        coincidences=counts[2] / t,
        d_coincidences=errs[2] / t,
    )


def sample_counts(model: SourceModel, settings, noiseless: bool = False) -> list:
    """Poisson-sample counts for a list of (setting_a, setting_b) pairs.

    Identical seed and settings give identical output; each setting pair
    uses an independent child generator so parallel sweeps stay reproducible.
    """
    seeds = np.random.SeedSequence(model.seed).spawn(len(settings))
    return [
        _sample_one(model, sa, sb, np.random.default_rng(seeds[k]), noiseless)
        for k, (sa, sb) in enumerate(settings)
    ]


def simulate_tomography_dataset(model: SourceModel, noiseless: bool = False) -> TomographyDataset:
    """Synthesize the standard 16-projection dataset from the source model."""
    settings = standard_16_settings()
    samples = sample_counts(model, [(sa, sb) for _, _, sa, sb in settings], noiseless)
    records = tuple(
        TomographyRecord(
            nu=nu,
            label=label,
            arm_a=sa,
            arm_b=sb,
            singles_a=smp.singles_a,
            d_singles_a=smp.d_singles_a,
            singles_b=smp.singles_b,
            d_singles_b=smp.d_singles_b,
            coincidences=smp.coincidences,
            d_coincidences=smp.d_coincidences,
        )
        for (nu, label, sa, sb), smp in zip(settings, samples)
    )
    return TomographyDataset(records=records, integration_s=model.integration_s, window_s=model.window_s)


def simulate_chsh_grid(model: SourceModel, angles=(-45.0, -22.5, 0.0, 22.5), noiseless: bool = False) -> ChshGrid:
    """Synthesize the 16-rate CHSH grid at analyzer angles (a, b, a', b')."""
    a, b, ap, bp = angles
    pairs = [(ta, tb) for ta in (a, ap, a + 90, ap + 90) for tb in (b, bp, b + 90, bp + 90)]
    samples = sample_counts(model, pairs, noiseless)
    rows = tuple(
        CountRow(
            theta_a=ta,
            theta_b=tb,
            singles_a=smp.singles_a,
            singles_b=smp.singles_b,
            rate=smp.coincidences,
            d_rate=smp.d_coincidences,
        )
        for (ta, tb), smp in zip(pairs, samples)
    )
    return ChshGrid(rows=rows, integration_s=model.integration_s, window_s=model.window_s)


def simulate_visibility_table(
    model: SourceModel, bases=((0.0, 90.0), (45.0, 135.0)), noiseless: bool = False
) -> VisibilityTable:
    """Synthesize the 4-settings-per-basis visibility table."""
    pairs = [(ta, tb) for basis in bases for ta in basis for tb in basis]
    samples = sample_counts(model, pairs, noiseless)
    rows = tuple(
        VisibilityRow(theta_a=ta, theta_b=tb, rate=smp.coincidences, d_rate=smp.d_coincidences)
        for (ta, tb), smp in zip(pairs, samples)
    )
    return VisibilityTable(rows=rows, integration_s=model.integration_s, window_s=model.window_s)


def simulate_freedman_dataset(
    model: SourceModel,
    theta_a_values=(0.0, 45.0),
    n_phi: int = 9,
    noiseless: bool = False,
) -> FreedmanDataset:
    """Synthesize coincidence-vs-phi series plus the polarizers-removed rate.

    The N_0^c measurement removes both analyzer boxes.  eps_a/eps_b are the
    analyzer-arm transmittances, so with the analyzers out every pair
    contributes: the mean open rate is pair_rate plus accidentals from the
    open singles.
    """
    phis = np.linspace(0.0, 90.0, n_phi)
    pairs = [(ta, ta + phi) for ta in theta_a_values for phi in phis]
    samples = sample_counts(model, pairs, noiseless)

    open_a = model.pair_rate + model.dark_a
    open_b = model.pair_rate + model.dark_b
    n0c_mean = model.pair_rate + model.window_s * open_a * open_b
    if noiseless:
        n0c = n0c_mean
    else:
        rng = np.random.default_rng(np.random.SeedSequence(model.seed).spawn(len(pairs) + 1)[-1])
        n0c = rng.poisson(n0c_mean * model.integration_s) / model.integration_s

    rows = tuple(
        FreedmanRow(
            theta_a=ta,
            theta_b=tb,
            phi=tb - ta,
            singles_a=smp.singles_a,
            singles_b=smp.singles_b,
            rate=smp.coincidences,
        )
        for (ta, tb), smp in zip(pairs, samples)
    )
    return FreedmanDataset(
        rows=rows, n0c=float(n0c), integration_s=model.integration_s, window_s=model.window_s
    )
