"""Maximum-likelihood reconstruction of a two-qubit state from 16 projections.

The physical state is parameterized as rho(t) = T(t)^dag T(t) / tr(...) with
T lower triangular (4 real diagonal entries + 6 complex off-diagonals = 16
real parameters), which is Hermitian, positive semidefinite and trace-one
for every t.  The optimizer minimizes the Gaussian-approximated Poisson cost

    C = sum_nu (n0 p_nu - N_nu)^2 / (2 max(n0 p_nu, eps_floor))

over t (and optionally the pair-rate scale n0), starting from the
PSD-projected linear-inversion estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .jones import TwoQubitProjector, WaveplateSetting, two_qubit_projector
from .linalg import herm_defect

__all__ = [
    "TomographyRecord",
    "TomographyDataset",
    "MLEConfig",
    "MLEResult",
    "DegenerateParams",
    "IncompleteDataset",
    "SingularSystem",
    "params_to_rho",
    "rho_to_params",
    "predicted_probability",
    "linear_inversion",
    "mle_reconstruct",
]


class DegenerateParams(ValueError):
    """Cholesky parameter vector maps to a (numerically) zero matrix."""


class IncompleteDataset(ValueError):
    """Tomography needs all 16 projections and at least one nonzero count."""


class SingularSystem(ValueError):
    """The projector set is not tomographically complete."""


@dataclass(frozen=True)
class TomographyRecord:
    """One projection measurement: settings plus singles/coincidence rates (cps)."""

    nu: int
    label: str
    arm_a: WaveplateSetting
    arm_b: WaveplateSetting
    singles_a: float
    d_singles_a: float
    singles_b: float
    d_singles_b: float
    coincidences: float
    d_coincidences: float

    def projector(self) -> TwoQubitProjector:
        return two_qubit_projector(self.arm_a, self.arm_b, nu=self.nu, label=self.label)


@dataclass(frozen=True)
class TomographyDataset:
    """The 16 projection records with acquisition metadata."""

    records: tuple
    integration_s: float
    window_s: float

    def __post_init__(self):
        nus = sorted(r.nu for r in self.records)
        if nus != list(range(1, 17)):
            raise IncompleteDataset(f"need exactly one record per nu=1..16, got nus {nus}")
        for r in self.records:
            if min(r.singles_a, r.singles_b, r.coincidences) < 0:
                raise ValueError(f"negative rate in record nu={r.nu}")
            if min(r.d_singles_a, r.d_singles_b, r.d_coincidences) < 0:
                raise ValueError(f"negative uncertainty in record nu={r.nu}")
        if self.integration_s <= 0 or self.window_s < 0:
            raise ValueError("integration time must be positive and window nonnegative")
        object.__setattr__(self, "records", tuple(sorted(self.records, key=lambda r: r.nu)))

    def projectors(self) -> list[TwoQubitProjector]:
        return [r.projector() for r in self.records]

    def coincidence_counts(self, subtract_accidentals: bool = True,
                           accidental_compat_integration: bool = False) -> np.ndarray:
        """Coincidence counts per integration window, optionally accidental-corrected.

        The default accidental rate is tau * R_A * R_B; the compat flag divides
        by the integration time to reproduce the footnote variant.
        """
        rates = np.array([r.coincidences for r in self.records])
        if subtract_accidentals:
            acc = np.array(
                [r.singles_a * r.singles_b * self.window_s for r in self.records]
            )
            if accidental_compat_integration:
                acc = acc / self.integration_s
            rates = np.clip(rates - acc, 0.0, None)
        return rates * self.integration_s


# Lower-triangular index order for the 6 complex off-diagonal parameters.
_LOWER = ((1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2))


def _t_matrix(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (16,):
        raise ValueError(f"expected 16 parameters, got shape {t.shape}")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = t[:4]
    for i, (r, c) in enumerate(_LOWER):
        m[r, c] = t[4 + 2 * i] + 1j * t[5 + 2 * i]
    return m


def params_to_rho(t: np.ndarray) -> np.ndarray:
    """Map 16 real parameters to a physical density matrix T^dag T / tr."""
    tm = _t_matrix(t)
    m = tm.conj().T @ tm
    norm = float(np.trace(m).real)
    if norm <= 1e-30:
        raise DegenerateParams(f"tr(T^dag T) = {norm:.3e} is numerically zero")
    return m / norm


def rho_to_params(rho: np.ndarray, floor: float = 1e-10) -> np.ndarray:
    """Inverse of :func:`params_to_rho` for (near-)PSD input.

    Eigenvalues below ``floor`` are raised to it so the Cholesky factor
    exists even for rank-deficient states.  The antidiagonal flip converts
    the upper-triangular factor of the flipped matrix into the
    lower-triangular T with T^dag T = rho.
    """
    rho = np.asarray(rho, dtype=complex)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.clip(w, floor, None)
    psd = (v * w) @ v.conj().T
    psd /= np.trace(psd).real
    flip = np.fliplr(np.eye(4))
    upper = scipy.linalg.cholesky(flip @ psd @ flip, lower=False)
    tm = flip @ upper @ flip
    t = np.zeros(16)
    t[:4] = np.real(np.diag(tm))
    for i, (r, c) in enumerate(_LOWER):
        t[4 + 2 * i] = tm[r, c].real
        t[5 + 2 * i] = tm[r, c].imag
    return t


def predicted_probability(rho: np.ndarray, proj: TwoQubitProjector) -> float:
    """<psi_nu| rho |psi_nu>, clamped into [0, 1]."""
    v = proj.vector
    p = complex(v.conj() @ np.asarray(rho, dtype=complex) @ v)
    if abs(p.imag) > 1e-12:
        raise ValueError(f"projection probability has imaginary part {p.imag:.3e}")
    return min(max(p.real, 0.0), 1.0)


def _measurement_matrix(projectors) -> np.ndarray:
    # row nu: p_nu = sum_jk conj(psi_j) psi_k rho_jk
    return np.array([np.outer(p.vector.conj(), p.vector).reshape(16) for p in projectors])


def linear_inversion(
    data: TomographyDataset,
    subtract_accidentals: bool = True,
    accidental_compat_integration: bool = False,
) -> np.ndarray:
    """Direct inversion of the 16 measured probabilities.

    Returns a Hermitian trace-one matrix that is NOT guaranteed positive
    semidefinite; used as the MLE initializer and as a diagnostic for how
    unphysical the raw data are.  Probabilities are normalized by the summed
    counts of the first four (complete-basis) projections.
    """
    counts = data.coincidence_counts(subtract_accidentals, accidental_compat_integration)
    if counts.max() <= 0:
        raise IncompleteDataset("all coincidence counts are zero")
    projectors = data.projectors()
    a = _measurement_matrix(projectors)
    if np.linalg.matrix_rank(a, tol=1e-10) < 16:
        raise SingularSystem("projector set is not tomographically complete")
    n0 = counts[:4].sum()
    if n0 <= 0:
        raise IncompleteDataset("complete-basis rows (nu=1..4) have zero counts")
    rho = np.linalg.solve(a, counts / n0).reshape(4, 4)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class MLEConfig:
    """Optimizer settings for :func:`mle_reconstruct`.

    ``subtract_accidentals`` removes tau*R_A*R_B from each coincidence rate
    before fitting (the published reconstruction requires this).  With
    ``fit_scale`` the pair-rate scale n0 becomes a free fit parameter
    initialized to sum(N)/sum(p); otherwise it is fixed to the summed counts
    of the complete-basis rows nu=1..4.
    """

    subtract_accidentals: bool = True
    accidental_compat_integration: bool = False
    fit_scale: bool = False
    eps_floor: float = 1.0
    max_iterations: int = 2000
    # stop rule: relative cost decrease below rel_tol over a trailing window
    rel_tol: float = 1e-10
    window: int = 50


@dataclass(frozen=True)
class MLEResult:
    rho: np.ndarray
    n0: float
    final_cost: float
    iterations: int
    converged: bool
    cost_trace: tuple = field(repr=False, default=())
    rho_linear: np.ndarray | None = field(repr=False, default=None)


def mle_reconstruct(data: TomographyDataset, config: MLEConfig | None = None) -> MLEResult:
    """Reconstruct the physical density matrix from a tomography dataset.

    Deterministic: fixed initializer (PSD-projected linear inversion),
    no random elements.  Never raises on non-convergence; the best-so-far
    state is returned with ``converged=False``.
    """
    cfg = config or MLEConfig()
    counts = data.coincidence_counts(cfg.subtract_accidentals, cfg.accidental_compat_integration)
    if counts.max() <= 0:
        raise IncompleteDataset("all coincidence counts are zero")
    projectors = data.projectors()
    psi = np.array([p.vector for p in projectors])

    rho_lin = linear_inversion(data, cfg.subtract_accidentals, cfg.accidental_compat_integration)
    t0 = rho_to_params(rho_lin)

    def probs(rho: np.ndarray) -> np.ndarray:
        return np.clip(np.real(np.einsum("ni,ij,nj->n", psi.conj(), rho, psi)), 0.0, 1.0)

    n0_fixed = float(counts[:4].sum())

    def unpack(x):
        rho = params_to_rho(x[:16])
        n0 = float(np.exp(x[16])) if cfg.fit_scale else n0_fixed
        return rho, n0

    def cost(x) -> float:
        rho, n0 = unpack(x)
        mu = n0 * probs(rho)
        return float(np.sum((mu - counts) ** 2 / (2.0 * np.maximum(mu, cfg.eps_floor))))

    if cfg.fit_scale:
        n0_init = counts.sum() / max(probs(params_to_rho(t0)).sum(), 1e-12)
        x0 = np.concatenate([t0, [np.log(max(n0_init, 1e-12))]])
    else:
        x0 = np.concatenate([t0, [0.0]])

    trace: list[float] = [cost(x0)]
    res = minimize(
        cost,
        x0,
        method="L-BFGS-B",
        callback=lambda xk: trace.append(cost(xk)),
        options=dict(maxiter=cfg.max_iterations, ftol=1e-16, gtol=1e-12),
    )

    best = np.array(res.x)
    rho, n0 = unpack(best)
    rho = 0.5 * (rho + rho.conj().T)
    assert herm_defect(rho) < 1e-12

    converged = bool(res.success)
    if len(trace) > cfg.window:
        first = trace[-cfg.window - 1]
        last = trace[-1]
        if first > 0 and (first - last) / first < cfg.rel_tol:
            converged = True
    return MLEResult(
        rho=rho,
        n0=n0,
        final_cost=float(res.fun),
        iterations=int(res.nit),
        converged=converged,
        cost_trace=tuple(trace),
        rho_linear=rho_lin,
    )
