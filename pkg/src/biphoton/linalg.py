"""Exact complex linear algebra for two-qubit density operators.

Everything here works on plain complex ndarrays in the fixed product basis
``(HH, HV, VH, VV)`` (first letter = arm A).  All functions are pure; none
mutates its input.
"""

from __future__ import annotations

import numpy as np

#: Fixed two-qubit basis order shared by every module.
BASIS = ("HH", "HV", "VH", "VV")

# Hermiticity tolerances: exact inputs vs. matrices coming out of a
# numerical reconstruction.
TOL_HERM_EXACT = 1e-12
TOL_HERM_RECON = 1e-9
TOL_TRACE = 1e-9


class NonHermitianInput(ValueError):
    """Input matrix violates Hermitian symmetry beyond tolerance."""


class NegativeEigenvalue(ValueError):
    """Matrix has an eigenvalue too negative to be rounding noise."""


def herm_defect(m: np.ndarray) -> float:
    """Max-norm distance between ``m`` and its conjugate transpose."""
    m = np.asarray(m, dtype=complex)
    return float(np.abs(m - m.conj().T).max())


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM_RECON) -> bool:
    return herm_defect(m) <= tol


def eig_hermitian(m: np.ndarray, tol: float = TOL_HERM_RECON):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and
    eigenvectors in the columns of ``v`` (orthonormal).  Raises
    :class:`NonHermitianInput` when the symmetry defect exceeds ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    defect = herm_defect(m)
    if defect > tol:
        raise NonHermitianInput(
            f"matrix is not Hermitian: max |m - m^dag| = {defect:.3e} > {tol:.1e}"
        )
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def matrix_sqrt_psd(m: np.ndarray, tol: float = TOL_HERM_RECON) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues in ``[-1e-6, 0)`` are treated as rounding noise and clamped
    to zero; anything more negative raises :class:`NegativeEigenvalue`.
    """
    w, v = eig_hermitian(m, tol=tol)
    if w.min() < -1e-6:
        raise NegativeEigenvalue(
            f"matrix is not PSD: min eigenvalue {w.min():.3e} < -1e-6"
        )
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def reduced_state(rho: np.ndarray, slot: int) -> np.ndarray:
    """Reduced 2x2 state keeping tensor slot 0 (first basis letter) or 1."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    if slot == 0:
        return np.einsum("ikjk->ij", r)
    if slot == 1:
        return np.einsum("kikj->ij", r)
    raise ValueError(f"slot must be 0 or 1, got {slot!r}")


def partial_trace(rho: np.ndarray, keep: str = "A") -> np.ndarray:
    """Reduced 2x2 density matrix of one subsystem of a two-qubit state.

    The subsystem tags follow the block formulas the published entropies
    use: ``keep="A"`` returns [[rho11+rho33, rho12+rho34], [c.c., rho22+rho44]]
    (the marginal of the second letter of the (HH, HV, VH, VV) order) and
    ``keep="B"`` the complementary first-letter marginal.  For arm-explicit
    work use :func:`reduced_state` with a tensor slot instead.
    """
    if keep == "A":
        return reduced_state(rho, 1)
    if keep == "B":
        return reduced_state(rho, 0)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho: np.ndarray, on: str = "A") -> np.ndarray:
    """Partial transpose of a two-qubit operator on one subsystem.

    Subsystem tags match :func:`partial_trace` (``on="A"`` transposes the
    second tensor slot).  The result stays Hermitian and trace-preserving
    but may have negative eigenvalues; that negativity is the entanglement
    signal, and its trace norm is independent of the transposed party.
    """
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    if on == "A":
        out = r.transpose(0, 3, 2, 1)
    elif on == "B":
        out = r.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"on must be 'A' or 'B', got {on!r}")
    return out.reshape(4, 4)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    m = np.asarray(m, dtype=complex)
    if is_hermitian(m, tol=1e-9):
        return float(np.abs(np.linalg.eigvalsh(m)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def validate_density_matrix(
    rho: np.ndarray,
    tol_herm: float = TOL_HERM_RECON,
    tol_trace: float = TOL_TRACE,
    tol_eig: float = 1e-9,
) -> None:
    """Enforce the density-matrix invariants; raises on violation."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    defect = herm_defect(rho)
    if defect > tol_herm:
        raise NonHermitianInput(f"hermiticity defect {defect:.3e} > {tol_herm:.1e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"trace {tr:.12g} differs from 1 by more than {tol_trace:.1e}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < -tol_eig or w.max() > 1.0 + tol_eig:
        raise NegativeEigenvalue(
            f"eigenvalues {w} outside [-{tol_eig:.0e}, 1+{tol_eig:.0e}]"
        )
    purity = float((w**2).sum())
    if not 0.0 <= purity <= 1.0 + tol_eig:
        raise ValueError(f"tr(rho^2) = {purity:.12g} outside [0, 1]")


def project_to_physical(
    m: np.ndarray,
    neg_tol: float = 1e-3,
    trace_tol: float = 1e-2,
) -> np.ndarray:
    """Repair a nearly-physical matrix into a strict density matrix.

    Hermitizes, clamps eigenvalues in ``[-neg_tol, 0)`` to zero and
    renormalizes the trace.  Intended for matrices read from files (e.g.
    published values rounded to few digits); internal reconstruction code
    should already be physical and uses the strict tolerances instead.
    """
    m = np.asarray(m, dtype=complex)
    defect = herm_defect(m)
    if defect > neg_tol:
        raise NonHermitianInput(f"hermiticity defect {defect:.3e} > {neg_tol:.1e}")
    h = 0.5 * (m + m.conj().T)
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace {tr:.6g} too far from 1 to repair")
    w, v = np.linalg.eigh(h)
    if w.min() < -neg_tol:
        raise NegativeEigenvalue(
            f"eigenvalue {w.min():.3e} below repair tolerance -{neg_tol:.0e}"
        )
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return out / np.trace(out).real
