"""Entanglement measures and entropies of a two-qubit state.

Units follow the defining formulas: Von Neumann entropy and entanglement of
formation in bits (log2), Renyi 2-entropy in nats (ln).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import eig_hermitian, matrix_sqrt_psd, partial_trace, partial_transpose, trace_norm

__all__ = [
    "SPIN_FLIP",
    "EntanglementReport",
    "fidelity",
    "von_neumann_entropy",
    "linear_entropy",
    "concurrence",
    "tangle_and_eof",
    "renyi2_subsystem",
    "log_negativity",
    "entanglement_report",
]

#: Spin-flip operator sigma_y (x) sigma_y in the (HH, HV, VH, VV) basis.
SPIN_FLIP = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=complex,
)


def fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.

    Evaluated as the squared sum of the singular values of
    sqrt(rho1) @ sqrt(rho2), which is the same quantity but keeps the
    computation backward-stable (and symmetric to machine precision) when
    either state is rank deficient.  Reduces to |<psi1|psi2>|^2 for pure
    inputs.
    """
    s1 = matrix_sqrt_psd(rho1)
    s2 = matrix_sqrt_psd(rho2)
    f = float(np.linalg.svd(s1 @ s2, compute_uv=False).sum()) ** 2
    return min(max(f, 0.0), 1.0)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-sum p log2 p over the eigenvalues, with 0 log 0 := 0. In bits."""
    w, _ = eig_hermitian(rho)
    w = np.clip(w, 0.0, None)
    p = w[w > 1e-15]
    return float(-(p * np.log2(p)).sum())


def linear_entropy(rho: np.ndarray) -> float:
    """(4/3)(1 - tr rho^2): 0 for pure states, 1 for the maximally mixed."""
    rho = np.asarray(rho, dtype=complex)
    purity = float(np.trace(rho @ rho).real)
    return 4.0 / 3.0 * (1.0 - purity)


def concurrence(rho: np.ndarray):
    """Wootters concurrence of a two-qubit state.

    Returns ``(C, r)`` where ``r`` holds the descending square roots of the
    eigenvalues of rho (Sf rho* Sf) and ``C = max(0, r1 - r2 - r3 - r4)``.
    The r values are computed as the singular values of
    sqrt(rho) Sf conj(sqrt(rho)): the same spectrum as the non-Hermitian
    product, without its loss of precision near degeneracies.
    """
    rho = np.asarray(rho, dtype=complex)
    s = matrix_sqrt_psd(rho)
    r = np.linalg.svd(s @ SPIN_FLIP @ s.conj(), compute_uv=False)
    r = np.sort(np.clip(r, 0.0, None))[::-1]
    c = max(0.0, float(r[0] - r[1] - r[2] - r[3]))
    return min(c, 1.0), r


def tangle_and_eof(c: float):
    """Tangle T = C^2 and entanglement of formation E = h((1+sqrt(1-C^2))/2)."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concurrence must lie in [0, 1], got {c}")
    t = c * c
    x = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - t)))
    e = float(_binary_entropy(x))
    return t, e


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)


def renyi2_subsystem(rho: np.ndarray, subsystem: str = "A") -> float:
    """Renyi 2-entropy -ln tr(rho_sub^2) of one arm's reduced state. In nats."""
    sub = partial_trace(rho, keep=subsystem)
    purity = float(np.trace(sub @ sub).real)
    return float(-np.log(purity))


def log_negativity(rho: np.ndarray) -> float:
    """log2 of the trace norm of the partial transpose, clamped at >= 0.

    Values below the numerical noise floor (1e-12) collapse to exactly 0 so
    that PPT states report zero rather than rounding dust.
    """
    tn = trace_norm(partial_transpose(rho, on="A"))
    en = float(np.log2(tn))
    return en if en > 1e-12 else 0.0


@dataclass(frozen=True)
class EntanglementReport:
    """All state-quality metrics for one density matrix."""

    fidelity_to_target: float
    von_neumann_bits: float
    linear_entropy: float
    concurrence: float
    tangle: float
    eof_bits: float
    renyi2_a_nats: float
    log_negativity: float
    r_eigenvalues: tuple

    def as_dict(self) -> dict:
        d = asdict(self)
        d["r_eigenvalues"] = list(self.r_eigenvalues)
        return d


def entanglement_report(rho: np.ndarray, target: np.ndarray | None = None) -> EntanglementReport:
    """Compute every supported measure for ``rho``.

    ``target`` is a pure-state 4-vector (default: the phi=0 Bell state)
    against which the fidelity is evaluated.
    """
    if target is None:
        from .jones import bell_state

        target = bell_state(0.0)
    target = np.asarray(target, dtype=complex)
    rho_target = np.outer(target, target.conj())

    c, r = concurrence(rho)
    t, e = tangle_and_eof(c)
    return EntanglementReport(
        fidelity_to_target=fidelity(rho, rho_target),
        von_neumann_bits=von_neumann_entropy(rho),
        linear_entropy=linear_entropy(rho),
        concurrence=c,
        tangle=t,
        eof_bits=e,
        renyi2_a_nats=renyi2_subsystem(rho, "A"),
        log_negativity=log_negativity(rho),
        r_eigenvalues=tuple(float(x) for x in r),
    )
