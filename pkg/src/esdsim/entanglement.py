"""Wootters concurrence and closed-form entanglement decay laws.

The concurrence of a two-qubit state rho is C = max(0, L) with

    L = sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)

where l1 >= ... >= l4 are the eigenvalues of the spin-flip product
R = rho (sy (x) sy) rho* (sy (x) sy). Instead of eigensolving the
non-Hermitian R directly, the sqrt(l_i) are computed as the singular values
of B = sqrt(rho) (sy (x) sy) sqrt(rho*): since B B^dagger is Hermitian with
the same spectrum as R, the singular values ARE the sqrt(l_i), and obtaining
them from the Hermitian block matrix [[0, B], [B^dagger, 0]] keeps their
absolute error at machine scale. Going through R itself would square the
noise floor of the analytically-zero eigenvalues, which matters because the
decay laws below are compared against the numerical pipeline at 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channels import NoiseRates, ChannelKind, coerce_kind, params_at
from .qstate import TOL_ZERO, as_array

# sy (x) sy in the fixed basis: real, +-1 on the antidiagonal, involutory.
SPIN_FLIP = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=np.complex128,
)
SPIN_FLIP.flags.writeable = False

EIG_CLAMP = 1e-12  # round-off negatives above this magnitude are a failure


class EigFailureError(RuntimeError):
    """The concurrence eigenproblem failed to converge or went negative."""


class NotInSubspaceIError(ValueError):
    """The state has population in |up,up>, so the closed forms do not apply."""


@dataclass(frozen=True)
class ConcurrenceResult:
    """sqrt-eigenvalues (descending), their alternating sum L, and C = max(0, L)."""

    sqrt_eigs: tuple
    lambda_cap: float
    concurrence: float


def r_matrix(rho) -> np.ndarray:
    """The spin-flip product R = rho (sy(x)sy) rho* (sy(x)sy)."""
    arr = as_array(rho)
    return arr @ SPIN_FLIP @ arr.conj() @ SPIN_FLIP


def _sqrt_psd(arr: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix via the graded Jacobi solver."""
    w, v = _kernels.jacobi_eigh(arr, compute_vectors=True, graded=True)
    w = np.sqrt(np.maximum(w, 0.0))
    s = (v * w) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def concurrence(rho) -> ConcurrenceResult:
    """Wootters concurrence of a (valid) two-qubit density matrix."""
    arr = as_array(rho)
    s = _sqrt_psd(arr)
    b = s @ SPIN_FLIP @ s.conj()
    aug = np.zeros((8, 8), dtype=np.complex128)
    aug[:4, 4:] = b
    aug[4:, :4] = b.conj().T
    try:
        w8, _ = _kernels.jacobi_eigh(aug, compute_vectors=False)
    except RuntimeError as exc:
        raise EigFailureError(str(exc)) from exc
    sig = w8[:4]
    if sig[-1] < -EIG_CLAMP:
        raise EigFailureError(
            "singular value %.3e below -%g" % (sig[-1], EIG_CLAMP)
        )
    sig = np.maximum(sig, 0.0)
    lam = float(sig[0] - sig[1] - sig[2] - sig[3])
    return ConcurrenceResult(tuple(float(x) for x in sig), lam, max(0.0, lam))


def lambda_dephased_limit(rho) -> float:
    """L of the fully dephased state, from the populations alone.

    Dephasing for an infinite time wipes every off-diagonal entry, and the
    concurrence of the remaining diagonal state reduces to a two-branch
    expression in the populations: -2 sqrt(p1 p4) when p2 p3 >= p1 p4, else
    -2 sqrt(p2 p3). Ties fall on the first branch (both coincide there).
    """
    p = as_array(rho).diagonal().real
    outer = p[0] * p[3]
    inner = p[1] * p[2]
    if inner >= outer:
        return -2.0 * np.sqrt(outer)
    return -2.0 * np.sqrt(inner)


def lambda_rhoI_closed_form(rho0, rates: NoiseRates, t: float, kind) -> float:
    """Closed-form L(t) for initial states with no |up,up> population.

    For such states only two of the spin-flip eigenvalues are nonzero,
    l_{1,2} = alpha +- beta, giving

        L(t) = 2 beta / (sqrt(alpha + beta) + sqrt(alpha - beta))

    with, writing m = rho23 rho32, d = rho22 rho33, G1 = g1_a g1_b and
    g2 = g2_a g2_b evaluated at time t:

        phase damping:      alpha = g2^2 m + d          beta = 2 g2 sqrt(m d)
        amplitude damping:  alpha = G1^2 (m + d)        beta = 2 G1^2 sqrt(m d)
        both noises:        alpha = G1^2 (g2^2 m + d)   beta = 2 G1^2 g2 sqrt(m d)

    L(t) is nonnegative for every finite t, so these states never lose their
    entanglement abruptly; it is identically zero iff rho23 vanishes.
    """
    kind = coerce_kind(kind)
    arr = as_array(rho0)
    if arr[0, 0].real > TOL_ZERO:
        raise NotInSubspaceIError(
            "population in |up,up> is %.3e > %g" % (arr[0, 0].real, TOL_ZERO)
        )
    m = float((arr[1, 2] * arr[2, 1]).real)  # |rho23|^2 for Hermitian input
    d = float(arr[1, 1].real * arr[2, 2].real)
    p = params_at(rates, t)
    g2 = p.g2_a * p.g2_b
    g1 = p.g1_a * p.g1_b
    if kind is ChannelKind.PHASE:
        alpha = g2 * g2 * m + d
        beta = 2.0 * g2 * np.sqrt(m * d)
    elif kind is ChannelKind.AMPLITUDE:
        alpha = g1 * g1 * (m + d)
        beta = 2.0 * g1 * g1 * np.sqrt(m * d)
    else:
        alpha = g1 * g1 * (g2 * g2 * m + d)
        beta = 2.0 * g1 * g1 * g2 * np.sqrt(m * d)
    if alpha + beta <= 0.0:
        return 0.0
    # alpha - beta is a perfect square analytically; clamp round-off only
    diff = alpha - beta
    if diff < 0.0:
        if diff < -EIG_CLAMP:
            raise EigFailureError("alpha - beta = %.3e below -%g" % (diff, EIG_CLAMP))
        diff = 0.0
    return float(2.0 * beta / (np.sqrt(alpha + beta) + np.sqrt(diff)))
