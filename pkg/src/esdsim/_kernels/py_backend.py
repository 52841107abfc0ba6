"""Pure numpy implementations of the numerical kernels.

These are the fallback used when the compiled extension is unavailable (or
when ``ESDSIM_BACKEND=python`` forces them). They implement the same
algorithms as ``_core``:

* ``jacobi_eigh``    : cyclic complex Jacobi eigensolver for Hermitian matrices
* ``apply_kraus``    : rho -> sum_k K_k rho K_k^dagger
* ``rk4_propagate``  : n fixed-size classical Runge-Kutta steps for v' = L v

The Jacobi solver is kept in-repo on purpose: closed-form quartic roots are
ill-conditioned for clustered eigenvalues, and library solvers would hide the
one numerical routine the rest of the package leans on.
"""

from __future__ import annotations

import math

import numpy as np

MAX_SWEEPS = 100
GRADED_SWEEPS = 30
OFF_TOL = 1e-15      # global off-diagonal target, relative to max |entry|
LOCAL_TOL = 1e-15    # per-pair target relative to sqrt(|a_pp * a_qq|)
ABS_FLOOR = 1e-300   # below this an off-diagonal entry is numerical dust


def _rotate(a, v, p, q, apq, r):
    """One two-sided Jacobi rotation zeroing a[p, q] (and its mirror)."""
    app = a[p, p].real
    aqq = a[q, q].real
    phase = apq / r
    tau = (aqq - app) / (2.0 * r)
    t = 1.0 / (abs(tau) + math.hypot(1.0, tau))
    if tau < 0.0:
        t = -t
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    sp = s * phase
    spc = s * phase.conjugate()
    cpc = c * phase.conjugate()
    cp = c * phase

    # A <- A G  (columns p, q of the unitary G differ from identity)
    colp = a[:, p].copy()
    colq = a[:, q].copy()
    a[:, p] = c * colp - spc * colq
    a[:, q] = s * colp + cpc * colq
    # A <- G^dagger A
    rowp = a[p, :].copy()
    rowq = a[q, :].copy()
    a[p, :] = c * rowp - sp * rowq
    a[q, :] = s * rowp + cp * rowq
    if v is not None:
        vp = v[:, p].copy()
        vq = v[:, q].copy()
        v[:, p] = c * vp - spc * vq
        v[:, q] = s * vp + cpc * vq


def _offdiag_max(a, n):
    off = 0.0
    for p in range(n - 1):
        row = np.abs(a[p, p + 1 :]).max()
        if row > off:
            off = row
    return off


def jacobi_eigh(a, compute_vectors=True, graded=False):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) complex ndarray, Hermitian.
    compute_vectors : accumulate the unitary of eigenvectors as well.
    graded : after global convergence, run extra sweeps with the per-pair
        threshold ``|a_pq| <= LOCAL_TOL * sqrt(|a_pp * a_qq|)``. For positive
        semidefinite matrices with widely different diagonal scales this
        recovers small eigenvalues to relative (not just absolute) accuracy.

    Returns
    -------
    (w, v) : eigenvalues as float64 in descending order and the matching
        eigenvector columns (or None); ``a @ v[:, i] == w[i] * v[:, i]``.

    Raises
    ------
    RuntimeError if the global phase has not converged after ``MAX_SWEEPS``
    sweeps (does not happen for finite Hermitian input).
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if compute_vectors else None

    scale = float(np.abs(a).max())
    if scale == 0.0:
        return np.zeros(n), v
    tol = OFF_TOL * scale

    converged = False
    for _ in range(MAX_SWEEPS):
        if _offdiag_max(a, n) <= tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= tol:
                    continue
                _rotate(a, v, p, q, apq, r)
    if not converged:
        raise RuntimeError("jacobi_eigh: no convergence after %d sweeps" % MAX_SWEEPS)

    if graded:
        # Refinement with a diagonal-relative threshold. Capped and allowed to
        # stop early; never raises (indefinite matrices with a near-null
        # eigenvalue cannot always satisfy the local bound).
        for _ in range(GRADED_SWEEPS):
            rotated = False
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = abs(apq)
                    if r == 0.0:
                        continue
                    if r < ABS_FLOOR:
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        continue
                    bound = LOCAL_TOL * math.sqrt(
                        abs(a[p, p].real) * abs(a[q, q].real)
                    )
                    if r > bound:
                        _rotate(a, v, p, q, apq, r)
                        rotated = True
            if not rotated:
                break

    w = a.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if compute_vectors:
        v = np.ascontiguousarray(v[:, order])
    return w, v


def apply_kraus(ops, rho):
    """Apply a stacked Kraus family: sum_k ops[k] @ rho @ ops[k]^dagger."""
    tmp = ops @ rho
    return np.einsum("kab,kcb->ac", tmp, ops.conj())


def rk4_propagate(gen, v0, h, n_steps):
    """Advance v' = gen @ v through ``n_steps`` classical RK4 steps of size h.

    For a constant linear generator the four-stage update collapses to the
    degree-4 polynomial I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24 applied once
    per step; precomputing it keeps the pure-Python loop inexpensive.
    """
    gen = np.asarray(gen, dtype=np.complex128)
    d = gen.shape[0]
    hl = h * gen
    m2 = hl @ hl
    m3 = m2 @ hl
    m4 = m3 @ hl
    step = np.eye(d, dtype=np.complex128) + hl + m2 / 2.0 + m3 / 6.0 + m4 / 24.0
    v = np.array(v0, dtype=np.complex128)
    for _ in range(n_steps):
        v = step @ v
    return v
