# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled numerical kernels: complex Jacobi eigensolver, Kraus application,
fixed-step RK4 propagation. Mirrors py_backend; see that module for the
algorithm notes."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, sqrt

cnp.import_array()

DEF MAX_SWEEPS = 100
DEF GRADED_SWEEPS = 30

cdef double OFF_TOL = 1e-15
cdef double LOCAL_TOL = 1e-15
cdef double ABS_FLOOR = 1e-300


cdef inline double _cabs(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef void _rotate(double complex[:, ::1] a, double complex[:, ::1] v,
                  Py_ssize_t n, Py_ssize_t p, Py_ssize_t q,
                  double complex apq, double r, bint vectors) nogil:
    cdef double app = a[p, p].real
    cdef double aqq = a[q, q].real
    cdef double complex phase = apq / r
    cdef double tau = (aqq - app) / (2.0 * r)
    cdef double t = 1.0 / (fabs(tau) + hypot(1.0, tau))
    if tau < 0.0:
        t = -t
    cdef double c = 1.0 / sqrt(1.0 + t * t)
    cdef double s = t * c
    cdef double complex pc = phase.conjugate()
    cdef double complex sp = s * phase
    cdef double complex spc = s * pc
    cdef double complex cpc = c * pc
    cdef double complex cp = c * phase
    cdef Py_ssize_t k
    cdef double complex xp, xq

    for k in range(n):                      # A <- A G
        xp = a[k, p]
        xq = a[k, q]
        a[k, p] = c * xp - spc * xq
        a[k, q] = s * xp + cpc * xq
    for k in range(n):                      # A <- G^dagger A
        xp = a[p, k]
        xq = a[q, k]
        a[p, k] = c * xp - sp * xq
        a[q, k] = s * xp + cp * xq
    if vectors:
        for k in range(n):
            xp = v[k, p]
            xq = v[k, q]
            v[k, p] = c * xp - spc * xq
            v[k, q] = s * xp + cpc * xq


cdef double _offdiag_max(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef double off = 0.0
    cdef double r
    cdef Py_ssize_t p, q
    for p in range(n - 1):
        for q in range(p + 1, n):
            r = _cabs(a[p, q])
            if r > off:
                off = r
    return off


def jacobi_eigh(a, compute_vectors=True, graded=False):
    """Hermitian eigendecomposition; same contract as py_backend.jacobi_eigh."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] awork = \
        np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = awork.shape[0]
    cdef bint vectors = bool(compute_vectors)
    cdef bint do_graded = bool(graded)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] vwork = \
        np.eye(n, dtype=np.complex128) if vectors else \
        np.zeros((1, 1), dtype=np.complex128)
    cdef double complex[:, ::1] am = awork
    cdef double complex[:, ::1] vm = vwork

    cdef double scale = float(np.abs(awork).max())
    if scale == 0.0:
        return np.zeros(n), (vwork if vectors else None)
    cdef double tol = OFF_TOL * scale
    cdef double r, bound
    cdef double complex apq
    cdef Py_ssize_t p, q, sweep
    cdef bint converged = False
    cdef bint rotated

    with nogil:
        for sweep in range(MAX_SWEEPS):
            if _offdiag_max(am, n) <= tol:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = am[p, q]
                    r = _cabs(apq)
                    if r <= tol:
                        continue
                    _rotate(am, vm, n, p, q, apq, r, vectors)
    if not converged:
        raise RuntimeError("jacobi_eigh: no convergence after %d sweeps" % MAX_SWEEPS)

    if do_graded:
        with nogil:
            for sweep in range(GRADED_SWEEPS):
                rotated = False
                for p in range(n - 1):
                    for q in range(p + 1, n):
                        apq = am[p, q]
                        r = _cabs(apq)
                        if r == 0.0:
                            continue
                        if r < ABS_FLOOR:
                            am[p, q] = 0.0
                            am[q, p] = 0.0
                            continue
                        bound = LOCAL_TOL * sqrt(
                            fabs(am[p, p].real) * fabs(am[q, q].real))
                        if r > bound:
                            _rotate(am, vm, n, p, q, apq, r, vectors)
                            rotated = True
                if not rotated:
                    break

    w = awork.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if vectors:
        return w, np.ascontiguousarray(vwork[:, order])
    return w, None


def apply_kraus(ops, rho):
    """sum_k ops[k] @ rho @ ops[k]^dagger for a stacked (m, n, n) family."""
    kk = np.ascontiguousarray(ops, dtype=np.complex128)
    rr = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef Py_ssize_t m = kk.shape[0]
    cdef Py_ssize_t n = kk.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = \
        np.zeros((n, n), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tmp = \
        np.zeros((n, n), dtype=np.complex128)
    cdef const double complex[:, :, ::1] K = kk
    cdef const double complex[:, ::1] R = rr
    cdef double complex[:, ::1] O = out
    cdef double complex[:, ::1] T = tmp
    cdef Py_ssize_t k, i, j, b
    cdef double complex acc

    with nogil:
        for k in range(m):
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for b in range(n):
                        acc = acc + K[k, i, b] * R[b, j]
                    T[i, j] = acc
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for b in range(n):
                        acc = acc + T[i, b] * K[k, j, b].conjugate()
                    O[i, j] = O[i, j] + acc
    return out


def rk4_propagate(gen, v0, double h, long n_steps):
    """Advance v' = gen @ v through n_steps classical RK4 stages of size h."""
    ll = np.ascontiguousarray(gen, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vv = \
        np.array(v0, dtype=np.complex128)
    cdef Py_ssize_t d = ll.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k1 = np.zeros(d, np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k2 = np.zeros(d, np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k3 = np.zeros(d, np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] k4 = np.zeros(d, np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tt = np.zeros(d, np.complex128)
    cdef const double complex[:, ::1] L = ll
    cdef double complex[::1] v = vv
    cdef double complex[::1] a1 = k1, a2 = k2, a3 = k3, a4 = k4, t = tt
    cdef Py_ssize_t i, j, step
    cdef double complex acc
    cdef double h2 = h / 2.0, h6 = h / 6.0

    with nogil:
        for step in range(n_steps):
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + L[i, j] * v[j]
                a1[i] = acc
            for i in range(d):
                t[i] = v[i] + h2 * a1[i]
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + L[i, j] * t[j]
                a2[i] = acc
            for i in range(d):
                t[i] = v[i] + h2 * a2[i]
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + L[i, j] * t[j]
                a3[i] = acc
            for i in range(d):
                t[i] = v[i] + h * a3[i]
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + L[i, j] * t[j]
                a4[i] = acc
            for i in range(d):
                v[i] = v[i] + h6 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])
    return vv
