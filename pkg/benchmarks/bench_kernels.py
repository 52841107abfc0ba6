#!/usr/bin/env python3
"""Timing comparison: compiled kernels versus the pure-numpy fallback.

Reports per-call times for the three kernels on workloads shaped like the
package's hot paths (4x4 state eigensolve, 8x8 singular-value eigensolve,
9-operator Kraus application, 16x16 RK4 propagation), plus one end-to-end
disentanglement-time search under the active backend.

Run:  python benchmarks/bench_kernels.py
      ESDSIM_BACKEND=python python benchmarks/bench_kernels.py   # end-to-end fallback timing
"""

import time

import numpy as np

from esdsim import _kernels
from esdsim._kernels import py_backend

try:
    from esdsim._kernels import _core
except ImportError:
    _core = None


def timeit(fn, *args, repeat=2000):
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def main():
    rng = np.random.default_rng(7)
    h4 = hermitian(rng, 4)
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    aug = np.zeros((8, 8), complex)
    aug[:4, 4:] = b
    aug[4:, :4] = b.conj().T
    ops = rng.normal(size=(9, 4, 4)) + 1j * rng.normal(size=(9, 4, 4))
    rho = hermitian(rng, 4)
    gen = rng.normal(size=(16, 16)) * 0.2
    gen = (gen - np.diag(np.abs(gen).sum(axis=1))).astype(complex)
    v0 = (rng.normal(size=16) + 1j * rng.normal(size=16))

    cases = [
        ("jacobi_eigh 4x4 (vectors, graded)",
         lambda be: timeit(be.jacobi_eigh, h4, True, True)),
        ("jacobi_eigh 8x8 (values only)",
         lambda be: timeit(be.jacobi_eigh, aug, False, False)),
        ("apply_kraus 9 ops",
         lambda be: timeit(be.apply_kraus, ops, rho)),
        ("rk4_propagate 16x16, 1000 steps",
         lambda be: timeit(be.rk4_propagate, gen, v0, 1e-3, 1000, repeat=50)),
    ]

    backends = [("python", py_backend)]
    if _core is not None:
        backends.append(("compiled", _core))

    width = max(len(name) for name, _ in cases)
    print("active backend:", _kernels.BACKEND)
    header = "kernel".ljust(width) + "".join(n.rjust(14) for n, _ in backends)
    if len(backends) == 2:
        header += "speedup".rjust(10)
    print(header)
    for name, run in cases:
        times = [run(be) for _, be in backends]
        row = name.ljust(width) + "".join(
            ("%.1f us" % (t * 1e6)).rjust(14) for t in times
        )
        if len(times) == 2:
            row += ("%.1fx" % (times[0] / times[1])).rjust(10)
        print(row)

    # end-to-end: one finite and one asymptotic crossing search
    from esdsim import dynamics
    from esdsim.channels import NoiseRates
    from esdsim.qstate import preset

    rates = NoiseRates(1, 1, 1, 1)
    start = time.perf_counter()
    for _ in range(20):
        dynamics.esd_time(preset("bell-phi+"), "composite", rates)
        dynamics.esd_time(preset("bell-psi+"), "composite", rates)
    per_pair = (time.perf_counter() - start) / 20
    print("\nesd_time pair (finite + asymptotic), %s backend: %.1f ms"
          % (_kernels.BACKEND, per_pair * 1e3))


if __name__ == "__main__":
    main()
