"""Reproducible random two-qubit states for Monte-Carlo verification.

Randomness comes from an in-repo xoshiro256++ generator (Blackman & Vigna's
published 64-bit algorithm) seeded through splitmix64, with uniforms taken
from the top 53 bits and Gaussian variates produced by the Marsaglia polar
method. Everything is integer arithmetic plus elementary double operations,
so a (seed, config) pair replays the identical state sequence on any
platform - and can be replayed by a reimplementation in another language,
which is why the algorithm is pinned by name rather than delegated to a
library generator.

Draw order (normative for replay): Ginibre matrices fill row-major, each
entry drawing its real part then its imaginary part; pure-state vectors fill
in index order the same way. The polar method draws uniform pairs until
accepted and yields two Gaussians; the second is cached and consumed by the
next request.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import concurrence
from .qstate import DensityMatrix, validate

PRNG_ID = "xoshiro256++/splitmix64-seed/polar-gaussian"

HAAR_PURE = "haar-pure"
GINIBRE_MIXED = "ginibre-mixed"

_MASK = (1 << 64) - 1
_SUBSPACE_INDEX = {"I": 0, "II": 1, "III": 2, "IV": 3}


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256pp:
    """xoshiro256++ with splitmix64 seeding; uniform doubles and polar Gaussians."""

    def __init__(self, seed: int):
        z = seed & _MASK
        state = []
        for _ in range(4):
            z = (z + 0x9E3779B97F4A7C15) & _MASK
            w = z
            w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
            w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK
            state.append(w ^ (w >> 31))
        if not any(state):
            state[0] = 1  # the all-zero state is the one forbidden seed
        self._s = state
        self._spare_gaussian = None

    def next_u64(self) -> int:
        s = self._s
        out = (_rotl((s[0] + s[3]) & _MASK, 23) + s[0]) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return out

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + (hi - lo) * u

    def gaussian(self) -> float:
        if self._spare_gaussian is not None:
            g = self._spare_gaussian
            self._spare_gaussian = None
            return g
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        self._spare_gaussian = v * f
        return u * f

    def complex_gaussian(self) -> complex:
        re = self.gaussian()
        im = self.gaussian()
        return complex(re, im)


@dataclass(frozen=True)
class SamplerConfig:
    """Seed, ensemble, and optional slice confinement for a state stream.

    ``algorithm`` records the PRNG identity so dumped configurations pin the
    exact generator a replay needs.
    """

    seed: int
    ensemble: str = GINIBRE_MIXED
    subspace: str | None = None
    algorithm: str = PRNG_ID

    def __post_init__(self):
        if self.ensemble not in (HAAR_PURE, GINIBRE_MIXED):
            raise ValueError("unknown ensemble %r" % (self.ensemble,))
        if self.subspace is not None and self.subspace not in _SUBSPACE_INDEX:
            raise ValueError("subspace must be one of I, II, III, IV")
        if self.algorithm != PRNG_ID:
            raise ValueError("unsupported PRNG %r (this build provides %s)"
                             % (self.algorithm, PRNG_ID))


class StateSampler:
    """Stateful stream of valid DensityMatrix samples for one config."""

    def __init__(self, config: SamplerConfig):
        self.config = config
        self._rng = Xoshiro256pp(config.seed)
        self._dim = 4 if config.subspace is None else 3
        self._keep = (
            None if config.subspace is None
            else [i for i in range(4) if i != _SUBSPACE_INDEX[config.subspace]]
        )

    def _gaussian_matrix(self, n: int) -> np.ndarray:
        g = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                g[i, j] = self._rng.complex_gaussian()
        return g

    def _block(self) -> np.ndarray:
        n = self._dim
        if self.config.ensemble == HAAR_PURE:
            psi = np.empty(n, dtype=np.complex128)
            for i in range(n):
                psi[i] = self._rng.complex_gaussian()
            psi /= np.linalg.norm(psi)
            return np.outer(psi, psi.conj())
        g = self._gaussian_matrix(n)
        m = g @ g.conj().T
        m = 0.5 * (m + m.conj().T)
        return m / m.trace().real

    def state(self) -> DensityMatrix:
        block = self._block()
        if self._keep is None:
            return validate(block)
        full = np.zeros((4, 4), dtype=np.complex128)
        full[np.ix_(self._keep, self._keep)] = block
        return validate(full)

    def states(self, n: int) -> list:
        if n < 1:
            raise ValueError("sample count must be >= 1")
        return [self.state() for _ in range(n)]

    def entangled_states(self, n: int, min_concurrence: float = 1e-3) -> list:
        """Rejection-sample states with concurrence above the threshold.

        The default threshold keeps boundary states out: their crossing
        times can exceed any finite scan horizon.
        """
        out = []
        while len(out) < n:
            cand = self.state()
            if concurrence(cand).concurrence > min_concurrence:
                out.append(cand)
        return out

    def uniform(self, lo: float, hi: float) -> float:
        """Scalar draw from the same stream (for rates, times, and so on)."""
        return self._rng.uniform(lo, hi)


def sample(config: SamplerConfig, n: int) -> list:
    """Fresh deterministic batch: same (config, n) always returns the same states."""
    return StateSampler(config).states(n)


__all__ = [
    "PRNG_ID",
    "HAAR_PURE",
    "GINIBRE_MIXED",
    "Xoshiro256pp",
    "SamplerConfig",
    "StateSampler",
    "sample",
]
