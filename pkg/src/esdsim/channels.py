"""Kraus-operator noise channels for two independently damped qubits.

Each qubit sees local amplitude damping (population relaxation at rate G1),
local phase damping (dephasing at rate G2), or both at once. The elapsed-time
parametrization uses the decay scalars

    g1 = exp(-G1 t / 2)    w1 = sqrt(1 - g1^2)     (amplitude damping)
    g2 = exp(-G2 t)        w2 = sqrt(1 - g2^2)     (phase damping)

note the factor-of-two asymmetry between the two exponents. Two-qubit Kraus
operators are dense 4x4 tensor products of per-qubit 2x2 factors:

    amplitude:  M1 = [[g1, 0], [0, 1]]        M2 = [[0, 0], [w1, 0]]
    phase:      P1 = [[g2, 0], [0, 1]]        P2 = [[w2, 0], [0, 0]]
    composite:  C1 = [[g1 g2, 0], [0, 1]]     C2 = [[g1 w2, 0], [0, 0]]
                C3 = [[0, 0], [w1, 0]]

The composite channel is built directly from its nine C_k (x) C_l operators,
not by chaining the two single-noise channels, so the factorization identity
(composite == amplitude after phase == phase after amplitude, at equal t) is
a genuine cross-check and ``check_factorization`` measures it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .qstate import DensityMatrix, StateValidationError, as_array, validate


class ChannelKind(str, enum.Enum):
    AMPLITUDE = "am"
    PHASE = "ph"
    COMPOSITE = "composite"


def coerce_kind(kind) -> ChannelKind:
    if isinstance(kind, ChannelKind):
        return kind
    return ChannelKind(str(kind))


class NegativeTimeError(ValueError):
    pass


class InternalChannelError(RuntimeError):
    """A channel produced an invalid state; indicates a bug, not bad input."""


@dataclass(frozen=True)
class NoiseRates:
    """Per-party relaxation (g1_*) and dephasing (g2_*) rates, all >= 0."""

    g1_a: float
    g1_b: float
    g2_a: float
    g2_b: float

    def __post_init__(self):
        for name in ("g1_a", "g1_b", "g2_a", "g2_b"):
            if getattr(self, name) < 0.0:
                raise ValueError("rate %s must be >= 0" % name)

    def as_tuple(self):
        return (self.g1_a, self.g1_b, self.g2_a, self.g2_b)

    @property
    def max_rate(self) -> float:
        return max(self.as_tuple())


@dataclass(frozen=True)
class ChannelParams:
    """The eight decay scalars at one elapsed time (g^2 + w^2 = 1 pairwise)."""

    g1_a: float
    w1_a: float
    g1_b: float
    w1_b: float
    g2_a: float
    w2_a: float
    g2_b: float
    w2_b: float


def params_at(rates: NoiseRates, t: float) -> ChannelParams:
    """Evaluate the decay scalars for the given rates at elapsed time t >= 0."""
    if t < 0.0:
        raise NegativeTimeError("elapsed time must be >= 0, got %r" % t)
    g1_a = math.exp(-0.5 * rates.g1_a * t)
    g1_b = math.exp(-0.5 * rates.g1_b * t)
    g2_a = math.exp(-rates.g2_a * t)
    g2_b = math.exp(-rates.g2_b * t)
    return ChannelParams(
        g1_a=g1_a, w1_a=math.sqrt(1.0 - g1_a * g1_a),
        g1_b=g1_b, w1_b=math.sqrt(1.0 - g1_b * g1_b),
        g2_a=g2_a, w2_a=math.sqrt(1.0 - g2_a * g2_a),
        g2_b=g2_b, w2_b=math.sqrt(1.0 - g2_b * g2_b),
    )


@dataclass(frozen=True, eq=False)
class KrausSet:
    """A stacked family of 4x4 Kraus operators satisfying sum K^dag K = 1."""

    kind: ChannelKind
    operators: np.ndarray  # (m, 4, 4) complex, read-only
    params: ChannelParams

    def completeness_defect(self) -> float:
        """Max-entry deviation of sum_k K_k^dagger K_k from the identity."""
        acc = np.einsum("kba,kbc->ac", self.operators.conj(), self.operators)
        return float(np.abs(acc - np.eye(4)).max())


def _amp_factors(g1: float, w1: float) -> np.ndarray:
    f = np.zeros((2, 2, 2), dtype=np.complex128)
    f[0, 0, 0] = g1
    f[0, 1, 1] = 1.0
    f[1, 1, 0] = w1
    return f


def _phase_factors(g2: float, w2: float) -> np.ndarray:
    f = np.zeros((2, 2, 2), dtype=np.complex128)
    f[0, 0, 0] = g2
    f[0, 1, 1] = 1.0
    f[1, 0, 0] = w2
    return f


def _composite_factors(g1: float, w1: float, g2: float, w2: float) -> np.ndarray:
    f = np.zeros((3, 2, 2), dtype=np.complex128)
    f[0, 0, 0] = g1 * g2
    f[0, 1, 1] = 1.0
    f[1, 0, 0] = g1 * w2
    f[2, 1, 0] = w1
    return f


def _tensor_ops(factors_a: np.ndarray, factors_b: np.ndarray) -> np.ndarray:
    """All pairwise 2x2 (x) 2x2 tensor products, stacked row-major in (k, l)."""
    prod = np.einsum("aij,bkl->abikjl", factors_a, factors_b)
    m = factors_a.shape[0] * factors_b.shape[0]
    return np.ascontiguousarray(prod.reshape(m, 4, 4))


def kraus_amplitude(params: ChannelParams) -> KrausSet:
    """Four-operator amplitude-damping set M_i (x) M_j."""
    ops = _tensor_ops(
        _amp_factors(params.g1_a, params.w1_a),
        _amp_factors(params.g1_b, params.w1_b),
    )
    ops.flags.writeable = False
    return KrausSet(ChannelKind.AMPLITUDE, ops, params)


def kraus_phase(params: ChannelParams) -> KrausSet:
    """Four-operator phase-damping set P_i (x) P_j."""
    ops = _tensor_ops(
        _phase_factors(params.g2_a, params.w2_a),
        _phase_factors(params.g2_b, params.w2_b),
    )
    ops.flags.writeable = False
    return KrausSet(ChannelKind.PHASE, ops, params)


def kraus_composite(params: ChannelParams) -> KrausSet:
    """Nine-operator set C_k (x) C_l for both noises acting at once."""
    ops = _tensor_ops(
        _composite_factors(params.g1_a, params.w1_a, params.g2_a, params.w2_a),
        _composite_factors(params.g1_b, params.w1_b, params.g2_b, params.w2_b),
    )
    ops.flags.writeable = False
    return KrausSet(ChannelKind.COMPOSITE, ops, params)


_BUILDERS = {
    ChannelKind.AMPLITUDE: kraus_amplitude,
    ChannelKind.PHASE: kraus_phase,
    ChannelKind.COMPOSITE: kraus_composite,
}


def kraus_set(kind, params: ChannelParams) -> KrausSet:
    """Build the Kraus set of the requested kind at the given parameters."""
    return _BUILDERS[coerce_kind(kind)](params)


def channel_at(kind, rates: NoiseRates, t: float) -> KrausSet:
    return kraus_set(kind, params_at(rates, t))


def apply_raw(operators: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Kraus sum on a bare array; no validation (hot path)."""
    return _kernels.apply_kraus(operators, rho)


def apply(kset: KrausSet, rho) -> DensityMatrix:
    """Evolve a state through the channel: rho -> sum_k K_k rho K_k^dagger.

    The result is validated; a failure here means the channel construction
    itself is broken and surfaces as InternalChannelError.
    """
    out = apply_raw(kset.operators, as_array(rho))
    try:
        return validate(out)
    except StateValidationError as exc:
        raise InternalChannelError(
            "channel %s produced an invalid state: %s" % (kset.kind.value, exc)
        ) from exc


def check_factorization(rates: NoiseRates, t: float, rho) -> float:
    """Max-entry deviation between the composite channel and the two orderings
    of amplitude-then-phase at the same elapsed time (0 up to roundoff)."""
    arr = as_array(rho)
    p = params_at(rates, t)
    both = apply_raw(kraus_composite(p).operators, arr)
    am = kraus_amplitude(p).operators
    ph = kraus_phase(p).operators
    am_after_ph = apply_raw(am, apply_raw(ph, arr))
    ph_after_am = apply_raw(ph, apply_raw(am, arr))
    return float(
        max(np.abs(both - am_after_ph).max(), np.abs(both - ph_after_am).max())
    )


def check_semigroup(kind, rates: NoiseRates, tau: float, tau_p: float, rho) -> float:
    """Max-entry deviation of evolving tau + tau_p in one step versus two."""
    kind = coerce_kind(kind)
    arr = as_array(rho)
    one = apply_raw(channel_at(kind, rates, tau + tau_p).operators, arr)
    two = apply_raw(
        channel_at(kind, rates, tau_p).operators,
        apply_raw(channel_at(kind, rates, tau).operators, arr),
    )
    return float(np.abs(one - two).max())
