"""Partition of two-qubit states by their disentanglement behavior.

States with at least one vanishing population sit in one of four
3-dimensional slices of the Hilbert space, labeled by which basis population
is zero (I: |uu>, II: |ud>, III: |du>, IV: |dd>). Under pure dephasing,
membership in any slice is exactly what separates asymptotic decay from
abrupt death. When amplitude damping acts on both qubits as well, only
slice I survives as the abrupt-death-free region: every evolved state keeps
strictly positive populations once |uu> is occupied, so a trajectory that
starts outside slice I can never re-enter any slice, and its entanglement
must hit zero in finite time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelKind, NoiseRates, coerce_kind, params_at
from .entanglement import concurrence
from .qstate import TOL_ZERO, as_array

ESD_FREE = "esd-free"
ABRUPT_ESD = "abrupt-esd"
NOT_ENTANGLED = "not-entangled"

ENTANGLEMENT_GATE = 1e-10  # concurrence at t=0 below this counts as separable

_CANONICAL_ORDER = ((1, "I"), (2, "II"), (3, "III"), (4, "IV"))


class UndecidedAmplitudeError(ValueError):
    """Raised when the analytic rules cannot decide the verdict.

    Amplitude damping alone admits no simple population-based partition
    outside slice I; callers should fall back to the numerical crossing
    finder. The same applies to a composite channel whose relaxation rate
    vanishes for exactly one party.
    """


@dataclass(frozen=True)
class SubspaceLabel:
    """Vanishing-population indices (1-based) and the canonical slice label.

    A state with several vanishing populations is absorbed into the lowest
    applicable slice; in particular anything with no |uu> population is
    slice I regardless of the other diagonals.
    """

    vanishing: frozenset
    canonical: str | None


@dataclass(frozen=True)
class EsdVerdict:
    kind: ChannelKind
    verdict: str
    reason: str


def subspace(rho) -> SubspaceLabel:
    """Classify by which populations fall at or below the vanishing cutoff."""
    p = as_array(rho).diagonal().real
    vanishing = frozenset(i + 1 for i in range(4) if p[i] <= TOL_ZERO)
    canonical = None
    for index, label in _CANONICAL_ORDER:
        if index in vanishing:
            canonical = label
            break
    return SubspaceLabel(vanishing, canonical)


def predict_esd(rho, kind, rates: NoiseRates | None = None) -> EsdVerdict:
    """Analytic abrupt-vs-asymptotic verdict for an initial state.

    With ``rates=None`` the verdict assumes the generic case of every rate
    strictly positive. Passing rates refines degenerate composite channels:
    no relaxation at all falls back to the dephasing rule, no dephasing falls
    back to the amplitude rule, and relaxation on exactly one party raises
    UndecidedAmplitudeError outside slice I.
    """
    kind = coerce_kind(kind)
    c0 = concurrence(rho).concurrence
    if c0 <= ENTANGLEMENT_GATE:
        return EsdVerdict(kind, NOT_ENTANGLED, "separable-at-t0")
    label = subspace(rho)

    if kind is ChannelKind.COMPOSITE and rates is not None:
        relax_a = rates.g1_a > 0.0
        relax_b = rates.g1_b > 0.0
        dephasing = rates.g2_a > 0.0 or rates.g2_b > 0.0
        if not any(rates.as_tuple()):
            return EsdVerdict(kind, ESD_FREE, "no-noise")
        if label.canonical == "I":
            # slice I survives every local channel mix
            return EsdVerdict(kind, ESD_FREE, "uu-population-free")
        if relax_a and relax_b and dephasing:
            kind_rule = ChannelKind.COMPOSITE
        elif not relax_a and not relax_b:
            kind_rule = ChannelKind.PHASE
        elif relax_a and relax_b:
            # relaxation only: states with |uu> population are known to
            # survive this channel sometimes, so no population rule exists
            kind_rule = ChannelKind.AMPLITUDE
        else:
            raise UndecidedAmplitudeError(
                "relaxation on one party only; no analytic verdict outside slice I"
            )
    else:
        kind_rule = kind

    if label.canonical == "I":
        return EsdVerdict(kind, ESD_FREE, "uu-population-free")
    if kind_rule is ChannelKind.PHASE:
        if label.vanishing:
            return EsdVerdict(kind, ESD_FREE, "vanishing-population")
        return EsdVerdict(kind, ABRUPT_ESD, "all-populations-positive")
    if kind_rule is ChannelKind.COMPOSITE:
        return EsdVerdict(kind, ABRUPT_ESD, "uu-population-present")
    raise UndecidedAmplitudeError(
        "amplitude damping outside slice I has no analytic verdict here"
    )


def diag_evolution_amp(rho0, rates: NoiseRates, tau: float) -> np.ndarray:
    """Populations after time tau; they depend on amplitude damping only.

    With a = g1_a(tau)^2, b = g1_b(tau)^2 (and 1-a, 1-b the transferred
    fractions):

        p1' = a b p1
        p2' = a [p2 + (1-b) p1]
        p3' = b [p3 + (1-a) p1]
        p4' = p4 + (1-b) p3 + (1-a) p2 + (1-a)(1-b) p1

    If p1 > 0 and both relaxation rates are positive, all four outputs are
    strictly positive for every tau > 0, which is the step that pins every
    trajectory leaving slice II, III, or IV outside all four slices.
    """
    p = as_array(rho0).diagonal().real
    prm = params_at(rates, tau)
    a = prm.g1_a * prm.g1_a
    b = prm.g1_b * prm.g1_b
    wa = prm.w1_a * prm.w1_a
    wb = prm.w1_b * prm.w1_b
    return np.array(
        [
            a * b * p[0],
            a * (p[1] + wb * p[0]),
            b * (p[2] + wa * p[0]),
            p[3] + wb * p[2] + wa * p[1] + wa * wb * p[0],
        ]
    )
