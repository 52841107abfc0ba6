import math

import numpy as np
import pytest

from esdsim import channels, classify
from esdsim.channels import ChannelKind, NoiseRates, channel_at
from esdsim.classify import (
    ABRUPT_ESD,
    ESD_FREE,
    NOT_ENTANGLED,
    UndecidedAmplitudeError,
    diag_evolution_amp,
    predict_esd,
    subspace,
)
from esdsim.qstate import preset

from conftest import make_sampler


def test_subspace_bell_psi_plus():
    label = subspace(preset("bell-psi+"))
    assert label.vanishing == frozenset({1, 4})
    assert label.canonical == "I"


def test_subspace_bell_phi_plus():
    label = subspace(preset("bell-phi+"))
    assert label.vanishing == frozenset({2, 3})
    assert label.canonical == "II"


def test_subspace_generic_state():
    label = subspace(preset("mixed"))
    assert label.vanishing == frozenset()
    assert label.canonical is None


def test_subspace_absorption_rule():
    # |uu> vanishing wins no matter what else vanishes
    m = np.diag([0.0, 0.0, 0.6, 0.4]).astype(complex)
    assert subspace(m).canonical == "I"
    m = np.diag([0.2, 0.0, 0.0, 0.8]).astype(complex)
    assert subspace(m).canonical == "II"
    for name in ("I", "II", "III", "IV"):
        s = make_sampler(31, subspace=name)
        for _ in range(20):
            label = subspace(s.state())
            if 1 in label.vanishing:
                assert label.canonical == "I"
            else:
                assert label.canonical == name


def test_predict_not_entangled():
    for kind in ChannelKind:
        v = predict_esd(preset("mixed"), kind)
        assert v.verdict == NOT_ENTANGLED
        assert v.reason == "separable-at-t0"


def test_predict_phase_examples():
    assert predict_esd(preset("bell-phi+"), "ph").verdict == ESD_FREE
    assert predict_esd(preset("werner:p=0.9"), "ph").verdict == ABRUPT_ESD


def test_predict_composite_examples():
    assert predict_esd(preset("bell-phi+"), "composite").verdict == ABRUPT_ESD
    assert predict_esd(preset("bell-psi+"), "composite").verdict == ESD_FREE
    assert predict_esd(preset("bell-psi+"), "am").verdict == ESD_FREE
    assert predict_esd(preset("bell-psi+"), "ph").verdict == ESD_FREE


def test_predict_amplitude_undecided_outside_slice_one():
    with pytest.raises(UndecidedAmplitudeError):
        predict_esd(preset("bell-phi+"), "am")


def test_predict_composite_rate_fallbacks():
    phi = preset("bell-phi+")
    # no relaxation at all: the dephasing rule decides
    v = predict_esd(phi, "composite", NoiseRates(0, 0, 1, 1))
    assert v.verdict == ESD_FREE  # slice II dephases safely
    v = predict_esd(preset("werner:p=0.9"), "composite", NoiseRates(0, 0, 1, 1))
    assert v.verdict == ABRUPT_ESD
    # no dephasing at all: the amplitude rule, undecided outside slice I
    with pytest.raises(UndecidedAmplitudeError):
        predict_esd(phi, "composite", NoiseRates(1, 1, 0, 0))
    assert predict_esd(preset("bell-psi+"), "composite",
                       NoiseRates(1, 1, 0, 0)).verdict == ESD_FREE
    # relaxation on one party only: undecided outside slice I
    with pytest.raises(UndecidedAmplitudeError):
        predict_esd(phi, "composite", NoiseRates(1, 0, 1, 1))
    assert predict_esd(preset("bell-psi+"), "composite",
                       NoiseRates(1, 0, 1, 1)).verdict == ESD_FREE
    # both relaxations plus any dephasing at all: the generic composite rule
    assert predict_esd(phi, "composite", NoiseRates(1, 1, 0, 0.3)).verdict == ABRUPT_ESD
    # no noise whatsoever: nothing ever decays
    assert predict_esd(phi, "composite", NoiseRates(0, 0, 0, 0)).verdict == ESD_FREE


def test_predict_entanglement_gate_beats_subspace():
    m = np.diag([0.0, 0.4, 0.35, 0.25]).astype(complex)  # slice I, separable
    assert predict_esd(m, "composite").verdict == NOT_ENTANGLED


def test_diag_evolution_balanced_transfer():
    g = 2 ** -0.5
    tau = -2.0 * math.log(g)  # g1(tau) = g for unit rates
    out = diag_evolution_amp(preset("up-up"), NoiseRates(1, 1, 0, 0), tau)
    assert np.abs(out - 0.25).max() <= 1e-15


def test_diag_evolution_zero_time():
    s = make_sampler(32)
    rho = s.state()
    out = diag_evolution_amp(rho, NoiseRates(1.4, 0.3, 0, 0), 0.0)
    assert np.abs(out - rho.diag).max() == 0.0


def test_diag_evolution_strict_positivity():
    s = make_sampler(33)
    for _ in range(50):
        rho = s.state()  # generic: every population positive
        rates = NoiseRates(s.uniform(0.25, 2), s.uniform(0.25, 2), 0, 0)
        for _ in range(4):
            tau = s.uniform(1e-6, 2.0 / max(rates.g1_a, rates.g1_b))
            out = diag_evolution_amp(rho, rates, tau)
            assert np.all(out > 1e-10)


def test_diag_evolution_trace_preserved():
    s = make_sampler(34)
    for _ in range(100):
        rho = s.state()
        rates = NoiseRates(s.uniform(0, 2), s.uniform(0, 2), 0, 0)
        out = diag_evolution_amp(rho, rates, s.uniform(0, 5))
        assert abs(out.sum() - 1.0) <= 1e-12


def test_diag_evolution_matches_channel_any_dephasing():
    s = make_sampler(35)
    for _ in range(60):
        rho = s.state()
        rates = NoiseRates(
            s.uniform(0, 2), s.uniform(0, 2), s.uniform(0, 2), s.uniform(0, 2)
        )
        tau = s.uniform(0, 4)
        cf = diag_evolution_amp(rho, rates, tau)
        via_channel = channels.apply_raw(
            channel_at("composite", rates, tau).operators, rho.data
        ).diagonal().real
        assert np.abs(cf - via_channel).max() <= 1e-12


def test_verdict_carries_kind_and_reason():
    v = predict_esd(preset("bell-psi+"), "composite")
    assert v.kind is ChannelKind.COMPOSITE
    assert v.reason == "uu-population-free"
