import math

import numpy as np
import pytest

from esdsim import channels, dynamics
from esdsim.channels import ChannelKind, NoiseRates, channel_at
from esdsim.dynamics import (
    FINITE,
    INITIALLY_SEPARABLE,
    NO_CROSSING,
    AllRatesZeroError,
    StepUnderflowError,
    esd_time,
    evolve,
    horizon_for,
    integrate_lindblad,
    lindblad_rhs,
)
from esdsim.entanglement import lambda_rhoI_closed_form
from esdsim.qstate import preset

from conftest import make_sampler, random_rates


def test_evolve_single_point_grid():
    traj = evolve(preset("bell-phi+"), "am", NoiseRates(1, 1, 0, 0), [0.0])
    assert len(traj.states) == 1
    assert np.array_equal(traj.states[0].data, preset("bell-phi+").data)
    assert traj.lambdas[0].concurrence == pytest.approx(1.0, abs=1e-12)


def test_evolve_grid_validation():
    rho = preset("mixed")
    with pytest.raises(ValueError):
        evolve(rho, "am", NoiseRates(1, 1, 0, 0), [0.5, 1.0])
    with pytest.raises(ValueError):
        evolve(rho, "am", NoiseRates(1, 1, 0, 0), [0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        evolve(rho, "am", NoiseRates(1, 1, 0, 0), [])


def test_evolve_phase_lambda_anchor():
    traj = evolve(preset("bell-psi+"), "ph", NoiseRates(0, 0, 1, 1),
                  [0.0, math.log(2)])
    assert traj.lambda_values()[1] == pytest.approx(0.25, abs=1e-12)


def test_evolve_absolute_time_equals_chained():
    s = make_sampler(41)
    rho = s.state()
    rates = NoiseRates(0.9, 0.3, 0.6, 1.2)
    tau, total = 0.7, 1.8
    direct = evolve(rho, "composite", rates, [0.0, total]).states[1]
    mid = channels.apply(channel_at("composite", rates, tau), rho)
    chained = channels.apply(channel_at("composite", rates, total - tau), mid)
    assert np.abs(direct.data - chained.data).max() <= 1e-12


def test_evolve_composite_bell_phi_crosses_once():
    times = np.linspace(0.0, 3.0, 400)
    traj = evolve(preset("bell-phi+"), "composite", NoiseRates(1, 1, 1, 1), times)
    lam = traj.lambda_values()
    signs = np.sign(lam[np.abs(lam) > 1e-12])
    flips = np.sum(np.diff(signs) != 0)
    assert flips == 1
    # L falls strictly until the crossing (it later relaxes back toward 0
    # from below as the state approaches the pure ground state)
    positive_part = lam[lam > 1e-12]
    assert np.all(np.diff(positive_part) < 0)
    assert np.all(np.diff(traj.concurrence_values()) <= 1e-9)


def test_horizon_uses_relevant_rates():
    assert horizon_for("ph", NoiseRates(5, 5, 0.5, 1)) == pytest.approx(100.0)
    assert horizon_for("am", NoiseRates(0.25, 1, 0, 0)) == pytest.approx(200.0)
    with pytest.raises(AllRatesZeroError):
        horizon_for("ph", NoiseRates(1, 1, 0, 0))
    with pytest.raises(AllRatesZeroError):
        esd_time(preset("bell-phi+"), "composite", NoiseRates(0, 0, 0, 0))


def test_esd_time_initially_separable():
    res = esd_time(preset("mixed"), "ph", NoiseRates(0, 0, 1, 1))
    assert res.outcome == INITIALLY_SEPARABLE
    res = esd_time(preset("werner:p=0.2"), "composite", NoiseRates(1, 1, 1, 1))
    assert res.outcome == INITIALLY_SEPARABLE


def test_esd_time_bell_psi_plus_survives_composite():
    res = esd_time(preset("bell-psi+"), "composite", NoiseRates(1, 1, 1, 1))
    assert res.outcome == NO_CROSSING
    assert res.horizon == pytest.approx(50.0)
    # the closed form at the horizon is e^-150; the generic pipeline cannot
    # resolve so small a gap between equal leading singular values, so the
    # numeric report may round to exactly zero but must never go negative
    assert res.lambda_at_horizon >= 0.0
    assert abs(res.lambda_at_horizon - math.exp(-150)) <= 1e-15
    cf = lambda_rhoI_closed_form(
        preset("bell-psi+"), NoiseRates(1, 1, 1, 1), res.horizon, "composite"
    )
    assert cf == pytest.approx(math.exp(-150), rel=1e-9)


def test_esd_time_bell_phi_plus_dies_under_composite():
    rates = NoiseRates(1, 1, 1, 1)
    res = esd_time(preset("bell-phi+"), "composite", rates)
    assert res.outcome == FINITE
    assert res.t_star > 0.0

    arr = preset("bell-phi+").data

    def lam(t):
        from esdsim.entanglement import concurrence
        return concurrence(
            channels.apply_raw(channel_at("composite", rates, t).operators, arr)
        ).lambda_cap

    assert abs(lam(res.t_star)) <= 1e-12
    delta = 1e-6 * res.horizon
    assert lam(res.t_star - delta) > 0.0
    assert lam(res.t_star + delta) < 0.0


def test_esd_time_slice_one_never_crosses():
    s = make_sampler(42, subspace="I")
    for _ in range(8):
        rho = s.entangled_states(1)[0]
        if abs(rho.data[1, 2]) < 1e-3:
            continue
        rates = random_rates(s, 0.25, 2.0)
        for kind in ChannelKind:
            assert esd_time(rho, kind, rates).outcome == NO_CROSSING


def test_lindblad_rhs_ground_state_stationary():
    out = lindblad_rhs(preset("down-down"), NoiseRates(2, 1, 0.5, 0.3))
    assert np.abs(out).max() == 0.0


def test_lindblad_rhs_decay_rates():
    out = lindblad_rhs(preset("up-up"), NoiseRates(1, 0, 0, 0))
    assert out[0, 0].real == pytest.approx(-1.0, abs=1e-15)
    assert out[2, 2].real == pytest.approx(1.0, abs=1e-15)
    assert out[1, 1].real == out[3, 3].real == 0.0


def test_lindblad_rhs_traceless_and_hermitian():
    s = make_sampler(43)
    for _ in range(100):
        rho = s.state()
        rates = random_rates(s)
        out = lindblad_rhs(rho, rates)
        assert abs(out.trace()) <= 1e-14
        assert np.abs(out - out.conj().T).max() <= 1e-14


def test_integrate_zero_time_is_identity():
    rho = preset("werner:p=0.8")
    out = integrate_lindblad(rho, NoiseRates(1, 1, 1, 1), 0.0)
    assert np.array_equal(out.data, rho.data)


def test_integrate_matches_kraus_composite():
    rho = preset("bell-phi+")
    rates = NoiseRates(1, 1, 1, 1)
    ode = integrate_lindblad(rho, rates, 1.0)
    kraus = channels.apply(channel_at("composite", rates, 1.0), rho)
    assert np.abs(ode.data - kraus.data).max() <= 1e-6


def test_integrate_matches_kraus_phase_only():
    s = make_sampler(44)
    rho = s.state()
    rates = NoiseRates(0, 0, 0.9, 1.7)
    ode = integrate_lindblad(rho, rates, 2.0)
    kraus = channels.apply(channel_at("ph", rates, 2.0), rho)
    assert np.abs(ode.data - kraus.data).max() <= 1e-6


def test_integrate_step_underflow():
    with pytest.raises(StepUnderflowError):
        integrate_lindblad(preset("mixed"), NoiseRates(200, 0, 0, 0), 1e6)


def test_integrate_rejects_negative_time():
    with pytest.raises(ValueError):
        integrate_lindblad(preset("mixed"), NoiseRates(1, 0, 0, 0), -0.5)


def test_kraus_lindblad_agreement_battery():
    s = make_sampler(45)
    worst = 0.0
    for _ in range(12):
        rho = s.state()
        rates = random_rates(s)
        t = s.uniform(0.0, 5.0)
        for kind in ChannelKind:
            if kind is ChannelKind.AMPLITUDE:
                r = NoiseRates(rates.g1_a, rates.g1_b, 0, 0)
            elif kind is ChannelKind.PHASE:
                r = NoiseRates(0, 0, rates.g2_a, rates.g2_b)
            else:
                r = rates
            ode = integrate_lindblad(rho, r, t)
            kraus = channels.apply(channel_at(kind, r, t), rho)
            worst = max(worst, float(np.abs(ode.data - kraus.data).max()))
    assert worst <= 1e-6


def test_crossing_flanks_on_sampled_states():
    from esdsim.entanglement import concurrence

    s = make_sampler(46)
    checked = 0
    while checked < 5:
        rho = s.entangled_states(1)[0]
        rates = random_rates(s, 0.25, 2.0)
        res = esd_time(rho, "composite", rates)
        if res.outcome != FINITE:
            continue
        checked += 1

        def lam(t):
            return concurrence(
                channels.apply_raw(
                    channel_at("composite", rates, t).operators, rho.data
                )
            ).lambda_cap

        assert abs(lam(res.t_star)) <= 1e-12
        delta = 1e-6 * res.horizon
        assert lam(res.t_star - delta) > 0.0
        assert lam(res.t_star + delta) < 0.0


def test_thread_safety_of_pure_pipeline():
    from concurrent.futures import ThreadPoolExecutor

    rho = preset("bell-phi+")
    rates = NoiseRates(1, 1, 1, 1)
    serial = esd_time(rho, "composite", rates).t_star
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(
            pool.map(lambda _: esd_time(rho, "composite", rates).t_star, range(8))
        )
    assert all(r == serial for r in results)


def test_esd_time_result_fields():
    res = esd_time(preset("bell-phi+"), "composite", NoiseRates(1, 1, 1, 1))
    assert res.lambda_t0 == pytest.approx(1.0, abs=1e-12)
    assert res.lambda_at_horizon is None
    res = esd_time(preset("bell-psi+"), "ph", NoiseRates(0, 0, 0.5, 0.5))
    assert res.outcome == NO_CROSSING
    assert res.t_star is None
