import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esdsim import channels, entanglement
from esdsim.channels import ChannelKind, NoiseRates, channel_at, params_at
from esdsim.entanglement import (
    SPIN_FLIP,
    NotInSubspaceIError,
    concurrence,
    lambda_dephased_limit,
    lambda_rhoI_closed_form,
    r_matrix,
)
from esdsim.qstate import preset

from conftest import make_sampler, random_rates


def brute_force_lambda(arr):
    """Independent route: eigenvalues of the non-Hermitian spin-flip product
    straight from numpy's general solver."""
    lam = np.linalg.eigvals(np.asarray(arr) @ SPIN_FLIP @ np.asarray(arr).conj() @ SPIN_FLIP)
    lam = np.sort(np.abs(lam.real))[::-1]
    roots = np.sqrt(lam)
    return roots[0] - roots[1] - roots[2] - roots[3]


def test_spin_flip_structure():
    assert np.array_equal(
        SPIN_FLIP.real,
        np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]),
    )
    assert np.abs(SPIN_FLIP.imag).max() == 0.0
    assert np.array_equal(SPIN_FLIP @ SPIN_FLIP, np.eye(4).astype(complex))
    assert not SPIN_FLIP.flags.writeable


def test_r_matrix_product_state_vanishes():
    assert np.abs(r_matrix(preset("up-up"))).max() == 0.0


def test_r_matrix_maximally_mixed():
    assert np.abs(r_matrix(preset("mixed")) - np.eye(4) / 16).max() <= 1e-16


def test_r_matrix_diagonal_reverses():
    a, b, c, d = 0.1, 0.2, 0.3, 0.4
    r = r_matrix(np.diag([a, b, c, d]).astype(complex))
    assert np.abs(r - np.diag([a * d, b * c, c * b, d * a])).max() <= 1e-16


def test_concurrence_maximally_mixed():
    res = concurrence(preset("mixed"))
    assert res.lambda_cap == pytest.approx(-0.5, abs=1e-12)
    assert res.concurrence == 0.0


def test_concurrence_product_state():
    res = concurrence(preset("up-up"))
    assert res.lambda_cap == pytest.approx(0.0, abs=1e-12)
    assert res.concurrence == 0.0


@pytest.mark.parametrize("name", ["bell-phi+", "bell-phi-", "bell-psi+", "bell-psi-"])
def test_concurrence_bell_states(name):
    res = concurrence(preset(name))
    assert res.lambda_cap == pytest.approx(1.0, abs=1e-12)
    assert res.concurrence == pytest.approx(1.0, abs=1e-12)
    assert res.sqrt_eigs[0] == pytest.approx(1.0, abs=1e-12)
    assert max(res.sqrt_eigs[1:]) <= 1e-12


def test_concurrence_werner_formula():
    for p in (0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0):
        res = concurrence(preset("werner:p=%r" % p))
        assert res.concurrence == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)
    assert concurrence(preset("werner:p=0.8")).concurrence == pytest.approx(0.7, abs=1e-12)


def test_concurrence_result_invariants():
    s = make_sampler(21)
    for _ in range(120):
        res = concurrence(s.state())
        se = np.array(res.sqrt_eigs)
        assert np.all(np.diff(se) <= 1e-15)
        assert np.all(se >= 0.0)
        assert res.lambda_cap <= se[0] + 1e-15
        assert 0.0 <= res.concurrence <= 1.0 + 1e-10


def test_concurrence_against_general_eigensolver():
    s = make_sampler(22)
    for _ in range(150):
        rho = s.state()
        ours = concurrence(rho).lambda_cap
        # the general solver carries sqrt(eps)-level noise on the two
        # analytically tiny roots, so the comparison is loose
        assert abs(ours - brute_force_lambda(rho.data)) <= 1e-6


def test_concurrence_moments_match_r_matrix():
    # sum of sigma^(2k) must equal tr(R^k); tight, solver-independent check
    s = make_sampler(23)
    for _ in range(60):
        rho = s.state()
        sig = np.array(concurrence(rho).sqrt_eigs)
        r = r_matrix(rho)
        rk = np.eye(4, dtype=complex)
        for k in (1, 2, 3):
            rk = rk @ r
            assert np.trace(rk).real == pytest.approx(
                float((sig ** (2 * k)).sum()), abs=1e-12
            )


def test_lambda_dephased_limit_examples():
    assert lambda_dephased_limit(preset("mixed")) == pytest.approx(-0.5, abs=1e-15)
    assert lambda_dephased_limit(np.diag([0.5, 0, 0, 0.5]).astype(complex)) == 0.0
    # p1 p4 = 0 puts the state on the first branch, which then vanishes;
    # direct Wootters on the diagonal state confirms (0.3 - 0.3 - 0 - 0)
    m = np.diag([0.0, 0.3, 0.3, 0.4]).astype(complex)
    assert lambda_dephased_limit(m) == 0.0
    assert concurrence(m).lambda_cap == pytest.approx(0.0, abs=1e-12)


def test_lambda_dephased_limit_matches_diagonal_concurrence():
    s = make_sampler(24)
    for _ in range(300):
        rho = s.state()
        lim = lambda_dephased_limit(rho)
        diag_lam = concurrence(np.diag(rho.diag).astype(complex)).lambda_cap
        assert abs(lim - diag_lam) <= 1e-12


def test_lambda_dephased_limit_negative_for_positive_diagonals():
    s = make_sampler(25)
    for _ in range(300):
        rho = s.state()
        if np.all(rho.diag > 1e-6):
            assert lambda_dephased_limit(rho) < 0.0


def test_closed_form_bell_psi_plus_phase():
    rho = preset("bell-psi+")
    rates = NoiseRates(0, 0, 1, 1)
    for t in (0.1, 0.5, 1.0, 2.0):
        lam = lambda_rhoI_closed_form(rho, rates, t, "ph")
        assert lam == pytest.approx(math.exp(-2 * t), abs=1e-15)


def test_closed_form_bell_psi_plus_composite_and_amplitude():
    rho = preset("bell-psi+")
    rates = NoiseRates(0.7, 1.3, 0.4, 0.9)
    t = 0.8
    p = params_at(rates, t)
    lam = lambda_rhoI_closed_form(rho, rates, t, "composite")
    assert lam == pytest.approx(p.g1_a * p.g1_b * p.g2_a * p.g2_b, rel=1e-12)
    lam_amp = lambda_rhoI_closed_form(rho, rates, t, "am")
    assert lam_amp == pytest.approx(p.g1_a * p.g1_b, rel=1e-12)
    assert lam > 0.0


def test_closed_form_at_zero_time_equals_concurrence():
    s = make_sampler(26, subspace="I")
    for _ in range(50):
        rho = s.state()
        base = concurrence(rho).lambda_cap
        for kind in ("am", "ph", "composite"):
            lam = lambda_rhoI_closed_form(rho, NoiseRates(1, 1, 1, 1), 0.0, kind)
            assert abs(lam - base) <= 1e-12


def test_closed_form_matches_numeric_pipeline():
    s = make_sampler(27, subspace="I")
    worst = 0.0
    for _ in range(80):
        rho = s.state()
        rates = random_rates(s, 0.25, 2.0)
        t = s.uniform(0.0, 5.0)
        for kind in ChannelKind:
            cf = lambda_rhoI_closed_form(rho, rates, t, kind)
            num = concurrence(
                channels.apply_raw(channel_at(kind, rates, t).operators, rho.data)
            ).lambda_cap
            worst = max(worst, abs(cf - num))
    assert worst <= 1e-9


def test_closed_form_nonnegative_and_zero_without_coherence():
    s = make_sampler(28, subspace="I")
    rates = NoiseRates(1, 0.5, 0.8, 0.2)
    for _ in range(40):
        rho = s.state()
        lam = lambda_rhoI_closed_form(rho, rates, 1.1, "composite")
        assert lam >= 0.0
    flat = np.diag([0.0, 0.4, 0.35, 0.25]).astype(complex)
    assert lambda_rhoI_closed_form(flat, rates, 0.7, "ph") == 0.0


def test_closed_form_requires_subspace_one():
    with pytest.raises(NotInSubspaceIError):
        lambda_rhoI_closed_form(preset("bell-phi+"), NoiseRates(1, 1, 1, 1), 1.0, "ph")


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0))
def test_werner_concurrence_property(p):
    res = concurrence(preset("werner:p=%r" % p))
    assert res.concurrence == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-11)


def test_monotone_under_local_noise_on_trajectory():
    from esdsim.dynamics import evolve

    rho = preset("werner:p=0.9")
    times = np.linspace(0.0, 3.0, 120)
    traj = evolve(rho, "composite", NoiseRates(0.8, 1.1, 0.5, 0.3), times)
    c = traj.concurrence_values()
    assert np.all(np.diff(c) <= 1e-9)


def test_r_matrix_spectrum_real_nonnegative():
    s = make_sampler(29)
    for _ in range(60):
        lam = np.linalg.eigvals(r_matrix(s.state()))
        assert np.abs(lam.imag).max() <= 1e-12
        assert lam.real.min() >= -1e-12


def test_lambda_continuity_along_trajectory():
    from esdsim.dynamics import evolve

    rho = preset("bell-phi+")
    times = np.linspace(0.0, 3.0, 2000)
    traj = evolve(rho, "composite", NoiseRates(1, 1, 1, 1), times)
    lam = traj.lambda_values()
    dt = times[1] - times[0]
    assert np.abs(np.diff(lam)).max() <= 10.0 * dt
