"""Invariant battery behind ``esdsim verify``.

Each suite draws its own deterministic sample stream (derived from the master
seed), measures a worst-case deviation or counts disagreements, and returns a
SuiteResult. The battery as a whole passes only if every suite does.

The operator-structure suite exists for mutation detection: a Kraus operator
with a single nonzero entry is defined only up to a global phase as far as
channel behavior and completeness go, so corrupting its sign is invisible to
every behavioral test. Comparing the built operators entrywise against
independently tabulated entry formulas catches any such corruption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channels, classify, dynamics, entanglement, qstate, sampling
from .channels import ChannelKind, NoiseRates

KINDS = (ChannelKind.AMPLITUDE, ChannelKind.PHASE, ChannelKind.COMPOSITE)

TOL_ALGEBRA = 1e-12        # completeness, factorization, semigroup, structure
TOL_LINDBLAD = 1e-6        # Kraus vs RK4 master-equation route
TOL_CLOSED_FORM = 1e-9     # closed-form decay law vs numerical pipeline
TOL_DEPHASED = 1e-12       # dephased-limit law vs diagonal concurrence
TOL_DIAG = 1e-12           # population evolution closed form vs channel


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    stats: dict = field(default_factory=dict)


@dataclass
class VerifyReport:
    seed: int
    samples: int
    results: list

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)


def _sampler(seed, offset, subspace=None, ensemble=sampling.GINIBRE_MIXED):
    cfg = sampling.SamplerConfig(
        seed=(seed + 7919 * offset) & ((1 << 64) - 1),
        ensemble=ensemble,
        subspace=subspace,
    )
    return sampling.StateSampler(cfg)


def _rates(s, lo=0.0, hi=2.0) -> NoiseRates:
    return NoiseRates(
        s.uniform(lo, hi), s.uniform(lo, hi), s.uniform(lo, hi), s.uniform(lo, hi)
    )


def _expected_amplitude(p: channels.ChannelParams) -> np.ndarray:
    ga, wa, gb, wb = p.g1_a, p.w1_a, p.g1_b, p.w1_b
    ops = np.zeros((4, 4, 4), dtype=np.complex128)
    ops[0][0, 0] = ga * gb
    ops[0][1, 1] = ga
    ops[0][2, 2] = gb
    ops[0][3, 3] = 1.0
    ops[1][1, 0] = ga * wb
    ops[1][3, 2] = wb
    ops[2][2, 0] = wa * gb
    ops[2][3, 1] = wa
    ops[3][3, 0] = wa * wb
    return ops


def _expected_phase(p: channels.ChannelParams) -> np.ndarray:
    ga, wa, gb, wb = p.g2_a, p.w2_a, p.g2_b, p.w2_b
    ops = np.zeros((4, 4, 4), dtype=np.complex128)
    ops[0][0, 0] = ga * gb
    ops[0][1, 1] = ga
    ops[0][2, 2] = gb
    ops[0][3, 3] = 1.0
    ops[1][0, 0] = ga * wb
    ops[1][2, 2] = wb
    ops[2][0, 0] = wa * gb
    ops[2][1, 1] = wa
    ops[3][0, 0] = wa * wb
    return ops


def _expected_composite(p: channels.ChannelParams) -> np.ndarray:
    xa = p.g1_a * p.g2_a   # damped-and-dephased survival, party A
    ya = p.g1_a * p.w2_a
    wa = p.w1_a
    xb = p.g1_b * p.g2_b
    yb = p.g1_b * p.w2_b
    wb = p.w1_b
    ops = np.zeros((9, 4, 4), dtype=np.complex128)
    ops[0][0, 0] = xa * xb
    ops[0][1, 1] = xa
    ops[0][2, 2] = xb
    ops[0][3, 3] = 1.0
    ops[1][0, 0] = xa * yb
    ops[1][2, 2] = yb
    ops[2][1, 0] = xa * wb
    ops[2][3, 2] = wb
    ops[3][0, 0] = ya * xb
    ops[3][1, 1] = ya
    ops[4][0, 0] = ya * yb
    ops[5][1, 0] = ya * wb
    ops[6][2, 0] = wa * xb
    ops[6][3, 1] = wa
    ops[7][2, 0] = wa * yb
    ops[8][3, 0] = wa * wb
    return ops


_EXPECTED = {
    ChannelKind.AMPLITUDE: _expected_amplitude,
    ChannelKind.PHASE: _expected_phase,
    ChannelKind.COMPOSITE: _expected_composite,
}


def suite_kraus_structure(seed, n) -> SuiteResult:
    s = _sampler(seed, 1)
    worst = 0.0
    for _ in range(n):
        rates = _rates(s)
        t = s.uniform(0.0, 3.0)
        p = channels.params_at(rates, t)
        for kind in KINDS:
            built = channels.kraus_set(kind, p).operators
            dev = float(np.abs(built - _EXPECTED[kind](p)).max())
            worst = max(worst, dev)
    return SuiteResult(
        "kraus-structure", worst <= TOL_ALGEBRA,
        "max entry deviation %.3e (tol %g)" % (worst, TOL_ALGEBRA),
        {"max_dev": worst, "tol": TOL_ALGEBRA, "count": n},
    )


def suite_completeness(seed, n) -> SuiteResult:
    s = _sampler(seed, 2)
    worst = 0.0
    for _ in range(n):
        p = channels.params_at(_rates(s), s.uniform(0.0, 3.0))
        for kind in KINDS:
            worst = max(worst, channels.kraus_set(kind, p).completeness_defect())
    return SuiteResult(
        "completeness", worst <= TOL_ALGEBRA,
        "max deviation %.3e (tol %g)" % (worst, TOL_ALGEBRA),
        {"max_dev": worst, "tol": TOL_ALGEBRA, "count": n},
    )


def suite_factorization(seed, n) -> SuiteResult:
    s = _sampler(seed, 3)
    worst = 0.0
    for _ in range(n):
        rho = s.state()
        worst = max(
            worst,
            channels.check_factorization(_rates(s), s.uniform(0.0, 3.0), rho),
        )
    return SuiteResult(
        "factorization", worst <= TOL_ALGEBRA,
        "max deviation %.3e (tol %g)" % (worst, TOL_ALGEBRA),
        {"max_dev": worst, "tol": TOL_ALGEBRA, "count": n},
    )


def suite_semigroup(seed, n) -> SuiteResult:
    s = _sampler(seed, 4)
    worst = 0.0
    for _ in range(n):
        rho = s.state()
        rates = _rates(s)
        tau, tau_p = s.uniform(0.0, 2.0), s.uniform(0.0, 2.0)
        for kind in KINDS:
            worst = max(worst, channels.check_semigroup(kind, rates, tau, tau_p, rho))
    return SuiteResult(
        "semigroup", worst <= TOL_ALGEBRA,
        "max deviation %.3e (tol %g)" % (worst, TOL_ALGEBRA),
        {"max_dev": worst, "tol": TOL_ALGEBRA, "count": n},
    )


def _restricted(kind: ChannelKind, rates: NoiseRates) -> NoiseRates:
    if kind is ChannelKind.AMPLITUDE:
        return NoiseRates(rates.g1_a, rates.g1_b, 0.0, 0.0)
    if kind is ChannelKind.PHASE:
        return NoiseRates(0.0, 0.0, rates.g2_a, rates.g2_b)
    return rates


def suite_lindblad_agreement(seed, n) -> SuiteResult:
    s = _sampler(seed, 5)
    worst = 0.0
    for _ in range(n):
        rho = s.state()
        rates = _rates(s)
        t = s.uniform(0.0, 5.0)
        for kind in KINDS:
            r = _restricted(kind, rates)
            via_ode = dynamics.integrate_lindblad(rho, r, t)
            via_kraus = channels.apply(channels.channel_at(kind, r, t), rho)
            worst = max(worst, float(np.abs(via_ode.data - via_kraus.data).max()))
    return SuiteResult(
        "lindblad-agreement", worst <= TOL_LINDBLAD,
        "max deviation %.3e (tol %g)" % (worst, TOL_LINDBLAD),
        {"max_dev": worst, "tol": TOL_LINDBLAD, "count": n},
    )


def suite_closed_form(seed, n) -> SuiteResult:
    s = _sampler(seed, 6, subspace="I")
    worst = 0.0
    for _ in range(n):
        rho = s.state()
        rates = _rates(s, 0.25, 2.0)
        t = s.uniform(0.0, 5.0)
        for kind in KINDS:
            cf = entanglement.lambda_rhoI_closed_form(rho, rates, t, kind)
            num = entanglement.concurrence(
                channels.apply_raw(
                    channels.channel_at(kind, rates, t).operators, rho.data
                )
            ).lambda_cap
            worst = max(worst, abs(cf - num))
    return SuiteResult(
        "closed-form-lambda", worst <= TOL_CLOSED_FORM,
        "max |closed form - numeric| %.3e (tol %g)" % (worst, TOL_CLOSED_FORM),
        {"max_dev": worst, "tol": TOL_CLOSED_FORM, "count": n},
    )


def suite_dephased_limit(seed, n) -> SuiteResult:
    s = _sampler(seed, 7)
    worst = 0.0
    sign_failures = 0
    for _ in range(n):
        rho = s.state()
        limit = entanglement.lambda_dephased_limit(rho)
        diag_lam = entanglement.concurrence(np.diag(rho.diag).astype(complex)).lambda_cap
        worst = max(worst, abs(limit - diag_lam))
        if np.all(rho.diag > 1e-6) and not limit < 0.0:
            sign_failures += 1
    ok = worst <= TOL_DEPHASED and sign_failures == 0
    return SuiteResult(
        "dephased-limit", ok,
        "max deviation %.3e (tol %g), %d sign failures"
        % (worst, TOL_DEPHASED, sign_failures),
        {"max_dev": worst, "tol": TOL_DEPHASED, "sign_failures": sign_failures,
         "count": n},
    )


def _crossing_agrees(verdict: str, outcome: str) -> bool:
    if verdict == classify.ESD_FREE:
        return outcome == dynamics.NO_CROSSING
    if verdict == classify.ABRUPT_ESD:
        return outcome == dynamics.FINITE
    return False


def suite_phase_theorem(seed, n) -> SuiteResult:
    disagreements = 0
    checked = 0
    s = _sampler(seed, 8)
    for _ in range(n):
        rho = s.entangled_states(1)[0]
        rates = NoiseRates(0.0, 0.0, s.uniform(0.25, 2.0), s.uniform(0.25, 2.0))
        verdict = classify.predict_esd(rho, ChannelKind.PHASE).verdict
        outcome = dynamics.esd_time(rho, ChannelKind.PHASE, rates).outcome
        checked += 1
        if not _crossing_agrees(verdict, outcome):
            disagreements += 1
    per_slice = max(1, n // 4)
    for offset, slice_name in ((9, "I"), (10, "II"), (11, "III"), (12, "IV")):
        sc = _sampler(seed, offset, subspace=slice_name)
        for _ in range(per_slice):
            rho = sc.entangled_states(1)[0]
            rates = NoiseRates(0.0, 0.0, sc.uniform(0.25, 2.0), sc.uniform(0.25, 2.0))
            verdict = classify.predict_esd(rho, ChannelKind.PHASE).verdict
            outcome = dynamics.esd_time(rho, ChannelKind.PHASE, rates).outcome
            checked += 1
            if not _crossing_agrees(verdict, outcome):
                disagreements += 1
    return SuiteResult(
        "phase-theorem", disagreements == 0,
        "%d/%d predicate vs numeric disagreements" % (disagreements, checked),
        {"disagreements": disagreements, "count": checked},
    )


def suite_composite_theorem(seed, n) -> SuiteResult:
    disagreements = 0
    checked = 0
    s = _sampler(seed, 13)
    for _ in range(n):
        rho = s.entangled_states(1)[0]
        rates = _rates(s, 0.25, 2.0)
        verdict = classify.predict_esd(rho, ChannelKind.COMPOSITE, rates).verdict
        outcome = dynamics.esd_time(rho, ChannelKind.COMPOSITE, rates).outcome
        checked += 1
        if not _crossing_agrees(verdict, outcome):
            disagreements += 1
    sc = _sampler(seed, 14, subspace="I")
    for _ in range(n):
        rho = sc.entangled_states(1)[0]
        rates = _rates(sc, 0.25, 2.0)
        verdict = classify.predict_esd(rho, ChannelKind.COMPOSITE, rates).verdict
        outcome = dynamics.esd_time(rho, ChannelKind.COMPOSITE, rates).outcome
        checked += 1
        if not _crossing_agrees(verdict, outcome):
            disagreements += 1
    return SuiteResult(
        "composite-theorem", disagreements == 0,
        "%d/%d predicate vs numeric disagreements" % (disagreements, checked),
        {"disagreements": disagreements, "count": checked},
    )


def suite_diag_evolution(seed, n, taus_per_state=6) -> SuiteResult:
    s = _sampler(seed, 15)
    worst = 0.0
    min_diag = np.inf
    trace_worst = 0.0
    for _ in range(n):
        rho = s.state()
        rates = NoiseRates(
            s.uniform(0.25, 2.0), s.uniform(0.25, 2.0),
            s.uniform(0.0, 2.0), s.uniform(0.0, 2.0),
        )
        # tau window chosen so the slowest-decaying population stays
        # comfortably above the vanishing cutoff; positivity for *all* finite
        # tau is the analytic statement, testable only on a bounded window
        tau_max = 2.0 / max(rates.g1_a, rates.g1_b)
        for _ in range(taus_per_state):
            tau = s.uniform(1e-6, tau_max)
            diag_cf = classify.diag_evolution_amp(rho, rates, tau)
            via_channel = channels.apply_raw(
                channels.channel_at(ChannelKind.COMPOSITE, rates, tau).operators,
                rho.data,
            ).diagonal().real
            worst = max(worst, float(np.abs(diag_cf - via_channel).max()))
            trace_worst = max(trace_worst, abs(diag_cf.sum() - 1.0))
            min_diag = min(min_diag, float(diag_cf.min()))
    ok = worst <= TOL_DIAG and trace_worst <= TOL_DIAG and min_diag > qstate.TOL_ZERO
    return SuiteResult(
        "diag-evolution", ok,
        "max deviation %.3e, trace %.3e, min population %.3e"
        % (worst, trace_worst, min_diag),
        {"max_dev": worst, "trace_dev": trace_worst, "min_diag": min_diag,
         "tol": TOL_DIAG, "count": n},
    )


def suite_additivity(seed, n) -> SuiteResult:
    """Search slice-IV entangled states for single-noise survival with
    composite-noise death; also checks the theorem-mandated outcomes."""
    s = _sampler(seed, 16, subspace="IV")
    rates = NoiseRates(1.0, 1.0, 1.0, 1.0)
    theorem_failures = 0
    found = None
    n_found = 0
    for i in range(n):
        rho = s.entangled_states(1)[0]
        ph = dynamics.esd_time(rho, ChannelKind.PHASE, rates)
        am = dynamics.esd_time(rho, ChannelKind.AMPLITUDE, rates)
        co = dynamics.esd_time(rho, ChannelKind.COMPOSITE, rates)
        # slice IV is dephasing-safe; anything with |uu> population dies
        # under the combined noise
        if ph.outcome != dynamics.NO_CROSSING or co.outcome != dynamics.FINITE:
            theorem_failures += 1
        if (
            ph.outcome == dynamics.NO_CROSSING
            and am.outcome == dynamics.NO_CROSSING
            and co.outcome == dynamics.FINITE
        ):
            n_found += 1
            if found is None:
                found = {
                    "index": i,
                    "state": qstate.to_json_dict(rho),
                    "phase": ph.outcome,
                    "amplitude": am.outcome,
                    "composite": co.outcome,
                    "t_star": co.t_star,
                }
    return SuiteResult(
        "additivity-violation", theorem_failures == 0,
        "%d violators among %d samples (%d theorem failures)"
        % (n_found, n, theorem_failures),
        {"found": n_found, "theorem_failures": theorem_failures, "count": n,
         "example": found},
    )


_ALL_SUITES = (
    suite_kraus_structure,
    suite_completeness,
    suite_factorization,
    suite_semigroup,
    suite_lindblad_agreement,
    suite_closed_form,
    suite_dephased_limit,
    suite_phase_theorem,
    suite_composite_theorem,
    suite_diag_evolution,
    suite_additivity,
)


def run_all(seed: int, samples: int) -> VerifyReport:
    """Run the whole battery with deterministic per-suite sample streams."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    results = [suite(seed, samples) for suite in _ALL_SUITES]
    return VerifyReport(seed, samples, results)


def run_additivity(seed: int, samples: int) -> VerifyReport:
    """Additivity scenario: the search must actually find a violator."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    result = suite_additivity(seed, samples)
    if result.stats["found"] == 0:
        result.passed = False
        result.detail += "; no violator found"
    return VerifyReport(seed, samples, [result])
