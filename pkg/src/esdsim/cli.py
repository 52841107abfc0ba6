"""Command-line interface.

Subcommands: evolve, classify, esd-time, verify, sweep. Exit codes: 0 ok,
1 usage error, 2 validation/input failure, 3 verification failure. CSV and
JSON numbers are emitted in shortest round-trip decimal form.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import classify, dynamics, qstate, verify
from .channels import ChannelKind, NoiseRates

CSV_EVOLVE_HEADER = "t,concurrence,Lambda,rho11,rho22,rho33,rho44,purity"
CSV_SWEEP_HEADER = "gamma1,gamma2,outcome,t_star"

_CHANNEL_CHOICES = ("am", "ph", "composite")


class BadStateFileError(ValueError):
    pass


class EmptyGridError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, which is reserved
    # for validation failures here)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _add_state(p):
    p.add_argument(
        "--state", required=True,
        help="preset name (bell-phi+, bell-phi-, bell-psi+, bell-psi-, up-up, "
             "down-down, mixed, werner:p=<v>) or path to a JSON matrix file",
    )


def _add_rates(p):
    p.add_argument("--g1a", type=float, default=0.0, help="relaxation rate, party A")
    p.add_argument("--g1b", type=float, default=0.0, help="relaxation rate, party B")
    p.add_argument("--g2a", type=float, default=0.0, help="dephasing rate, party A")
    p.add_argument("--g2b", type=float, default=0.0, help="dephasing rate, party B")


def _add_out(p):
    p.add_argument("--out", default="-", help="output path, or - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="output format (default: natural for the command)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="esdsim",
                     description="Two-qubit decoherence and entanglement decay toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[], help="trajectory CSV over a time grid")
    _add_state(p)
    p.add_argument("--channel", choices=_CHANNEL_CHOICES, required=True)
    _add_rates(p)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--spacing", choices=("linear", "geometric"), default="linear")
    _add_out(p)

    p = sub.add_parser("classify", help="subspace label and per-channel verdicts")
    _add_state(p)
    _add_out(p)

    p = sub.add_parser("esd-time", help="locate the disentanglement time")
    _add_state(p)
    p.add_argument("--channel", choices=_CHANNEL_CHOICES, required=True)
    _add_rates(p)
    _add_out(p)

    p = sub.add_parser("verify", help="run the invariant battery")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--scenario", choices=("all", "additivity"), default="all")
    _add_out(p)

    p = sub.add_parser("sweep", help="ESD outcome over a rate grid (CSV)")
    _add_state(p)
    p.add_argument("--g1-values", required=True,
                   help="comma-separated relaxation rates (shared by both parties)")
    p.add_argument("--g2-values", required=True,
                   help="comma-separated dephasing rates (shared by both parties)")
    _add_out(p)
    return parser


def _load_state(source: str) -> qstate.DensityMatrix:
    looks_like_file = os.path.exists(source) or source.endswith(".json")
    if looks_like_file:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise BadStateFileError("cannot read state file %r: %s" % (source, exc))
        return qstate.from_json_dict(payload)
    return qstate.preset(source)


def _rates_from(args) -> NoiseRates:
    return NoiseRates(args.g1a, args.g1b, args.g2a, args.g2b)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write(out: str, text: str):
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValueError("cannot write %r: %s" % (out, exc))


def _time_grid(t_max: float, n_points: int, spacing: str) -> np.ndarray:
    if n_points < 1:
        raise EmptyGridError("points must be >= 1")
    if t_max < 0:
        raise ValueError("tmax must be >= 0")
    if t_max == 0.0 or n_points == 1:
        if n_points != 1:
            raise EmptyGridError("tmax=0 admits exactly one grid point")
        return np.zeros(1)
    if spacing == "linear":
        return np.linspace(0.0, t_max, n_points)
    if n_points == 2:
        return np.array([0.0, t_max])
    tail = np.geomspace(t_max * 1e-6, t_max, n_points - 1)
    return np.concatenate([[0.0], tail])


def cmd_evolve(args) -> int:
    rho0 = _load_state(args.state)
    grid = _time_grid(args.tmax, args.points, args.spacing)
    traj = dynamics.evolve(rho0, ChannelKind(args.channel), _rates_from(args), grid)
    lines = [CSV_EVOLVE_HEADER]
    for t, state, rec in zip(traj.times, traj.states, traj.lambdas):
        d = state.diag
        lines.append(",".join([
            _fmt(t), _fmt(rec.concurrence), _fmt(rec.lambda_cap),
            _fmt(d[0]), _fmt(d[1]), _fmt(d[2]), _fmt(d[3]),
            _fmt(state.purity()),
        ]))
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _prediction(rho, kind, rates=None) -> str:
    try:
        return classify.predict_esd(rho, kind, rates).verdict
    except classify.UndecidedAmplitudeError:
        return "undecided"


def cmd_classify(args) -> int:
    rho = _load_state(args.state)
    label = classify.subspace(rho)
    from .entanglement import concurrence
    report = {
        "subspace": {
            "vanishing": sorted(label.vanishing),
            "canonical": label.canonical,
        },
        "predictions": {
            "phase": _prediction(rho, ChannelKind.PHASE),
            "amplitude": _prediction(rho, ChannelKind.AMPLITUDE),
            "composite": _prediction(rho, ChannelKind.COMPOSITE),
        },
        "concurrence_t0": concurrence(rho).concurrence,
    }
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return 0


def cmd_esd_time(args) -> int:
    rho = _load_state(args.state)
    kind = ChannelKind(args.channel)
    rates = _rates_from(args)
    res = dynamics.esd_time(rho, kind, rates)
    report = {
        "outcome": res.outcome,
        "t_star": res.t_star,
        "horizon": res.horizon,
        "lambda_at_horizon": res.lambda_at_horizon,
        "lambda_t0": res.lambda_t0,
        "prediction": _prediction(rho, kind, rates),
    }
    if res.outcome == dynamics.NO_CROSSING and res.lambda_at_horizon > 1e-8:
        report["warning"] = (
            "entanglement still above 1e-8 at the horizon; the no-crossing "
            "call rests on the scan horizon heuristic"
        )
    _write(args.out, json.dumps(report, indent=2) + "\n")
    return 0


def _verify_text(report) -> str:
    lines = []
    for r in report.results:
        lines.append("[%s] %s: %s" % ("PASS" if r.passed else "FAIL", r.name, r.detail))
        example = r.stats.get("example")
        if example:
            lines.append("  example state (slice IV, rates 1,1,1,1):")
            lines.append("  " + json.dumps(example["state"]))
            lines.append(
                "  phase: %s  amplitude: %s  composite: %s  t_star: %s"
                % (example["phase"], example["amplitude"], example["composite"],
                   _fmt(example["t_star"]))
            )
    lines.append(
        "%d/%d suites passed (seed %d, samples %d)"
        % (sum(r.passed for r in report.results), len(report.results),
           report.seed, report.samples)
    )
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise ValueError("samples must be >= 1")
    if args.scenario == "additivity":
        report = verify.run_additivity(args.seed, args.samples)
    else:
        report = verify.run_all(args.seed, args.samples)
    if args.format == "json":
        payload = {
            "ok": report.ok,
            "seed": report.seed,
            "samples": report.samples,
            "suites": [
                {"name": r.name, "passed": r.passed, "detail": r.detail,
                 "stats": r.stats}
                for r in report.results
            ],
        }
        _write(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        _write(args.out, _verify_text(report))
    return 0 if report.ok else 3


def _parse_values(raw: str, name: str):
    vals = [v for v in (x.strip() for x in raw.split(",")) if v]
    if not vals:
        raise EmptyGridError("%s is empty" % name)
    try:
        return [float(v) for v in vals]
    except ValueError as exc:
        raise ValueError("bad %s: %s" % (name, exc))


def cmd_sweep(args) -> int:
    rho = _load_state(args.state)
    g1s = _parse_values(args.g1_values, "--g1-values")
    g2s = _parse_values(args.g2_values, "--g2-values")
    lines = [CSV_SWEEP_HEADER]
    for g1 in g1s:
        for g2 in g2s:
            rates = NoiseRates(g1, g1, g2, g2)
            try:
                res = dynamics.esd_time(rho, ChannelKind.COMPOSITE, rates)
            except dynamics.AllRatesZeroError:
                # no noise at all: entanglement never decays
                lines.append(",".join([_fmt(g1), _fmt(g2), "no-crossing", ""]))
                continue
            if res.outcome == dynamics.FINITE:
                lines.append(",".join([_fmt(g1), _fmt(g2), "finite", _fmt(res.t_star)]))
            elif res.outcome == dynamics.NO_CROSSING:
                lines.append(",".join([_fmt(g1), _fmt(g2), "no-crossing", ""]))
            else:
                lines.append(",".join([_fmt(g1), _fmt(g2), "separable", ""]))
    _write(args.out, "\n".join(lines) + "\n")
    return 0


_DISPATCH = {
    "evolve": cmd_evolve,
    "classify": cmd_classify,
    "esd-time": cmd_esd_time,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, qstate.StateValidationError) as exc:
        print("esdsim %s: %s" % (args.command, exc), file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
