"""Command-line interface.

Exit codes: 0 success, 2 invalid arguments, 3 solver non-convergence,
4 never detected.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .continuous import (
    continuous_trace,
    find_gamma_pair,
    lifetime_continuous,
    lifetime_quadrature_oracle,
)
from .errors import (
    InfiniteLifetime,
    InvalidParameters,
    InvalidReduction,
    NeverDetected,
    NonConvergence,
    NoSolution,
    SingularStep,
    StepBudgetExceeded,
)
from .matcher import match_approx, solve_pulse_interval
from .params import EffectiveParams, ThreeLevelParams, reduce_to_effective
from .pulsed import PulseScheme, excitation_probability, mean_detection_time
from .sweep import PRESETS, SweepSpec, rerun, run_preset, run_sweep
from .threelevel import GROUND, build_hamiltonian, propagate

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_NEVER = 0, 2, 3, 4

# options carrying angular frequencies; scaled by 2*pi under --units hertz
FREQUENCY_OPTIONS = ("omega", "gamma", "delta", "delta0", "Omega", "Gamma", "Delta")


class UsageError(Exception):
    pass


def _add_global(p, suppress):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--out", default=default, help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--units", choices=("angular", "hertz"),
                   default=default if suppress else "angular",
                   help="hertz: frequency inputs are multiplied by 2*pi")


def _add_effective(p):
    p.add_argument("--omega", type=float, required=True, help="1-2 Rabi frequency")
    p.add_argument("--gamma", type=float, help="effective decay rate")
    p.add_argument("--delta", type=float, default=None, help="effective detuning")
    p.add_argument("--delta0", type=float, default=None, help="bare 1-2 detuning")
    p.add_argument("--Omega", type=float, help="2-3 coupling Rabi frequency (three-level input)")
    p.add_argument("--Gamma", type=float, help="level-3 decay rate (three-level input)")
    p.add_argument("--Delta", type=float, default=None, help="2-3 detuning (three-level input)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenomatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_global(p, suppress=True)
        return p

    p = command("continuous", "continuous-measurement lifetime")
    _add_effective(p)
    p.add_argument("--check", action="store_true", help="also run the quadrature oracle")

    p = command("pulsed", "pulsed-measurement excitation probability and mean time")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--delta0", type=float, default=0.0)
    p.add_argument("--delta-t", dest="delta_t", type=float, required=True)

    p = command("match", "pulse interval matching the continuous lifetime")
    _add_effective(p)
    p.add_argument("--method", choices=("approx", "newton"), default="newton")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=50)
    p.add_argument("--derivative", choices=("approx", "exact", "auto"), default="auto")

    p = command("gamma-pair", "weak and strong decay rates giving a target lifetime")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--target-tau", dest="target_tau", type=float, required=True)

    p = command("evolve", "population trace of the two- or three-level model")
    _add_effective(p)
    p.add_argument("--model", choices=("two", "three"), default="two")
    p.add_argument("--t-end", dest="t_end", type=float, default=None)
    p.add_argument("--points", type=int, default=401)

    p = command("sweep", "parameter sweep from a JSON config or flags")
    p.add_argument("--config", help="SweepSpec JSON, or a metadata block from a previous run")
    p.add_argument("--variable", choices=("gamma_over_omega", "s0", "delta_t", "time"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="fixed parameter, repeatable")
    p.add_argument("--outputs", nargs="*", default=[])

    p = command("preset", "dataset behind one of the figures")
    p.add_argument("name", choices=PRESETS)
    p.add_argument("--delta-sign", dest="delta_sign", choices=("+", "-"), default=None,
                   help="fig6-dashed detuning: + is 2pi*3.18e6 1/s (default), - is -20e6 1/s")
    return parser


def _scale_units(args):
    if args.units != "hertz":
        return
    for name in FREQUENCY_OPTIONS:
        value = getattr(args, name, None)
        if value is not None:
            setattr(args, name, 2.0 * math.pi * value)


def _effective_from_args(args) -> EffectiveParams:
    three = [args.Omega, args.Gamma]
    if any(v is not None for v in three):
        if args.gamma is not None:
            raise UsageError("give either --gamma or --Omega/--Gamma, not both")
        if args.Omega is None or args.Gamma is None:
            raise UsageError("three-level input needs both --Omega and --Gamma")
        p = ThreeLevelParams(args.omega, args.Omega, args.Gamma, args.Delta or 0.0,
                             args.delta0 or 0.0)
        return reduce_to_effective(p)
    if args.gamma is None:
        raise UsageError("give --gamma (effective) or --Omega/--Gamma (three-level)")
    if args.Delta is not None:
        raise UsageError("--Delta needs three-level input")
    delta = 0.0 if args.delta is None else args.delta
    return EffectiveParams(args.omega, args.gamma, delta, args.delta0)


def _three_level_from_args(args) -> ThreeLevelParams:
    if args.Omega is None or args.Gamma is None:
        raise UsageError("--model three needs --Omega and --Gamma")
    return ThreeLevelParams(args.omega, args.Omega, args.Gamma, args.Delta or 0.0,
                            args.delta0 or 0.0)


def _emit_record(record: dict, fmt, fh):
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        keys = list(record)
        writer.writerow(keys)
        writer.writerow([repr(record[k]) if isinstance(record[k], float) else record[k]
                         for k in keys])
    else:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _cmd_continuous(args, fh):
    e = _effective_from_args(args)
    record = {"omega": e.omega, "gamma": e.gamma, "delta": e.delta,
              "tau_c": lifetime_continuous(e)}
    if args.check:
        record["tau_c_quadrature"] = lifetime_quadrature_oracle(e)
    _emit_record(record, args.format or "json", fh)


def _cmd_pulsed(args, fh):
    s = PulseScheme(args.delta_t, args.delta0, args.omega)
    record = {"omega": s.omega, "delta0": s.delta0, "delta_t": s.delta_t,
              "P2": excitation_probability(s), "mean_t": mean_detection_time(s)}
    _emit_record(record, args.format or "json", fh)


def _cmd_match(args, fh):
    e = _effective_from_args(args)
    if args.method == "approx":
        result = match_approx(e)
    else:
        result = solve_pulse_interval(e, args.tol, args.max_iter, derivative=args.derivative)
    _emit_record(result.to_dict(), args.format or "json", fh)


def _cmd_gamma_pair(args, fh):
    pair = find_gamma_pair(args.omega, args.delta, args.target_tau)
    _emit_record({"gamma_weak": pair.gamma_weak, "gamma_strong": pair.gamma_strong,
                  "gamma_min": pair.gamma_min, "target_tau": pair.target_tau},
                 args.format or "json", fh)


def _cmd_evolve(args, fh):
    if args.model == "two":
        e = _effective_from_args(args)
        trace = continuous_trace(e, args.t_end, args.points)
        if (args.format or "csv") == "json":
            fh.write(json.dumps({c: list(map(float, v)) for c, v in
                                 zip(trace.COLUMNS, (trace.times, trace.p1, trace.p2,
                                                     trace.p_tot, trace.W))},
                                sort_keys=True) + "\n")
        else:
            trace.write_csv(fh)
        return
    p = _three_level_from_args(args)
    t_end = args.t_end
    if t_end is None:
        t_end = 5.0 * lifetime_continuous(reduce_to_effective(p))
    import numpy as np

    traj = propagate(build_hamiltonian(p), GROUND, np.linspace(0.0, t_end, args.points))
    if (args.format or "csv") == "json":
        pops = traj.populations
        fh.write(json.dumps({"t": list(map(float, traj.times)),
                             "p1": list(map(float, pops[:, 0])),
                             "p2": list(map(float, pops[:, 1])),
                             "p3": list(map(float, pops[:, 2])),
                             "p_tot": list(map(float, pops.sum(axis=1)))},
                            sort_keys=True) + "\n")
    else:
        traj.write_csv(fh)


def _parse_param(text):
    if "=" not in text:
        raise UsageError(f"--param expects KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key, float(value)
    except ValueError:
        return key, value


def _cmd_sweep(args, fh):
    if args.config:
        record = json.loads(Path(args.config).read_text())
        table = rerun(record)
    else:
        if None in (args.variable, args.start, args.stop, args.count):
            raise UsageError("sweep needs --config or --variable/--start/--stop/--count")
        fixed = dict(_parse_param(t) for t in args.param)
        if args.units == "hertz":
            fixed = {k: 2.0 * math.pi * v if k in FREQUENCY_OPTIONS else v
                     for k, v in fixed.items()}
        spec = SweepSpec(args.variable, args.start, args.stop, args.count, args.spacing,
                         fixed, tuple(args.outputs))
        table = run_sweep(spec)
    table.write(fh, args.format or "csv")


def _cmd_preset(args, fh):
    run_preset(args.name, delta_sign=args.delta_sign).write(fh, args.format or "csv")


COMMANDS = {
    "continuous": _cmd_continuous,
    "pulsed": _cmd_pulsed,
    "match": _cmd_match,
    "gamma-pair": _cmd_gamma_pair,
    "evolve": _cmd_evolve,
    "sweep": _cmd_sweep,
    "preset": _cmd_preset,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _scale_units(args)
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                COMMANDS[args.command](args, fh)
        else:
            COMMANDS[args.command](args, sys.stdout)
    except (UsageError, InvalidParameters, InvalidReduction, NoSolution) as exc:
        print(f"zenomatch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergence, SingularStep, StepBudgetExceeded) as exc:
        print(f"zenomatch: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (NeverDetected, InfiniteLifetime) as exc:
        print(f"zenomatch: never detected: {exc}", file=sys.stderr)
        return EXIT_NEVER
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
