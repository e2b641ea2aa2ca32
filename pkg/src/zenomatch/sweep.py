"""Parameter sweeps and the figure presets.

A sweep varies one quantity over a grid and tabulates requested observables.
Tables are written as CSV with a leading ``#``-prefixed JSON metadata line,
or as a single JSON document; both carry enough metadata to rerun the sweep.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._backend import BACKEND
from .continuous import find_gamma_pair, lifetime_continuous, populations, tau_c
from .errors import InvalidParameters, NeverDetected
from .matcher import (
    calibrate_delta0,
    newton_iterates,
    pulse_interval_approx,
    pulsed_mean,
    solve_pulse_interval,
)
from .params import EffectiveParams, ThreeLevelParams, reduce_to_effective
from .pulsed import PulseScheme, excitation_probability, mean_detection_time
from .threelevel import lifetime_three_level

NEVER = "never_detected"
TWO_PI = 2.0 * math.pi

# Experimental values behind the fig6 presets, converted from Hz to rad/s.
FIG6_OMEGA = TWO_PI * 48.5
FIG6_GAMMA = TWO_PI * 1.74e6
FIG6_DELTA_PLUS = TWO_PI * 3.18e6
FIG6_DELTA_MINUS = -20e6

OUTPUTS = {
    "gamma_over_omega": ("tau_c", "delta_t_approx", "mean_t", "delta_t_iter1", "mean_t_iter1",
                         "delta_t_iter3", "mean_t_iter3", "delta_t_exact", "mean_t_exact"),
    "s0": ("Omega", "delta0", "gamma", "delta", "tau_c", "delta_t_approx", "delta_t_exact",
           "tau_3"),
    "delta_t": ("P2", "mean_t", "tau_EP"),
    "time": ("p1", "p2", "p_tot", "W"),
}
DEFAULT_OUTPUTS = {
    "gamma_over_omega": ("tau_c", "delta_t_approx", "mean_t", "delta_t_exact", "mean_t_exact"),
    "s0": ("Omega", "delta0", "gamma", "delta", "tau_c"),
    "delta_t": ("P2", "mean_t", "tau_EP"),
    "time": ("p1", "p2", "p_tot", "W"),
}
# "populations" is accepted as shorthand for the time-sweep columns.
_ALIASES = {"populations": ("p1", "p2", "p_tot", "W")}


@dataclass
class SweepSpec:
    """One swept variable on a linear or logarithmic grid."""

    variable: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"
    fixed: dict = field(default_factory=dict)
    outputs: tuple = ()

    def __post_init__(self):
        if self.variable not in OUTPUTS:
            raise InvalidParameters(f"unknown sweep variable {self.variable!r}")
        if self.count < 2:
            raise InvalidParameters("count must be >= 2")
        if not self.start < self.stop:
            raise InvalidParameters("start must be < stop")
        if self.spacing not in ("linear", "log"):
            raise InvalidParameters("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.start <= 0:
            raise InvalidParameters("log spacing needs start > 0")
        outputs = []
        for name in self.outputs or DEFAULT_OUTPUTS[self.variable]:
            outputs.extend(_ALIASES.get(name, (name,)))
        unknown = [o for o in outputs if o not in OUTPUTS[self.variable]]
        if unknown:
            raise InvalidParameters(f"outputs {unknown} not available for {self.variable}")
        self.outputs = tuple(outputs)
        self.fixed = {k: float(v) if not isinstance(v, str) else v for k, v in self.fixed.items()}
        self.count = int(self.count)

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "start": self.start,
            "stop": self.stop,
            "count": self.count,
            "spacing": self.spacing,
            "fixed": dict(sorted(self.fixed.items())),
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "SweepSpec":
        return cls(
            variable=record["variable"],
            start=float(record["start"]),
            stop=float(record["stop"]),
            count=int(record["count"]),
            spacing=record.get("spacing", "linear"),
            fixed=dict(record.get("fixed", {})),
            outputs=tuple(record.get("outputs", ())),
        )


@dataclass
class SweepTable:
    columns: list
    rows: list
    metadata: dict

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([np.nan if r[i] == NEVER else r[i] for r in self.rows], dtype=float)

    def select(self, **where) -> "SweepTable":
        idx = {k: self.columns.index(k) for k in where}
        rows = [r for r in self.rows if all(r[idx[k]] == v for k, v in where.items())]
        return SweepTable(list(self.columns), rows, self.metadata)

    def write(self, fh, fmt: str = "csv"):
        if fmt == "csv":
            fh.write("# " + json.dumps(self.metadata, sort_keys=True) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_cell(v) for v in row])
        elif fmt == "json":
            doc = {"metadata": self.metadata, "columns": self.columns,
                   "rows": [[_json_cell(v) for v in row] for row in self.rows]}
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        else:
            raise InvalidParameters(f"unknown format {fmt!r}")

    def dumps(self, fmt: str = "csv") -> str:
        buf = io.StringIO()
        self.write(buf, fmt)
        return buf.getvalue()


def _cell(v):
    if isinstance(v, str):
        return v
    return repr(float(v))


def _json_cell(v):
    return v if isinstance(v, str) else float(v)


def _guard(fn):
    try:
        return fn()
    except NeverDetected:
        return NEVER


def _effective_point(fixed, gamma):
    omega = fixed.get("omega", 1.0)
    delta = fixed.get("delta", 0.0)
    return EffectiveParams(omega, gamma, delta, fixed.get("delta0", delta))


def _row_gamma(spec, x):
    e = _effective_point(spec.fixed, x * spec.fixed.get("omega", 1.0))
    out = {}
    want = set(spec.outputs)
    if "tau_c" in want:
        out["tau_c"] = lifetime_continuous(e)
    dt = pulse_interval_approx(e)
    out["delta_t_approx"] = dt
    out["mean_t"] = pulsed_mean(e, dt)
    if want & {"delta_t_iter1", "mean_t_iter1", "delta_t_iter3", "mean_t_iter3"}:
        its = newton_iterates(e, 3)
        for k in (1, 3):
            out[f"delta_t_iter{k}"] = its[k]
            out[f"mean_t_iter{k}"] = pulsed_mean(e, its[k])
    if want & {"delta_t_exact", "mean_t_exact"}:
        m = solve_pulse_interval(e)
        out["delta_t_exact"] = m.delta_t
        out["mean_t_exact"] = m.mean_t
    return [NEVER if isinstance(out[o], float) and math.isinf(out[o]) else out[o]
            for o in spec.outputs]


def _three_level_point(fixed, s0):
    omega = fixed.get("omega", FIG6_OMEGA)
    Gamma = fixed.get("Gamma", FIG6_GAMMA)
    Delta = fixed.get("Delta", 0.0)
    calibrate = fixed.get("calibrate", "none")
    Omega = Gamma * math.sqrt(s0 / 2.0)
    if calibrate == "none":
        delta0 = fixed.get("delta0", 0.0)
    else:
        delta0 = calibrate_delta0(Delta, Omega, Gamma, mode=calibrate)
    return ThreeLevelParams(omega, Omega, Gamma, Delta, delta0)


def _row_s0(spec, x):
    p = _three_level_point(spec.fixed, x)
    e = reduce_to_effective(p)
    out = {"Omega": p.Omega, "delta0": p.delta0, "gamma": e.gamma, "delta": e.delta}
    want = set(spec.outputs)
    if "tau_c" in want:
        out["tau_c"] = lifetime_continuous(e)
    if "delta_t_approx" in want:
        out["delta_t_approx"] = pulse_interval_approx(e)
    if "delta_t_exact" in want:
        out["delta_t_exact"] = solve_pulse_interval(e).delta_t
    if "tau_3" in want:
        out["tau_3"] = _guard(lambda: lifetime_three_level(p).tau)
    return [out[o] for o in spec.outputs]


def _row_delta_t(spec, x):
    s = PulseScheme(x, spec.fixed.get("delta0", 0.0), spec.fixed.get("omega", 1.0))
    out = {"P2": excitation_probability(s), "mean_t": _guard(lambda: mean_detection_time(s))}
    if "tau_EP" in spec.outputs:
        out["tau_EP"] = s.tau_Z**2 / s.delta_t
    return [out[o] for o in spec.outputs]


_ROWS = {"gamma_over_omega": _row_gamma, "s0": _row_s0, "delta_t": _row_delta_t}


def run_sweep(spec: SweepSpec, metadata: dict | None = None) -> SweepTable:
    """Evaluate ``spec`` point by point in grid order."""
    xs = spec.values()
    if spec.variable == "time":
        e = _effective_point(spec.fixed, spec.fixed.get("gamma", 0.0))
        p1, p2 = populations(e, xs)
        cols = {"p1": p1, "p2": p2, "p_tot": p1 + p2, "W": e.gamma * p2}
        rows = [[float(x)] + [float(cols[o][i]) for o in spec.outputs] for i, x in enumerate(xs)]
    else:
        rows = [[float(x)] + _ROWS[spec.variable](spec, x) for x in xs]
    meta = {"kind": "sweep", "spec": spec.to_dict(), "version": __version__, "backend": BACKEND}
    if metadata:
        meta.update(metadata)
    return SweepTable([spec.variable, *spec.outputs], rows, meta)


def _stack(tables, key, keys, metadata):
    columns = [key, *tables[0].columns]
    rows = [[k, *row] for k, t in zip(keys, tables) for row in t.rows]
    return SweepTable(columns, rows, metadata)


def _preset_meta(name, options, **extra):
    meta = {"kind": "preset", "preset": name, "options": options, "version": __version__,
            "backend": BACKEND}
    meta.update(extra)
    return meta


FIG2_DETUNINGS = (0.0, 1.0, 3.0)


def _fig2(options):
    tables = [run_sweep(SweepSpec("gamma_over_omega", 0.01, 100.0, 201, "log",
                                  {"omega": 1.0, "delta": d}, ("tau_c",)))
              for d in FIG2_DETUNINGS]
    meta = _preset_meta("fig2", options, omega=1.0,
                        notes="detuning set {0,1,3}*omega chosen for illustration",
                        gamma_min_over_omega={repr(d): math.sqrt(2 + 4 * d * d)
                                              for d in FIG2_DETUNINGS})
    return _stack(tables, "delta_over_omega", FIG2_DETUNINGS, meta)


FIG3_RATIOS = (0.1, 20.0)


def _fig3(options):
    tables = [run_sweep(SweepSpec("time", 0.0, 60.0, 601, "linear",
                                  {"omega": 1.0, "gamma": g, "delta": 0.0}, ("populations",)))
              for g in FIG3_RATIOS]
    pair = find_gamma_pair(1.0, 0.0, tau_c(1.0, FIG3_RATIOS[1]))
    meta = _preset_meta(
        "fig3", options, omega=1.0, delta=0.0,
        tau_c={repr(g): tau_c(1.0, g) for g in FIG3_RATIOS},
        weak_partner_of_strong=pair.gamma_weak,
    )
    return _stack(tables, "gamma_over_omega", FIG3_RATIOS, meta)


FIG4_DETUNINGS = (0.0, 1.0, 3.0)


def _fig4(options):
    tables = [run_sweep(SweepSpec("gamma_over_omega", 0.05, 50.0, 121, "log",
                                  {"omega": 1.0, "delta": d, "delta0": d},
                                  ("tau_c", "delta_t_approx", "mean_t")))
              for d in FIG4_DETUNINGS]
    meta = _preset_meta("fig4", options, omega=1.0,
                        notes="pulsed evolution uses delta0 = delta (Delta_tilde = 0)")
    return _stack(tables, "delta_over_omega", FIG4_DETUNINGS, meta)


def _fig5(options):
    spec = SweepSpec("gamma_over_omega", 0.5, 20.0, 79, "linear",
                     {"omega": 1.0, "delta": 3.0, "delta0": 3.0},
                     ("tau_c", "delta_t_approx", "mean_t", "delta_t_iter1", "mean_t_iter1",
                      "delta_t_iter3", "mean_t_iter3"))
    return run_sweep(spec, _preset_meta("fig5", options, omega=1.0, delta=3.0, delta0=3.0))


def _fig6(name, options):
    fixed = {"omega": FIG6_OMEGA, "Gamma": FIG6_GAMMA}
    if name == "fig6-solid":
        fixed.update(Delta=0.0, delta0=0.0)
        delta_note = "Delta = delta0 = 0"
    else:
        sign = options.get("delta_sign", "+")
        fixed.update(Delta=FIG6_DELTA_PLUS if sign == "+" else FIG6_DELTA_MINUS,
                     calibrate="exact")
        delta_note = ("Delta = +2pi*3.18e6 1/s" if sign == "+"
                      else "Delta = -20e6 1/s")
    spec = SweepSpec("s0", 1e-5, 1e-1, 81, "log", fixed,
                     ("Omega", "delta0", "gamma", "delta", "tau_c"))
    return run_sweep(spec, _preset_meta(name, options, delta_convention=delta_note))


PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6-solid", "fig6-dashed")


def run_preset(name: str, **options) -> SweepTable:
    """Dataset behind one of the figures.

    Options: ``delta_sign`` (``"+"`` or ``"-"``) selects the detuning
    convention for ``fig6-dashed``.
    """
    if name not in PRESETS:
        raise InvalidParameters(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    options = {k: v for k, v in sorted(options.items()) if v is not None}
    if name == "fig6-dashed":
        options.setdefault("delta_sign", "+")
        if options["delta_sign"] not in ("+", "-"):
            raise InvalidParameters("delta_sign must be '+' or '-'")
    if name.startswith("fig6"):
        return _fig6(name, options)
    return {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}[name](options)


def rerun(metadata: dict) -> SweepTable:
    """Reproduce a table from its metadata block."""
    kind = metadata.get("kind")
    if kind == "preset":
        return run_preset(metadata["preset"], **metadata.get("options", {}))
    if kind == "sweep" or "spec" in metadata:
        return run_sweep(SweepSpec.from_dict(metadata["spec"]))
    if "variable" in metadata:
        return run_sweep(SweepSpec.from_dict(metadata))
    raise InvalidParameters("metadata describes neither a preset nor a sweep")


__all__ = ["NEVER", "PRESETS", "SweepSpec", "SweepTable", "rerun", "run_preset", "run_sweep"]
