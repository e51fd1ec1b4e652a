"""Command-line driver: one subcommand per scenario, each writing a CSV or JSON table.

Parameter values come from three layers, later ones winning: built-in
defaults, a flat ``key = value`` config file (``--config``), and command-line
flags. Output goes to ``--out`` or, failing that, ``<dir>/<scenario>.<format>``
where ``<dir>`` is ``$QEDFRICTION_OUTPUT_DIR`` or the working directory.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import CutoffRequired, GridTooCoarse, NumericalError
from .numerics import QuadratureSpec, oscillatory_phase_integral, quad_semi_infinite
from .oracle import (
    DEFAULT_RR_GRID,
    DEFAULT_VARIANCE_GRID,
    HannTone,
    ModeGrid,
    driven_response,
    rr_kernel_check,
    variance_curve,
    windowed_xi_check,
)
from .response import OscillatorParams, alpha_identity_residual
from .rindler import (
    RindlerParams,
    coth_integrand,
    rindler_diffusion_rate,
    rindler_drag,
    spectrum_table,
    xi_eta_closed_form,
)
from .spectral import PlanckOccupation, planck_occupation
from .thermal_kinetics import (
    balance_residual,
    diffusion_rate,
    drag_force,
    drag_force_qed3d,
    integrand_table,
    recover_planck,
)

OUTPUT_DIR_ENV = "QEDFRICTION_OUTPUT_DIR"
FORMATS = ("csv", "json")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    """Invalid scenario parameters."""


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def _cell(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_table(rows: list[dict], fmt: str, columns: list[str] | None = None) -> str:
    """Render rows as CSV (17 significant digits, ``\\n`` line ends) or a JSON array."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    keys = list(columns) if columns is not None else (list(rows[0]) if rows else [])
    for row in rows:
        if list(row) != keys:
            raise ValueError("rows must all have the same keys")
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if keys:
        writer.writerow(keys)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in keys])
    return buf.getvalue()


def write_table(rows: list[dict], fmt: str, path, columns: list[str] | None = None) -> None:
    """Write ``rows`` to ``path``; raises OSError on I/O failure."""
    text = format_table(rows, fmt, columns)
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# parameter parsing
# ---------------------------------------------------------------------------


def _float(name):
    def conv(text):
        try:
            return float(text)
        except (TypeError, ValueError):
            raise ConfigError(f"{name} must be a number, got {text!r}") from None

    return conv


def _int(name):
    def conv(text):
        try:
            value = float(text)
        except (TypeError, ValueError):
            raise ConfigError(f"{name} must be an integer, got {text!r}") from None
        if value != int(value):
            raise ConfigError(f"{name} must be an integer, got {text!r}")
        return int(value)

    return conv


def _float_list(name):
    one = _float(name)

    def conv(text):
        if isinstance(text, (int, float)):
            return [float(text)]
        parts = [s for s in str(text).split(",") if s.strip()]
        if not parts:
            raise ConfigError(f"{name} needs at least one value")
        return [one(s) for s in parts]

    return conv


def _choice(name, options):
    def conv(text):
        if text not in options:
            raise ConfigError(f"{name} must be one of {', '.join(options)}; got {text!r}")
        return text

    return conv


@dataclass(frozen=True)
class Param:
    name: str
    convert: Callable
    default: object
    check: Callable | None = None
    bound: str = ""
    help: str = ""


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _subluminal(vs):
    return all(abs(v) < 1 for v in vs)


def _all_positive(xs):
    return xs is None or all(x > 0 for x in xs)


_COMMON = [
    Param("beta", _float("beta"), 0.05, _positive, "beta > 0", "radiative damping (omega0 = 1)"),
]

SCENARIOS: dict[str, list[Param]] = {
    "planck-ode": [
        Param("T", _float("T"), 1.0, _positive, "T > 0", "temperature"),
        Param("omega_ref", _float("omega_ref"), None, _positive, "omega_ref > 0", "start frequency (default T)"),
        Param("span", _float("span"), 10.0, lambda x: x > 1, "span > 1", "sample [omega_ref/span, omega_ref*span]"),
        Param("samples", _int("samples"), 81, lambda x: x >= 3, "samples >= 3", "number of output frequencies"),
    ],
    "balance": [
        Param("T", _float("T"), 1.0, _positive, "T > 0", "temperature"),
        Param("omega_min", _float("omega_min"), 1e-3, _positive, "omega_min > 0", "table start"),
        Param("omega_max", _float("omega_max"), 50.0, _positive, "omega_max > 0", "table end"),
        Param("samples", _int("samples"), 201, lambda x: x >= 2, "samples >= 2", "table rows"),
        Param("v", _float("v"), 0.01, lambda x: abs(x) < 1, "|v| < 1", "velocity for the drag integrand column"),
    ],
    "drag": [
        Param("v", _float_list("v"), [0.01], _subluminal, "|v| < 1", "velocity or comma-separated list"),
        Param("T", _float("T"), 1.0, _nonneg, "T >= 0", "temperature"),
        Param(
            "form",
            _choice("form", ("exact_difference", "linearized", "qed3d", "coth_total", "net_linearized")),
            "exact_difference",
            help="drag formula",
        ),
        Param("a", _float("a"), 2 * math.pi, _positive, "a > 0", "acceleration for coth_total / net_linearized"),
        Param("omega_max", _float_list("omega_max"), None, _all_positive, "omega_max > 0",
              "cutoff(s) for coth_total, comma-separated"),
        Param("policy", _choice("policy", ("fixed", "adaptive")), "fixed", help="coth_total tail policy"),
    ],
    "diffusion": [
        Param("T", _float("T"), 1.0, _nonneg, "T >= 0", "temperature"),
    ],
    "rindler-spectrum": [
        Param("a", _float("a"), 1.0, _positive, "a > 0", "proper acceleration"),
        Param("Omega_min", _float("Omega_min"), 0.1, _positive, "Omega_min > 0", "table start (units of a)"),
        Param("Omega_max", _float("Omega_max"), 10.0, _positive, "Omega_max > 0", "table end (units of a)"),
        Param("samples", _int("samples"), 1000, lambda x: x >= 2, "samples >= 2", "table rows"),
    ],
    "rindler-diffusion": [
        Param("a", _float_list("a"), [2 * math.pi], _all_positive, "a > 0", "acceleration(s), comma-separated"),
    ],
    "oracle-variance": [
        Param("check", _choice("check", ("variance", "rr", "transfer")), "variance",
              help="variance slope, radiation-reaction kernel or transfer function"),
        Param("L", _float("L"), None, _positive, "L > 0", "box length"),
        Param("N", _int("N"), None, lambda x: x >= 1, "N >= 1", "positive-k modes"),
        Param("refine", _int("refine"), 1, lambda x: x >= 1, "refine >= 1", "multiply L and N by this factor"),
        Param("T", _float("T"), 1.0, _positive, "T > 0", "temperature"),
        Param("t_min", _float("t_min"), 20.0, _positive, "t_min > 0", "fit window start"),
        Param("t_max", _float("t_max"), 100.0, _positive, "t_max > 0", "fit window end"),
        Param("points", _int("points"), 41, lambda x: x >= 2, "points >= 2", "sample times"),
        Param("method", _choice("method", ("toeplitz", "direct")), "toeplitz", help="double-sum route"),
        Param("omega_drive", _float_list("omega_drive"), [1.0, 3.0], _all_positive, "omega_drive > 0",
              "drive frequencies for check=transfer"),
        Param("probe_omega", _float("probe_omega"), 1.0, _positive, "probe_omega > 0", "probe carrier"),
        Param("probe_duration", _float("probe_duration"), 30.0, _positive, "probe_duration > 0", "probe length"),
    ],
    "xi-check": [
        Param("omega", _float_list("omega"), [1.0], _all_positive, "omega > 0", "lab frequency (units of a)"),
        Param("Omega", _float_list("Omega"), [1.0], _all_positive, "Omega > 0", "proper frequency (units of a)"),
        Param("a", _float("a"), 1.0, _positive, "a > 0", "proper acceleration"),
        Param("T_window", _float_list("T_window"), [8.0], _all_positive, "T_window > 0",
              "window half-length(s) in units of 1/a (method=window)"),
        Param("which", _choice("which", ("xi", "eta")), "xi", help="kernel"),
        Param("method", _choice("method", ("window", "ladder")), "window",
              help="finite window or full-line epsilon ladder"),
    ],
}

COLUMNS = {
    "planck-ode": ["omega", "n_numeric", "n_planck", "relative_error"],
    "balance": ["omega", "integrand_drag", "integrand_diffusion", "residual", "alpha_identity_residual"],
    "drag": ["v", "T", "form", "omega_max", "force", "estimated_error"],
    "diffusion": ["T", "rate", "estimated_error", "cutoff_used"],
    "rindler-spectrum": ["Omega", "w_gg_dag", "w_g_dag_g", "kms_ratio", "gamma_identity_residual"],
    "rindler-diffusion": ["a", "T_DU", "route_a", "route_b", "relative_difference"],
    "oracle-variance": ["t", "variance"],
    "xi-check": ["omega", "Omega", "T_window", "re_numeric", "im_numeric", "re_closed", "im_closed",
                 "deviation", "phase_error"],
}
ALT_COLUMNS = {
    ("oracle-variance", "rr"): ["L", "N", "deviation"],
    ("oracle-variance", "transfer"): ["omega_drive", "re_amplitude", "im_amplitude", "re_expected",
                                      "im_expected", "deviation"],
}


def read_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file. ``#`` starts a comment; blank lines are ignored."""
    out = {}
    with open(Path(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


@dataclass
class RunConfig:
    scenario: str
    params: dict
    output_path: Path
    format: str = "csv"
    seed: int = 0
    extra: dict = field(default_factory=dict)


def resolve_params(scenario: str, file_values: dict, flag_values: dict) -> dict:
    """Merge defaults, config-file values and flags, then validate."""
    specs = {p.name: p for p in SCENARIOS[scenario] + _COMMON}
    unknown = sorted(set(file_values) - set(specs) - {"format", "out", "seed"})
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {scenario}: {', '.join(unknown)}")
    params = {}
    for name, spec in specs.items():
        raw = flag_values.get(name)
        if raw is None:
            raw = file_values.get(name)
        value = spec.default if raw is None else spec.convert(raw)
        if value is not None and spec.check is not None and not spec.check(value):
            raise ConfigError(f"{name} violates {spec.bound} (got {raw if raw is not None else value})")
        params[name] = value
    return params


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def _osc(params) -> OscillatorParams:
    return OscillatorParams.from_damping(params["beta"])


def _g(x) -> str:
    return format(x, ".6g")


def _run_planck_ode(P):
    T = P["T"]
    ref = P["omega_ref"] if P["omega_ref"] is not None else T
    curve = recover_planck(T, ref, span=P["span"], n_samples=P["samples"])
    exact = planck_occupation(curve.x, T)
    err = np.abs(curve.y / exact - 1.0)
    rows = [
        {"omega": float(w), "n_numeric": float(n), "n_planck": float(e), "relative_error": float(r)}
        for w, n, e, r in zip(curve.x, curve.y, exact, err)
    ]
    return rows, f"planck-ode T={_g(T)} omega_ref={_g(ref)} max_relative_error={float(err.max()):.3e}"


def _run_balance(P):
    p = _osc(P)
    T = P["T"]
    res = balance_residual(T, p)
    omegas = np.geomspace(P["omega_min"], P["omega_max"], P["samples"])
    rows = integrand_table(T, P["v"], p, omegas)
    ident = alpha_identity_residual(omegas, p)
    for row, r in zip(rows, np.atleast_1d(ident)):
        row["alpha_identity_residual"] = float(r)
    summary = (
        f"balance T={_g(T)} pointwise_max={res.pointwise_max:.3e} "
        f"integrated_relative={res.integrated_relative:.3e}"
    )
    return rows, summary


def _run_drag(P):
    p = _osc(P)
    form, T = P["form"], P["T"]
    rows = []
    if form == "coth_total":
        r = RindlerParams(P["a"])
        if P["policy"] == "adaptive":
            # no cutoff: the adaptive tail detects the log divergence
            quad_semi_infinite(coth_integrand(r, p), QuadratureSpec(), points=(p.omega0,))
        if not P["omega_max"]:
            raise CutoffRequired("coth_total needs omega_max (one or more cutoffs)")
        for wmax in P["omega_max"]:
            res = rindler_drag(0.0, r, p, QuadratureSpec().with_cutoff(wmax), form="coth_total")
            rows.append({"v": 0.0, "T": r.T_DU, "form": form, "omega_max": wmax,
                         "force": res.value, "estimated_error": res.estimated_error})
        values = [row["force"] for row in rows]
        summary = f"drag form=coth_total a={_g(P['a'])} force={_g(values[-1])}"
        if len(values) >= 3:
            inc = np.diff(values)
            summary += f" increment_ratio={_g(inc[-1] / inc[-2])}"
        return rows, summary
    for v in P["v"]:
        if form == "qed3d":
            if T <= 0:
                raise ConfigError("form=qed3d requires T > 0")
            res = drag_force_qed3d(v, T, p)
        elif form == "net_linearized":
            res = rindler_drag(v, RindlerParams(P["a"]), p, form="net_linearized")
            T = P["a"] / (2 * math.pi)
        else:
            res = drag_force(v, PlanckOccupation(T), p, form=form)
        rows.append({"v": v, "T": T, "form": form, "omega_max": math.inf,
                     "force": res.value, "estimated_error": res.estimated_error})
    forces = " ".join(_g(r["force"]) for r in rows)
    return rows, f"drag form={form} T={_g(T)} force={forces}"


def _run_diffusion(P):
    p = _osc(P)
    res = diffusion_rate(PlanckOccupation(P["T"]), p)
    row = {"T": P["T"], "rate": res.value, "estimated_error": res.estimated_error, "cutoff_used": res.cutoff_used}
    return [row], f"diffusion T={_g(P['T'])} rate={_g(res.value)}"


def _run_rindler_spectrum(P):
    r = RindlerParams(P["a"])
    Om = P["a"] * np.linspace(P["Omega_min"], P["Omega_max"], P["samples"])
    rows = spectrum_table(r, Om)
    worst = max(abs(row["gamma_identity_residual"]) for row in rows)
    kms = max(abs(row["kms_ratio"] / math.exp(row["Omega"] / r.T_DU) - 1) for row in rows)
    return rows, f"rindler-spectrum a={_g(P['a'])} max_gamma_identity_residual={worst:.3e} max_kms_error={kms:.3e}"


def _run_rindler_diffusion(P):
    p = _osc(P)
    rows = []
    for a in P["a"]:
        r = RindlerParams(a)
        d = rindler_diffusion_rate(r, p)
        rows.append({"a": a, "T_DU": r.T_DU, "route_a": d.route_a.value, "route_b": d.route_b.value,
                     "relative_difference": d.relative_difference})
    worst = max(row["relative_difference"] for row in rows)
    return rows, f"rindler-diffusion max_relative_difference={worst:.3e}"


def _grid(P, default: ModeGrid) -> ModeGrid:
    L = P["L"] if P["L"] is not None else default.L
    N = P["N"] if P["N"] is not None else default.N
    return ModeGrid(L * P["refine"], N * P["refine"])


def _run_oracle(P):
    p = _osc(P)
    check = P["check"]
    if check == "rr":
        grid = _grid(P, DEFAULT_RR_GRID)
        dev = rr_kernel_check(grid, HannTone(P["probe_omega"], P["probe_duration"]), p)
        return [{"L": grid.L, "N": grid.N, "deviation": dev}], (
            f"oracle-variance check=rr L={_g(grid.L)} N={grid.N} deviation={dev:.3e}"
        )
    if check == "transfer":
        grid = _grid(P, DEFAULT_RR_GRID)
        rows = []
        for wd in P["omega_drive"]:
            if not grid.spacing <= wd <= grid.omega_max:
                raise ConfigError(f"omega_drive violates grid range [{grid.spacing}, {grid.omega_max}] (got {wd})")
            resp = driven_response(p, wd, math.sqrt(2 * math.pi / (wd * grid.L)))
            rows.append({"omega_drive": wd, "re_amplitude": resp.amplitude.real, "im_amplitude": resp.amplitude.imag,
                         "re_expected": resp.expected.real, "im_expected": resp.expected.imag,
                         "deviation": resp.deviation})
        worst = max(r["deviation"] for r in rows)
        return rows, f"oracle-variance check=transfer max_deviation={worst:.3e}"
    if not P["t_min"] < P["t_max"]:
        raise ConfigError("t_min violates t_min < t_max")
    grid = _grid(P, DEFAULT_VARIANCE_GRID)
    occ = PlanckOccupation(P["T"])
    curve = variance_curve(grid, occ, p, (P["t_min"], P["t_max"]), P["points"], method=P["method"])
    rate = diffusion_rate(occ, p).value
    rows = curve.rows()
    summary = (
        f"oracle-variance L={_g(grid.L)} N={grid.N} T={_g(P['T'])} slope={_g(curve.fitted_slope)} "
        f"continuum={_g(rate)} relative_difference={abs(curve.fitted_slope / rate - 1):.3e}"
    )
    return rows, summary


def _run_xi(P):
    r = RindlerParams(P["a"])
    a = P["a"]
    rows = []
    for wo in P["omega"]:
        for Wo in P["Omega"]:
            closed = xi_eta_closed_form(wo * a, Wo * a, r, P["which"])
            if P["method"] == "ladder":
                windows = [math.inf]
                numerics = [oscillatory_phase_integral(wo * a, Wo * a, a, 1 if P["which"] == "xi" else -1)]
            else:
                windows = P["T_window"]
                numerics = [windowed_xi_check(wo * a, Wo * a, r, T / a, which=P["which"])[0] for T in windows]
            for T, num in zip(windows, numerics):
                rows.append({
                    "omega": wo * a, "Omega": Wo * a, "T_window": T,
                    "re_numeric": num.real, "im_numeric": num.imag,
                    "re_closed": closed.real, "im_closed": closed.imag,
                    "deviation": abs(num - closed) / abs(closed),
                    "phase_error": float(np.angle(num / closed)),
                })
    worst = max(row["deviation"] for row in rows)
    return rows, f"xi-check which={P['which']} method={P['method']} max_deviation={worst:.3e}"


RUNNERS = {
    "planck-ode": _run_planck_ode,
    "balance": _run_balance,
    "drag": _run_drag,
    "diffusion": _run_diffusion,
    "rindler-spectrum": _run_rindler_spectrum,
    "rindler-diffusion": _run_rindler_diffusion,
    "oracle-variance": _run_oracle,
    "xi-check": _run_xi,
}


def run_scenario(cfg: RunConfig, stdout=None) -> int:
    """Compute the scenario, write its table and print a one-line summary."""
    stdout = stdout or sys.stdout
    rows, summary = RUNNERS[cfg.scenario](cfg.params)
    columns = ALT_COLUMNS.get((cfg.scenario, cfg.params.get("check")), COLUMNS[cfg.scenario])
    write_table(rows, cfg.format, cfg.output_path, columns)
    print(f"{summary} -> {cfg.output_path}", file=stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_HBAR = 1.054571817e-34  # J s
_KB = 1.380649e-23  # J/K
_C = 299792458.0  # m/s


def unit_report(omega0_si: float) -> str:
    """How to turn the dimensionless outputs into SI for a given resonance (rad/s)."""
    w = omega0_si
    lines = [
        f"natural units: hbar = c = k_B = 1, omega0 = 1 <-> {w:.6g} rad/s",
        f"  frequency      x {w:.6g} rad/s",
        f"  time           x {1 / w:.6g} s",
        f"  length         x {_C / w:.6g} m",
        f"  energy         x {_HBAR * w:.6g} J",
        f"  temperature    x {_HBAR * w / _KB:.6g} K",
        f"  acceleration   x {_C * w:.6g} m/s^2",
        f"  momentum       x {_HBAR * w / _C:.6g} kg m/s",
        f"  force          x {_HBAR * w * w / _C:.6g} N",
        f"  diffusion rate x {(_HBAR * w / _C) ** 2 * w:.6g} kg^2 m^2/s^3",
    ]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qedfriction",
        description="Thermal and acceleration-induced friction of a polarizable particle (natural units).",
    )
    parser.add_argument(
        "--unit-report", nargs="?", const=1e15, type=float, metavar="OMEGA0_RAD_PER_S",
        help="print SI conversion factors (default omega0 = 1e15 rad/s)",
    )
    sub = parser.add_subparsers(dest="scenario")
    for name, params in SCENARIOS.items():
        sp = sub.add_parser(name, help=f"run the {name} scenario")
        sp.add_argument("--config", help="flat key = value parameter file")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--format", choices=FORMATS, default=None)
        sp.add_argument("--seed", type=int, default=None, help="reserved; every scenario is deterministic")
        for p in params + _COMMON:
            bound = f" ({p.bound})" if p.bound else ""
            default = f" [default {p.default}]" if p.default is not None else ""
            sp.add_argument(f"--{p.name}", dest=p.name, default=None, help=f"{p.help}{bound}{default}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.unit_report is not None:
        print(unit_report(args.unit_report))
        if args.scenario is None:
            return EXIT_OK
    if args.scenario is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    scenario = args.scenario
    try:
        file_values = read_config(args.config) if args.config else {}
    except OSError as exc:
        print(f"OSError: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    flags = {p.name: getattr(args, p.name) for p in SCENARIOS[scenario] + _COMMON}
    try:
        params = resolve_params(scenario, file_values, flags)
        fmt = args.format or file_values.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        out = args.out or file_values.get("out")
        if out is None:
            out = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{scenario}.{fmt}"
        seed = args.seed if args.seed is not None else int(file_values.get("seed", 0))
        cfg = RunConfig(scenario, params, Path(out), fmt, seed)
        return run_scenario(cfg)
    except (ConfigError, CutoffRequired, GridTooCoarse) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
