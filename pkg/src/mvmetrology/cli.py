"""Command line surface: point reports, grid sweeps, figure data, self-checks.

All angles are radians. Flags override config-file values, which override the
built-in defaults. Exit codes: 0 success, 2 invalid configuration, 3 domain
error (e.g. postselection impossible), 4 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from .errors import MetrologyError, OrthogonalPostselection
from .fisher import (DerivativeConfig, measured_qfi, measured_qfi_halfspin,
                     measured_qfi_spinj, qfi_matrix_analytic, qfi_matrix_noisy)
from .protocol import NoiseParams, modular_value, postselect
from .spin import PointerSpec
from .sweep import (FIG_NAMES, ORACLE_STEP, RunConfig, SweepGrid, emit_figure,
                    format_number, sweep_table, write_csv)
from .verify import render_report, run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4

_FLOAT_KEYS = ("j", "theta", "phi", "omega", "t", "g", "nu")
_ALLOWED_KEYS = set(_FLOAT_KEYS) | {"grid", "out"}
_DEFAULTS = {
    "j": 0.5,
    "theta": math.pi / 2,
    "phi": math.pi / 2,
    "omega": 0.0,
    "t": 1.0,
    "g": math.pi / 2,
    "nu": None,
    "grid": "41x41",
    "out": "",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="plain-text 'key = value' config file")
    common.add_argument("--j", type=float, help="pointer spin (half-integer, default 0.5)")
    common.add_argument("--theta", type=float, help="pointer polar angle in radians")
    common.add_argument("--phi", type=float, help="postselection angle in radians")
    common.add_argument("--omega", type=float, help="field strength (default 0)")
    common.add_argument("--t", type=float, help="exposure time (default 1)")
    common.add_argument("--g", type=float, help="kick strength in radians (default pi/2)")
    common.add_argument("--nu", type=float, help="phase-flip probability in (0, 1)")
    common.add_argument("--grid", help="grid size as NxM (theta x phi points)")
    common.add_argument("--out", help="output CSV path")

    parser = argparse.ArgumentParser(
        prog="metrology",
        description="Modular-value metrology engine with spin coherent pointers")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("qfi", parents=[common],
                   help="point report: measured information, both routes, plus "
                        "the modular value and success probability")
    sub.add_parser("sweep", parents=[common],
                   help="full grid dump to CSV (theta-major rows)")
    fig = sub.add_parser("fig", parents=[common], help="emit figure-data CSV")
    fig.add_argument("which", choices=FIG_NAMES, help="which figure data to emit")
    sub.add_parser("verify", parents=[common],
                   help="run every cross-route invariant and report PASS/FAIL")
    return parser


def load_config_file(path: str) -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment; unknown keys error."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key or not value:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            if key not in _ALLOWED_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def parse_grid(text: str) -> SweepGrid:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"grid must look like NxM, got {text!r}")
    try:
        theta_points, phi_points = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValueError(f"grid must look like NxM, got {text!r}") from exc
    return SweepGrid(theta_points=theta_points, phi_points=phi_points)


def make_config(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}

    def pick(name: str):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_values:
            raw = file_values[name]
            return float(raw) if name in _FLOAT_KEYS else raw
        return _DEFAULTS[name]

    return RunConfig(
        j=pick("j"), theta=pick("theta"), phi=pick("phi"), omega=pick("omega"),
        t=pick("t"), g=pick("g"), nu=pick("nu"),
        grid=parse_grid(pick("grid")), out=pick("out"))


def _format_complex(z: complex) -> str:
    return f"{format_number(z.real)}{'+' if z.imag >= 0 else '-'}{format_number(abs(z.imag))}j"


def cmd_qfi(config: RunConfig) -> int:
    spec = PointerSpec(config.j, config.theta)
    params = config.protocol_params()
    cfg = DerivativeConfig(step=ORACLE_STEP)

    outcome = postselect(spec, params)
    if spec.two_j == 1:
        analytic = measured_qfi_halfspin(spec, params).value
    else:
        analytic = measured_qfi_spinj(spec, params).value
    oracle = measured_qfi(spec, params, cfg).value
    try:
        mv_text = _format_complex(modular_value(params))
    except OrthogonalPostselection:
        mv_text = "undefined (orthogonal postselection)"

    lines = [
        f"j = {config.j:g}  theta = {format_number(config.theta)}  "
        f"phi = {format_number(config.phi)}  omega = {format_number(config.omega)}  "
        f"t = {format_number(config.t)}  g = {format_number(config.g)}",
        f"p_success           = {format_number(outcome.p_success)}",
        f"modular value       = {mv_text}",
        f"Q_m analytic        = {format_number(analytic)}",
        f"Q_m oracle          = {format_number(oracle)}",
        f"|analytic - oracle| = {format_number(abs(analytic - oracle))}",
    ]
    if config.nu is not None:
        noise = NoiseParams(config.nu)
        h_oracle = qfi_matrix_noisy(spec, params, noise, cfg).value
        h_analytic = qfi_matrix_analytic(spec, params, noise).value
        gap = float(abs(h_oracle - h_analytic).max())
        lines += [
            f"nu = {format_number(config.nu)}",
            f"H analytic diag     = {format_number(h_analytic[0, 0])}, "
            f"{format_number(h_analytic[1, 1])}",
            f"H oracle (SLD) diag = {format_number(h_oracle[0, 0])}, "
            f"{format_number(h_oracle[1, 1])}",
            f"max |H difference|  = {format_number(gap)}",
        ]
    print("\n".join(lines))
    return EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    out = config.out or "sweep.csv"
    header, rows = sweep_table(config)
    write_csv(out, header, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_fig(which: str, config: RunConfig) -> int:
    out = config.out or f"{which}.csv"
    paths = emit_figure(which, config, out)
    print("wrote " + ", ".join(paths))
    return EXIT_OK


def cmd_verify() -> int:
    results = run_checks()
    print(render_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify()
        config = make_config(args)
        if args.command == "qfi":
            return cmd_qfi(config)
        if args.command == "sweep":
            return cmd_sweep(config)
        return cmd_fig(args.which, config)
    except MetrologyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def cli_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_entry()
