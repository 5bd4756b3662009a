"""Command-line front end: run cooling traces and engine sweeps, emit CSV.

Subcommands: ``ppa``, ``four-stroke``, ``two-stroke``.  Frequencies are
accepted in MHz (units of omega/2pi) and converted to rad/s once here;
all physics below this layer is SI.  Exit status: 0 on success, 2 on
configuration errors, 3 on numerical-invariant violations.
"""

from __future__ import annotations

import argparse
import math
import sys as _sys
from dataclasses import dataclass
from pathlib import Path

from . import engines, hbac, reports
from .adiabatic import COMPRESSION, StrokeSpec
from .qmath import StateInvariantError
from .spinsys import ConfigError, Role, SpinSystem, load_system, thermal_state

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of one CLI invocation."""

    command: str
    system_source: str
    rounds: tuple[int, ...]
    field_scale: float | None = None
    omega_s_mhz: tuple[float, ...] | None = None
    tau: float | None = None
    dt: float | None = None
    out: Path | None = None
    output_format: str = "csv"

    def canonical_lines(self) -> list[str]:
        """Deterministic description of the run, used for the config hash."""
        lines = [
            f"command={self.command}",
            f"system={self.system_source}",
            f"rounds={','.join(str(n) for n in self.rounds)}",
        ]
        if self.field_scale is not None:
            lines.append(f"field_scale={reports.fmt(self.field_scale)}")
        if self.omega_s_mhz is not None:
            lines.append(
                "omega_s_mhz=" + ",".join(reports.fmt(w) for w in self.omega_s_mhz)
            )
        if self.tau is not None:
            lines.append(f"tau={reports.fmt(self.tau)}")
        if self.dt is not None:
            lines.append(f"dt={reports.fmt(self.dt)}")
        return lines


def _parse_rounds(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            first, last = text.split("..", 1)
            lo, hi = int(first), int(last)
            if lo > hi:
                raise ValueError
            values = tuple(range(lo, hi + 1))
        else:
            values = (int(text),)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"rounds must be an integer or a..b range, got {text!r}"
        ) from None
    if values[0] < 0:
        raise argparse.ArgumentTypeError("round counts must be >= 0")
    return values


def _parse_omega_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"omega grid must be start:stop:step in MHz, got {text!r}"
        )
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"omega grid values must be numbers: {text!r}") from None
    if start <= 0 or step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(
            "omega grid needs start > 0, step > 0, stop >= start"
        )
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def _parse_positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinotto",
        description="Quantum Otto engines with heat-bath algorithmic cooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, default_out: str) -> None:
        p.add_argument(
            "--system",
            default="tce",
            help="preset name (tce) or path to an INI system definition",
        )
        p.add_argument("--out", type=Path, default=Path(default_out), help="CSV output path")
        p.add_argument(
            "--format",
            choices=("csv", "summary"),
            default="csv",
            dest="output_format",
            help="csv writes a file and prints a summary; summary prints only",
        )

    p_ppa = sub.add_parser("ppa", help="run the cooling algorithm and trace per-round telemetry")
    p_ppa.add_argument("--rounds", "-n", type=_parse_rounds, default=(7,))
    p_ppa.add_argument(
        "--field-scale",
        type=_parse_positive,
        default=0.5,
        help="static-field scale during cooling (0.5 = compressed field)",
    )
    add_common(p_ppa, "ppa_trace.csv")

    p_four = sub.add_parser("four-stroke", help="sweep the four-stroke engine over round counts")
    p_four.add_argument("--rounds", "-n", type=_parse_rounds, default=tuple(range(11)))
    p_four.add_argument("--tau", type=_parse_positive, default=0.1, help="drive period in seconds")
    p_four.add_argument("--dt", type=_parse_positive, default=None, help="integrator step in seconds")
    add_common(p_four, "four_stroke_sweep.csv")

    p_two = sub.add_parser("two-stroke", help="sweep the two-stroke engine over partner frequencies")
    p_two.add_argument("--rounds", "-n", type=_parse_rounds, default=tuple(range(1, 9)))
    p_two.add_argument(
        "--omega-s",
        type=_parse_omega_grid,
        default=None,
        help="partner frequency grid start:stop:step in MHz (default 150:1000:1)",
    )
    add_common(p_two, "two_stroke_sweep.csv")

    return parser


def _emit(config: RunConfig, text: str, summary: str) -> None:
    if config.output_format == "csv":
        assert config.out is not None
        reports.write_atomic(config.out, text)
        print(f"wrote {config.out}")
    print(summary)


def _cmd_ppa(config: RunConfig, system: SpinSystem) -> int:
    if len(config.rounds) != 1:
        raise ConfigError("ppa takes a single round count, not a range")
    n_rounds = config.rounds[0]
    field_scale = config.field_scale if config.field_scale is not None else 0.5
    rho = thermal_state(system, field_scale)
    trace = hbac.run_ppa(rho, system, field_scale, n_rounds)

    bound = hbac.shannon_bound(system, field_scale)
    crossing = next(
        (
            r.round_index
            for r in trace.rounds
            if r.target_polarization > bound * (1.0 + 1e-6)
        ),
        None,
    )
    final = trace.final_record
    summary = (
        f"ppa rounds={n_rounds} field_scale={field_scale:g}: "
        f"final eps_target={final.target_polarization:.6e} "
        f"T_eff={final.target_effective_temperature:.3f} K "
        f"shannon_crossing_round={'-' if crossing is None else crossing}"
    )
    text = reports.render_ppa_csv(trace, system, field_scale, config.canonical_lines())
    _emit(config, text, summary)
    return EXIT_OK


def _cmd_four_stroke(config: RunConfig, system: SpinSystem) -> int:
    stroke = StrokeSpec(COMPRESSION, tau=config.tau or 0.1, dt=config.dt)
    table = engines.sweep_four_stroke(system, config.rounds, stroke)
    best = table.argmax_power()
    crossover = engines.isochoric_crossover(table)
    summary = (
        f"four-stroke max power at n={best.n_rounds}: "
        f"P={best.power:.6e} W/mol (W={best.net_work:.6e} J/mol, eta={best.efficiency:g}); "
        f"isochoric reference dominates from "
        f"{'-' if crossover is None else 'n=%d' % crossover}"
    )
    text = reports.render_four_stroke_csv(table, config.canonical_lines(), system)
    _emit(config, text, summary)
    return EXIT_OK


def _cmd_two_stroke(config: RunConfig, system: SpinSystem) -> int:
    grid_mhz = config.omega_s_mhz or _parse_omega_grid("150:1000:1")
    grid = [TWO_PI * 1e6 * w for w in grid_mhz]
    table = engines.sweep_two_stroke(system, grid, config.rounds)
    best = table.argmax_power()
    omega_t = system.omega(system.label_for_role(Role.TARGET), 1.0)
    lines = [
        f"two-stroke max power at omega_s={best.omega_s / TWO_PI / 1e6:.2f} MHz, "
        f"n={best.n_rounds}: P={best.power:.6e} W/mol "
        f"(W={best.net_work:.6e} J/mol, eta={best.efficiency:.4f})"
    ]
    for n in config.rounds:
        report = next(r for r in table.reports if r.n_rounds == n)
        low, high = engines.positive_work_window(
            omega_t, system.bath_temperature, report.cooled_target_temperature
        )
        lines.append(
            f"positive-work window n={n}: "
            f"({low / TWO_PI / 1e6:.2f}, {high / TWO_PI / 1e6:.2f}) MHz"
        )
    text = reports.render_two_stroke_csv(table, config.canonical_lines(), system)
    _emit(config, text, "\n".join(lines))
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        system_source=args.system,
        rounds=args.rounds,
        field_scale=getattr(args, "field_scale", None),
        omega_s_mhz=getattr(args, "omega_s", None),
        tau=getattr(args, "tau", None),
        dt=getattr(args, "dt", None),
        out=args.out,
        output_format=args.output_format,
    )
    try:
        system = load_system(config.system_source)
        if config.command == "ppa":
            return _cmd_ppa(config, system)
        if config.command == "four-stroke":
            return _cmd_four_stroke(config, system)
        return _cmd_two_stroke(config, system)
    except ConfigError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except StateInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
