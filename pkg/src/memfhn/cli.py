"""Command-line entry points.

Subcommands: constants | simulate | verify | reproduce-paper | plot.
Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
Diagnostics go to stderr; results go to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .io import read_metrics_csv, write_metrics_csv, write_snapshot
from .metrics import asynchronous_degree_estimate
from .repro import RATE_WINDOW, SAMPLE_POINT, ReproductionResult, run_reproduction
from .simulate import SimulationDiverged, integrate
from .svgplot import render_plot_svg
from .theory import threshold_report
from .verification import run_verification_suite

__all__ = ["main"]


def _eprint(*parts) -> None:
    print(*parts, file=sys.stderr)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def cmd_constants(args) -> int:
    doc = load_config(args.config)
    report = threshold_report(doc.theory_params(), doc.bounds, doc.c_star, doc.conventions)
    c = report.constants
    conv = c.conventions
    rows = [
        ("C1", c.C1),
        ("C2", c.C2),
        ("mu", c.mu),
        ("K", c.K),
        ("1+Q", 1.0 + c.Q),
        ("Gamma", c.Gamma),
        ("alpha(P)", c.alpha),
    ]
    print("closed-form constants")
    for name, value in rows:
        print(f"  {name:<9} {value:.10g}")
    print("inputs")
    print(f"  C*        {c.C_star:.10g}")
    print(f"  theory k  {doc.theory_k:.10g}   (simulation k = {doc.params.k:.10g})")
    print(f"  ||phi||^2 {conv.phi_norm_sq:.10g}")
    print(f"  |Omega|_K {conv.omega_measure_K:.10g}")
    print(f"  |Omega|_Q {conv.omega_measure_Q:.10g}")
    print(f"verdict: {report.verdict} (P = {report.P:g}, Gamma = {c.Gamma:.6g})")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "constants.csv"
        lines = ["name,value"] + [f"{name},{_fmt(value)}" for name, value in rows]
        path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
        print(f"wrote {path}")
    return 0


def cmd_simulate(args) -> int:
    doc = load_config(args.config)
    cfg = doc.run_config(seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    snap_dir = out / doc.snapshots_dir
    if cfg.snapshot_every:
        snap_dir.mkdir(parents=True, exist_ok=True)

    def on_snapshot(step: int, state) -> None:
        write_snapshot(state, snap_dir / f"snapshot_{step:06d}.bin")

    try:
        final, series = integrate(cfg, on_snapshot=on_snapshot)
    except SimulationDiverged as exc:
        if exc.partial_series is not None:
            path = out / doc.metrics_csv
            write_metrics_csv(exc.partial_series, path)
            _eprint(f"wrote partial metrics to {path}")
        _eprint(f"simulation diverged: {exc}")
        return 1

    csv_path = out / doc.metrics_csv
    write_metrics_csv(series, csv_path)
    degree = asynchronous_degree_estimate(series, args.tail_fraction)
    print(f"steps            {cfg.n_steps}  (dt = {cfg.dt:g}, t_end = {final.t:g})")
    print(f"neurons          {cfg.params.m} on {cfg.grid.nx}x{cfg.grid.ny}, seed {cfg.seed}")
    print(f"final energy     {series.total_energy[-1]:.10g}")
    print(f"async degree     {degree:.10g}  (finite-horizon surrogate, "
          f"tail fraction {args.tail_fraction:g})")
    print(f"wrote {csv_path}")
    if cfg.snapshot_every:
        print(f"wrote snapshots to {snap_dir}")
    return 0


def cmd_verify(args) -> int:
    results = run_verification_suite()
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag}  {res.name:<22} {res.detail}")
        failed += 0 if res.passed else 1
    if failed:
        _eprint(f"{failed} of {len(results)} checks failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def _print_reproduction(result: ReproductionResult) -> None:
    print("constants (computed vs published)")
    print(f"  {'name':<7} {'computed':>16} {'published':>12} {'rel.err':>10}  ok")
    for cmp in result.comparisons:
        print(f"  {cmp.name:<7} {cmp.computed:>16.8g} {cmp.published:>12.8g} "
              f"{cmp.rel_error:>10.2e}  {'yes' if cmp.ok else 'NO'}")
    doc = result.config
    conv = doc.conventions
    print("conventions")
    print(f"  theory k = {doc.theory_k:g} (back-solved from published C2); "
          f"simulation k = {doc.params.k:g} (fitted to published point samples)")
    print(f"  ||phi||^2 = {conv.phi_norm_sq:g}, |Omega|_K = {conv.omega_measure_K:g}, "
          f"|Omega|_Q = {conv.omega_measure_Q:g}, C* = {doc.c_star:g}")
    print(f"verdict: {result.threshold.verdict} (P = {result.threshold.P:g} vs "
          f"Gamma = {result.threshold.constants.Gamma:.4g})")

    ix, iy = SAMPLE_POINT
    for field in ("u", "w", "rho"):
        s = result.samples[field]
        print(f"{field} at grid point ({ix}, {iy})")
        print(f"  {'neuron':<7} {'initial':>22} {'final':>22}")
        for n, (first, last) in enumerate(zip(s.initial, s.final), start=1):
            print(f"  {n:<7} {first:>22.17g} {last:>22.17g}")
        print(f"  spread {s.initial_spread:.6g} -> {s.final_spread:.6g}"
              + (f"  (shrink {s.initial_spread / s.final_spread:.1f}x)"
                 if s.final_spread else ""))

    print("checks")
    for name, ok in result.checks.items():
        print(f"  {'PASS' if ok else 'FAIL'}  {name}")
    print(f"envelope worst margin {result.envelope.worst_margin:.4g} "
          f"(slack {result.envelope.slack:g}), fitted decay rate "
          f"{result.fitted_rate:.4g} over t in {RATE_WINDOW}")
    print(f"elapsed {result.elapsed_seconds:.1f} s")
    for path in result.out_files:
        print(f"wrote {path}")


def cmd_reproduce_paper(args) -> int:
    result = run_reproduction(args.out, seed=args.seed)
    _print_reproduction(result)
    if not result.all_ok:
        _eprint("reproduction checks failed")
        return 1
    return 0


def cmd_plot(args) -> int:
    series = read_metrics_csv(args.csv)
    columns = [c for c in (args.columns or "").split(",") if c]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "plot.svg"
    render_plot_svg(series, columns, path, log_y=args.log_y)
    print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memfhn",
        description="Coupled memristive FitzHugh-Nagumo network simulator and "
                    "synchronization-threshold calculator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="evaluate the closed-form constants for a config")
    p.add_argument("--config", required=True, help="JSON configuration path")
    p.add_argument("--out", default=None, help="also write constants.csv here")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("simulate", help="run a configured network simulation")
    p.add_argument("--config", required=True, help="JSON configuration path")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--tail-fraction", type=float, default=0.2,
                   help="tail fraction for the asynchronous-degree surrogate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the independent oracle checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce-paper",
                       help="run the published reference configuration and compare")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the bundled seed")
    p.set_defaults(func=cmd_reproduce_paper)

    p = sub.add_parser("plot", help="render an SVG chart from a metrics CSV")
    p.add_argument("csv", help="metrics CSV produced by simulate/reproduce-paper")
    p.add_argument("--columns", required=True,
                   help="comma-separated column names to draw")
    p.add_argument("--log-y", action="store_true", help="logarithmic y axis")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.errors:
            _eprint(f"config error: {problem}")
        return 2
    except FileNotFoundError as exc:
        _eprint(f"error: {exc}")
        return 2
    except (KeyError, ValueError) as exc:
        _eprint(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
