#!/usr/bin/env python3
"""
LV Spreading Toolkit - command line

Simulate the monostable Lotka-Volterra competition-diffusion system on
planar domains, measure spreading speeds from saved runs, compute minimal
wave speeds and eigenvalue thresholds, and run the preset experiments.

Usage:
1. Simulate a config:        lv-spread simulate exterior.yaml
2. Measure speeds of a run:  lv-spread speeds runs/exterior
3. Minimal wave speed:       lv-spread wavespeed --params a1=0.4,a2=2
4. Preset experiments:       lv-spread verify --all --quick

Exit codes: 0 success, 1 a criterion or numerical failure, 2 a usage or
configuration error.
"""

import argparse
import csv
import inspect
import logging
import os
import sys
from pathlib import Path

import yaml

from helper import ensure_env_setup, get_settings, save_env_vars
from helper.config import cross_validate, load_config, parse_domain
from helper.formats import load_run, write_rows_csv, write_run
from helper.preset_call import available_presets, list_presets, run_preset
from spreading.analysis import (
    CONSTRUCTIONS,
    SampleSpec,
    ball_eigenpair,
    eigenvalue_curve,
    min_R0_for_epsilon,
    rayleigh_eigenvalue,
    rayleigh_radius_for_bound,
    supersolution_residual,
)
from spreading.domain import GENERATORS, build_mask, interior_ball_radius
from spreading.errors import ConfigError, ParameterError, RegimeMismatchError, SpreadingError
from spreading.params import FIELDS, KineticParams, linear_speed
from spreading.solver import evolve
from spreading.speeds import speed_matrix
from spreading.storage import (
    read_descriptor,
    read_mask_binary,
    read_mask_text,
    write_descriptor,
    write_mask_binary,
    write_mask_text,
)
from spreading.waves import random_parameter_sweep, sweep_wave_speeds, wave_speed_report

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

BESSEL_J01 = 2.404825557695773

DEFAULT_PARAMS = {"d1": 1.0, "d2": 1.0, "r1": 1.0, "r2": 1.0, "a1": 0.5, "a2": 1.5}

logger = logging.getLogger("lv-spread")


# ---------------------------------------------------------------------------
# argument helpers


def point(text: str):
    """argparse type for 'x,y'."""
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got '{text}'") from None
    return (x, y)


def key_value(text: str):
    """argparse type for KEY=VALUE; the value is read as YAML so lists and numbers come through typed."""
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got '{text}'")
    key, value = text.split("=", 1)
    return key.strip(), yaml.safe_load(value)


def parse_params(text: str = None, config_path: str = None) -> KineticParams:
    """Parameters from a config file, a 'd1=1,a2=2' list over the defaults, or the defaults."""
    if config_path:
        return load_config(config_path).params
    values = dict(DEFAULT_PARAMS)
    for pair in filter(None, (text or "").split(",")):
        if "=" not in pair:
            raise ParameterError(f"expected KEY=VALUE in --params, got '{pair}'")
        key, value = key_value(pair)
        if key not in FIELDS:
            raise ParameterError(f"unknown parameter '{key}', expected one of {', '.join(FIELDS)}")
        values[key] = value
    return KineticParams.from_dict(values)


def read_params_csv(path) -> list:
    with open(path, newline="") as f:
        return [KineticParams.from_dict({k: float(row[k]) for k in FIELDS}) for row in csv.DictReader(f)]


def add_params_arguments(parser):
    parser.add_argument('--params', help='Comma-separated overrides of the defaults, e.g. d2=3,a2=2')
    parser.add_argument('--config', help='Take the params block of an experiment config instead')


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    run_dir = Path(args.output) if args.output else Path(config.output.dir) / Path(args.config).stem
    if args.no_snapshots:
        config.output.snapshots = False
    mask = config.build_mask()
    radii = cross_validate(config, mask)
    print(f"🧮 Simulating {config.domain['generator']} on {mask.nx}x{mask.ny} cells "
          f"({mask.inside_count} inside), horizon {config.solver.horizon:g}")
    for label, R in radii.items():
        print(f"   R(e, {label}) = {R:.4g}")
    run = evolve(config.initial_condition(mask), mask, config.params, config.solver, probes=config.probes(),
                 output_dir=run_dir if config.output.snapshots else None, keep_in_memory=False)
    manifest = write_run(run, config, run_dir)
    print(f"✅ {run.steps} steps, dt = {run.dt:.4g}, {len(run.times)} snapshots in {run.wall_time:.1f}s")
    for side, t in run.edge_contacts.items():
        print(f"⚠️  Activity reached the {side} truncation band at t = {t:g}")
    print(f"💾 Run saved to: {manifest.parent}")
    return EXIT_OK


def cmd_speeds(args) -> int:
    run = load_run(args.run_dir)
    config = load_config(Path(args.run_dir) / "config.yaml")
    m = config.measurement
    e = args.e or m.e
    anchors = args.anchor or m.anchors
    A_list = args.A or m.A_list
    epsilon = args.epsilon if args.epsilon is not None else m.epsilon
    if not anchors:
        raise ConfigError("measurement.anchors", "no anchors in the run config or on the command line")
    if not A_list:
        raise ConfigError("measurement.A_list", "no tube radii in the run config or on the command line")
    print(f"📏 Measuring speeds of {args.run_dir} along e = ({e[0]:g}, {e[1]:g}), epsilon = {epsilon:g}")
    matrix = speed_matrix(run, e, anchors, A_list, epsilon=epsilon, tau_fraction=m.tau_fraction,
                          window_fraction=m.window_fraction, n_windows=m.n_windows,
                          workers=int(os.getenv("LVS_WORKERS", "1")))
    out = Path(args.output) if args.output else Path(args.run_dir) / f"speeds_eps{epsilon:g}"
    out.mkdir(parents=True, exist_ok=True)
    matrix.to_csv(out / "matrix.csv")
    matrix.to_json(out / "estimates.json")
    for k, trace in enumerate(matrix.traces):
        name = "global" if trace.anchor is None else f"z{k:02d}_A{trace.A:g}"
        trace.to_csv(out / f"trace_{name}.csv")
    print(f"\n{'tube':<24}{'A':>8}{'w_upper':>12}{'w_lower':>12}  trend")
    for row in [matrix.global_row] + matrix.rows:
        est = row.estimate
        label = "global" if row.anchor is None else f"z=({row.anchor[0]:g},{row.anchor[1]:g})"
        print(f"{label:<24}{row.A:>8g}{est.w_upper:>12.4f}{est.w_lower:>12.4f}  {est.trend}"
              f"{'  stalled' if est.stalled else ''}{'' if row.chain_ok else '  chain violated'}")
    print(f"\n💾 Estimates saved to: {out}")
    if not matrix.chain_ok:
        print("❌ The speed chain w_lower(global) <= w_lower(z) <= w_upper(z) <= w_upper(global) does not hold")
        return EXIT_FAILURE
    print("✅ Speed chain holds")
    return EXIT_OK


def cmd_wavespeed(args) -> int:
    p = parse_params(args.params, args.config)
    print(f"🌊 Minimal wave speed for {p.to_dict()}")
    report = wave_speed_report(p, tol=args.tol, window=args.window)
    print(f"✅ c* = {report.c_star:.6f} in [{report.bracket[0]:.6f}, {report.bracket[1]:.6f}]")
    print(f"   linear speed 2 sqrt(d1 r1 (1 - a1)) = {report.linear_speed:.6f}")
    if args.output:
        print(f"💾 Report saved to: {report.to_json(args.output)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = read_params_csv(args.file) if args.file else random_parameter_sweep(args.n, args.seed)
    print(f"🌊 Wave-speed sweep over {len(params)} parameter sets")
    rows = sweep_wave_speeds(params, tol=args.tol, workers=int(os.getenv("LVS_WORKERS", "1")))
    path = write_rows_csv(rows, args.output)
    failed = [row for row in rows if row["bound_check"] != "pass"]
    print(f"💾 Rows saved to: {path}")
    if failed:
        print(f"❌ {len(failed)} of {len(rows)} sets failed the bracket check")
        return EXIT_FAILURE
    print(f"✅ All {len(rows)} sets within the Kan-on bounds")
    return EXIT_OK


def cmd_eigen(args) -> int:
    if args.eigen_command == "disk":
        pair = ball_eigenpair(args.R, args.h, d1=args.d1)
        exact = args.d1 * (BESSEL_J01 / args.R) ** 2
        print(f"✅ lambda = {pair.eigenvalue:.8f} (Bessel {exact:.8f}, relative error "
              f"{abs(pair.eigenvalue - exact) / exact:.2e}, {pair.iterations} iterations)")
    elif args.eigen_command == "curve":
        curve = eigenvalue_curve(args.R, h_per_radius=args.h_per_radius, d1=args.d1)
        for R, lam in curve.rows:
            print(f"   R = {R:<8g} lambda = {lam:.8f}")
        print(f"✅ decreasing: {curve.decreasing}, lambda R^2 spread {curve.scaling_error:.2e}")
        if args.output:
            print(f"💾 Curve saved to: {curve.to_csv(args.output)}")
    elif args.eigen_command == "r0":
        p = parse_params(args.params, args.config)
        R0 = min_R0_for_epsilon(p, args.epsilon, h_per_radius=args.h_per_radius)
        print(f"✅ R0({args.epsilon:g}) = {R0:.6f} for linear speed {linear_speed(p):.6f}")
    else:
        config = load_config(args.config)
        mask = config.build_mask()
        if args.r is not None:
            value = rayleigh_eigenvalue(mask, args.z, args.r)
            print(f"✅ lambda(z = {args.z}, r = {args.r:g}) = {value:.8f}")
        else:
            R = rayleigh_radius_for_bound(mask, args.z, config.params)
            print(f"✅ smallest R with lambda(z, 2R) <= r1 (1 - a1) / (2 d1): {R:.6f}")
    return EXIT_OK


def cmd_residual(args) -> int:
    p = parse_params(args.params, args.config)
    overrides = dict(args.set or [])
    unknown = set(overrides) - set(inspect.signature(SampleSpec).parameters)
    if unknown:
        raise ConfigError("residual.sample", f"unknown sample fields {', '.join(sorted(unknown))}")
    spec = SampleSpec(**overrides)
    residual = supersolution_residual(args.construction, p, spec, enforce_regime=not args.no_enforce)
    print(f"🔬 {args.construction}: min residual {residual.min_value:.3e} over {residual.L1.size} samples"
          f" ({residual.skipped} skipped at branch switches)")
    print(f"   at {residual.argmin}")
    if args.output:
        print(f"💾 Residual saved to: {residual.to_json(args.output)}")
    if not residual.passed:
        print("❌ Residual is negative")
        return EXIT_FAILURE
    print("✅ Residual is nonnegative")
    return EXIT_OK


def cmd_domains(args) -> int:
    if args.domains_command == "list":
        print("🗺️  Domain generators:")
        for name, fn in GENERATORS.items():
            print(f"   {name}{inspect.signature(fn)}")
        return EXIT_OK
    if args.domains_command == "export":
        tree = dict(args.arg or [])
        tree["generator"] = args.generator
        domain = parse_domain(tree)
        mask = build_mask(domain.pop("generator"), **domain)
        prefix = Path(args.output)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        if args.format in ("binary", "both"):
            write_mask_binary(prefix.with_suffix(".frlm"), mask)
        if args.format in ("text", "both"):
            write_mask_text(prefix.with_suffix(".txt"), mask)
        write_descriptor(prefix.with_suffix(".json"), mask)
        print(f"✅ {args.generator}: {mask.nx}x{mask.ny} cells, {mask.inside_count} inside")
        print(f"💾 Mask saved to: {prefix}.*")
        return EXIT_OK
    path = Path(args.path)
    descriptor_path = path.with_suffix(".json")
    descriptor = read_descriptor(descriptor_path) if descriptor_path.exists() else None
    mask = read_mask_binary(path, descriptor) if path.suffix == ".frlm" else read_mask_text(path, descriptor)
    xmin, xmax, ymin, ymax = mask.bounds
    print(f"🗺️  {path}: {mask.nx}x{mask.ny} cells at h = {mask.h:g}, {mask.inside_count} inside")
    print(f"   extent [{xmin:g}, {xmax:g}] x [{ymin:g}, {ymax:g}]")
    print(f"   interior-ball radius {interior_ball_radius(mask):g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        print("📋 Presets:")
        for preset in list_presets():
            print(f"   {preset['name']:<28} {preset['runtime']:<18} {preset['description']}")
        return EXIT_OK
    names = list(available_presets) if args.all else args.names
    if not names:
        print("❌ Error: name a preset, or pass --all or --list")
        return EXIT_USAGE
    unknown = [name for name in names if name not in available_presets]
    if unknown:
        print(f"❌ Error: unknown preset {', '.join(unknown)}; available: {', '.join(available_presets)}")
        return EXIT_USAGE
    failed = 0
    for name in names:
        print(f"🔄 {name}{' (quick)' if args.quick else ''}")
        outcome = run_preset(name, quick=args.quick, output_dir=args.output)
        if not outcome["success"]:
            print(f"   ❌ Error: {outcome['error']}")
            failed += 1
            continue
        report = outcome["result"]["report"]
        for criterion in report["criteria"]:
            mark = "✅" if criterion["passed"] else "❌"
            print(f"   {mark} {criterion['name']}: {criterion['measured']} (expected {criterion['expected']})")
        print(f"   💾 {outcome['result']['path']}")
        failed += not report["passed"]
    print("=" * 50)
    if failed:
        print(f"❌ {failed} of {len(names)} presets failed")
        return EXIT_FAILURE
    print(f"✅ All {len(names)} presets passed")
    return EXIT_OK


def cmd_env(args) -> int:
    if args.set:
        values = dict(item.split("=", 1) for item in args.set)
        path = save_env_vars(values, global_config=args.global_config)
        print(f"💾 Settings saved to: {path}")
    for key, value in get_settings().items():
        print(f"   {key}={value}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "speeds": cmd_speeds,
    "wavespeed": cmd_wavespeed,
    "sweep": cmd_sweep,
    "eigen": cmd_eigen,
    "residual": cmd_residual,
    "domains": cmd_domains,
    "verify": cmd_verify,
    "env": cmd_env,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lv-spread",
        description="Spreading speeds of the Lotka-Volterra competition-diffusion system on planar domains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  lv-spread simulate configs/exterior.yaml
  lv-spread speeds runs/exterior --epsilon 0.005
  lv-spread wavespeed --params d2=3,a1=0.3,a2=2 --output wave.json
  lv-spread sweep -n 50 --seed 0 --output sweep.csv
  lv-spread eigen disk --R 1 --h 0.02
  lv-spread residual ext_case1 --params d2=3 --no-enforce
  lv-spread domains export comb --arg "extent=[-10,80,-20,75]" --arg h=0.25 --output masks/comb
  lv-spread verify --list
  lv-spread verify exterior_exact_speed --quick
  lv-spread env --set LVS_WORKERS=4 --global
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Integrate an experiment config and save the run directory")
    p.add_argument('config', help='Experiment config (YAML)')
    p.add_argument('-o', '--output', help='Run directory (default: <output.dir>/<config name>)')
    p.add_argument('--no-snapshots', action='store_true', help='Keep only probes and the manifest')

    p = sub.add_parser("speeds", help="Measure global and local spreading speeds of a saved run")
    p.add_argument('run_dir', help='Run directory written by simulate')
    p.add_argument('--e', type=point, help='Direction x,y (default: from the run config)')
    p.add_argument('--anchor', type=point, action='append', help='Tube anchor x,y; repeat for several')
    p.add_argument('--A', type=float, nargs='+', help='Tube radii')
    p.add_argument('--epsilon', type=float, help='Activity threshold in (0, 1/2)')
    p.add_argument('-o', '--output', help='Directory for traces and estimates')

    p = sub.add_parser("wavespeed", help="Minimal traveling-wave speed by shooting and bisection")
    add_params_arguments(p)
    p.add_argument('--tol', type=float, default=1e-3, help='Bisection tolerance (default: 1e-3)')
    p.add_argument('--window', type=float, default=200.0, help='Integration window (default: 200)')
    p.add_argument('-o', '--output', help='Report JSON')

    p = sub.add_parser("sweep", help="Minimal wave speeds over many parameter sets")
    p.add_argument('-n', type=int, default=50, help='Random sets to draw (default: 50)')
    p.add_argument('--seed', type=int, default=0, help='Generator seed (default: 0)')
    p.add_argument('--file', help='CSV with columns d1,d2,r1,r2,a1,a2 instead of random draws')
    p.add_argument('--tol', type=float, default=1e-3, help='Bisection tolerance (default: 1e-3)')
    p.add_argument('-o', '--output', default='sweep.csv', help='Output CSV (default: sweep.csv)')

    p = sub.add_parser("eigen", help="Dirichlet and Rayleigh eigenvalues")
    eig = p.add_subparsers(dest="eigen_command", required=True)
    q = eig.add_parser("disk", help="First eigenvalue of -d1 Laplacian on a disk")
    q.add_argument('--R', type=float, default=1.0)
    q.add_argument('--h', type=float, default=0.02)
    q.add_argument('--d1', type=float, default=1.0)
    q = eig.add_parser("curve", help="Eigenvalue against radius at fixed cells per radius")
    q.add_argument('--R', type=float, nargs='+', default=[1.0, 2.0, 4.0, 8.0])
    q.add_argument('--h-per-radius', type=int, default=40)
    q.add_argument('--d1', type=float, default=1.0)
    q.add_argument('-o', '--output', help='Curve CSV')
    q = eig.add_parser("r0", help="Smallest ball radius admitting the traveling subsolution")
    add_params_arguments(q)
    q.add_argument('--epsilon', type=float, default=0.5)
    q.add_argument('--h-per-radius', type=int, default=40)
    q = eig.add_parser("rayleigh", help="Rayleigh eigenvalue of a config's domain around a point")
    q.add_argument('--config', required=True, help='Experiment config with the domain block')
    q.add_argument('--z', type=point, required=True, help='Ball center x,y')
    q.add_argument('--r', type=float, help='Ball radius; omit to search the radius for the lower-bound inequality')

    p = sub.add_parser("residual", help="Residual of a comparison-function construction")
    p.add_argument('construction', choices=CONSTRUCTIONS)
    add_params_arguments(p)
    p.add_argument('--set', type=key_value, action='append', help='Sample field override, e.g. R=2 or t_range=[0,3]')
    p.add_argument('--no-enforce', action='store_true', help='Evaluate even outside the construction hypothesis')
    p.add_argument('-o', '--output', help='Residual JSON')

    p = sub.add_parser("domains", help="List, export and inspect domain masks")
    dom = p.add_subparsers(dest="domains_command", required=True)
    dom.add_parser("list", help="Generators and their arguments")
    q = dom.add_parser("export", help="Build a mask and write it with its descriptor")
    q.add_argument('generator', choices=list(GENERATORS))
    q.add_argument('--arg', type=key_value, action='append', help='Generator argument KEY=VALUE')
    q.add_argument('--format', choices=['binary', 'text', 'both'], default='binary')
    q.add_argument('-o', '--output', required=True, help='Output path prefix')
    q = dom.add_parser("inspect", help="Summarize a saved mask")
    q.add_argument('path', help='.frlm or text mask; a .json descriptor beside it is used when present')

    p = sub.add_parser("verify", help="Run preset acceptance experiments")
    p.add_argument('names', nargs='*', help='Preset names')
    p.add_argument('--all', action='store_true', help='Run every preset')
    p.add_argument('--list', action='store_true', help='List the presets')
    p.add_argument('--quick', action='store_true', help='Smaller grids and horizons')
    p.add_argument('-o', '--output', help='Base directory for reports (default: LVS_OUTPUT_DIR)')

    p = sub.add_parser("env", help="Show or change settings")
    p.add_argument('--set', action='append', help='KEY=VALUE to save to .env')
    p.add_argument('--global', dest='global_config', action='store_true',
                   help='Save to ~/.config/lv-spreading-toolkit/.env')
    return parser


def main(argv=None) -> int:
    """
    Parse the command line, run the command and map failures to exit codes.

    Config, parameter and regime errors, missing files and bad values are usage
    errors (2); every other SpreadingError is a numerical failure (1).
    """
    ensure_env_setup()
    logging.basicConfig(level=os.getenv("LVS_LOG_LEVEL", "WARNING").upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    logger.debug("command %s", args.command)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterError, RegimeMismatchError) as e:
        print(f"❌ Error: {e}")
        return EXIT_USAGE
    except SpreadingError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILURE
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ Error: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("\n\n👋 Interrupted")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
