"""Command-line front end.

Subcommands: ``rate-curve``, ``critical``, ``phase-diagram``, ``deviation``,
``oracle-check``.  Each takes a single YAML configuration file and writes its
CSV/JSON artifacts (and, on the report path, PNG figures) into the configured
output directory.  Exit codes: 0 success, 1 verification failure, 2 config
parse error, 3 invalid physics parameters.

All quantities use hbar = k_B = 1; times are in inverse model-energy units.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import critical as crit
from . import output, plotting, sweep
from .config import (
    ConfigError,
    ParameterError,
    RunConfig,
    TauStarRef,
    load_run_config,
    require,
    section,
)
from .loschmidt import KINK_THRESHOLD, detect_kinks, rate_function
from .model import momentum_grid
from .thermal import thermal_bloch

UNITS_NOTE = "hbar = k_B = 1; times in inverse model-energy units"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_PARAMS = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqpt",
        description="Rate functions and metamorphic-transition analysis for "
                    "double-quenched 1D two-band models.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap for batchable work "
                             "(default: DQPT_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    specs = {
        "rate-curve": "rate function over a time grid (rate.csv + sidecar)",
        "critical": "critical momenta and transition times (critical.json)",
        "phase-diagram": "existence diagram over a parameter plane (diagram.csv)",
        "deviation": "singular rate term vs duration offset (deviation.csv)",
        "oracle-check": "randomized closed-form vs brute-force verification",
    }
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", help="YAML run configuration file")
        if name in ("rate-curve", "phase-diagram", "deviation"):
            sp.add_argument("--plot", action=argparse.BooleanOptionalAction,
                            default=True, help="render a PNG next to the CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _resolve_threads(args.threads)
        cfg = load_run_config(args.config)
        handler = {
            "rate-curve": cmd_rate_curve,
            "critical": cmd_critical,
            "phase-diagram": cmd_phase_diagram,
            "deviation": cmd_deviation,
            "oracle-check": cmd_oracle_check,
        }[args.command]
        return handler(cfg, args, threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


def entry() -> None:
    sys.exit(main())


def cmd_rate_curve(cfg: RunConfig, args, threads: int) -> int:
    require(cfg, "h0", "h1", "h2", "temperature", "tau", "n_modes", "time_grid")
    branches = crit.critical_branches(cfg.h0, cfg.h1, cfg.h2,
                                      n_scan=cfg.n_scan, n_max=cfg.n_max)
    tau = _resolve_tau(cfg.tau, branches)
    schedule = cfg.schedule(tau)
    report = crit.report_from_branches(branches, tau)
    _warn_near_miss(report)

    grid, extras = _augmented_grid(cfg.n_modes, report)
    field = thermal_bloch(cfg.h0, cfg.temperature, grid)
    times = cfg.time_grid.times()
    curve = rate_function(schedule, field, times)
    threshold = cfg.kink_threshold if cfg.kink_threshold is not None else KINK_THRESHOLD
    kinks = detect_kinks(curve, threshold=threshold)

    outdir = cfg.output_dir
    csv_path = outdir / "rate.csv"
    output.write_rate_csv(csv_path, curve)
    sidecar = {
        "tau": tau,
        "tau_spec": _tau_spec_repr(cfg.tau),
        "tau_matches_tau_star": report.tau_match is not None,
        "tau_match": None if report.tau_match is None else {
            "branch": report.tau_match.branch,
            "n": report.tau_match.n,
            "tau_star": report.tau_match.tau_star,
        },
        "kinks": [float(k) for k in kinks],
        "n_modes": cfg.n_modes,
        "n_modes_evaluated": int(curve.n_modes),
        "augmented_momenta": [float(k) for k in extras],
        "time_grid": {"t_max": cfg.time_grid.t_max, "n_steps": cfg.time_grid.n_steps},
        "second_quench_reached": bool(times[-1] >= tau),
        "metamorphic_possible": report.metamorphic_possible,
        "units": UNITS_NOTE,
    }
    output.write_json(outdir / "rate.json", sidecar)
    print(f"wrote {csv_path}")
    if not sidecar["second_quench_reached"]:
        print(f"note: t_max={cfg.time_grid.t_max} < tau={tau}: "
              "the curve covers only the first stage")
    if args.plot:
        plotting.save_rate_figure(outdir / "rate.png", curve, kinks)
        print(f"wrote {outdir / 'rate.png'}")
    return EXIT_OK


def cmd_critical(cfg: RunConfig, args, threads: int) -> int:
    require(cfg, "h0", "h1", "h2", "temperature", "tau")
    branches = crit.critical_branches(cfg.h0, cfg.h1, cfg.h2,
                                      n_scan=cfg.n_scan, n_max=cfg.n_max)
    tau = _resolve_tau(cfg.tau, branches)
    cfg.schedule(tau)  # validates tau > 0 against the models
    report = crit.report_from_branches(branches, tau)
    _warn_near_miss(report)
    payload = output.report_payload(report)
    payload["units"] = UNITS_NOTE
    path = cfg.output_dir / "critical.json"
    output.write_json(path, payload)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_phase_diagram(cfg: RunConfig, args, threads: int) -> int:
    spec = section(cfg, "diagram")
    kind = spec.get("model")
    if kind == "ssh":
        r1 = _axis_values(spec, "r1", positive=True)
        r2 = _axis_values(spec, "r2", positive=True)
        grid = sweep.ssh_phase_diagram(r1, r2)
    elif kind == "kitaev":
        m1 = _real_entry(spec, "m1")
        c1 = _real_entry(spec, "c1")
        m2 = _axis_values(spec, "m2")
        c2 = _axis_values(spec, "c2")
        grid = sweep.kitaev_phase_diagram(m1, c1, m2, c2)
    else:
        raise ConfigError("diagram.model must be 'ssh' or 'kitaev'")
    path = cfg.output_dir / "diagram.csv"
    output.write_diagram_csv(path, grid)
    print(f"wrote {path}")
    if args.plot:
        plotting.save_diagram_figure(cfg.output_dir / "diagram.png", grid)
        print(f"wrote {cfg.output_dir / 'diagram.png'}")
    return EXIT_OK


def cmd_deviation(cfg: RunConfig, args, threads: int) -> int:
    require(cfg, "h0", "h1", "h2", "n_modes")
    spec = section(cfg, "deviation")
    branches = crit.critical_branches(cfg.h0, cfg.h1, cfg.h2,
                                      n_scan=cfg.n_scan, n_max=cfg.n_max)
    kc_index = _int_entry(spec, "kc", default=0, minimum=0)
    n = _int_entry(spec, "n", default=0, minimum=0)
    branch = _branch_at(branches, kc_index)
    if not branch.tau_star:
        raise ParameterError(f"branch kc={kc_index} is gapless: no metamorphic duration")
    tau_star = crit.metamorphic_tau(branch.omega1, n)
    epsilons = _epsilon_values(spec)
    samples = crit.deviation_gi(branch.omega1, tau_star, epsilons, cfg.n_modes)
    path = cfg.output_dir / "deviation.csv"
    output.write_deviation_csv(path, samples)
    print(f"wrote {path}")
    if args.plot:
        plotting.save_deviation_figure(cfg.output_dir / "deviation.png", samples)
        print(f"wrote {cfg.output_dir / 'deviation.png'}")
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig, args, threads: int) -> int:
    from .oracle import run_oracle_check

    spec = section(cfg, "oracle")
    draws = _int_entry(spec, "draws", default=None, minimum=1)
    seed = _int_entry(spec, "seed", default=12345, minimum=0)
    result = run_oracle_check(draws, seed, threads=threads)
    payload = {
        "draws": result.draws,
        "seed": result.seed,
        "max_deviation": result.max_deviation,
        "tol": result.tol,
        "passed": result.passed,
        "worst": result.worst,
    }
    path = cfg.output_dir / "oracle_check.json"
    output.write_json(path, payload)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status}: max deviation {result.max_deviation:.3e} over "
          f"{result.draws} draws (tol {result.tol:g}); wrote {path}")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def _resolve_threads(cli_value: int | None) -> int:
    if cli_value is None:
        env = os.environ.get("DQPT_THREADS")
        if env is None:
            return 1
        try:
            cli_value = int(env)
        except ValueError as exc:
            raise ParameterError(f"DQPT_THREADS must be an integer, got {env!r}") from exc
    if cli_value < 1:
        raise ParameterError(f"thread count must be >= 1, got {cli_value}")
    return cli_value


def _resolve_tau(tau_spec, branches) -> float:
    if isinstance(tau_spec, TauStarRef):
        branch = _branch_at(branches, tau_spec.kc)
        if not branch.tau_star:
            raise ParameterError(
                f"branch kc={tau_spec.kc} is gapless: no metamorphic duration")
        return crit.metamorphic_tau(branch.omega1, tau_spec.n)
    return float(tau_spec)


def _branch_at(branches, index: int):
    if not branches:
        raise ParameterError("schedule has no critical momentum")
    if index >= len(branches):
        raise ParameterError(
            f"branch index kc={index} out of range: {len(branches)} branch(es) found")
    return branches[index]


def _augmented_grid(n_modes: int, report) -> tuple[np.ndarray, list[float]]:
    """Uniform grid plus the exact critical momenta of metamorphic branches.

    The geometric zero of the amplitude lives exactly at k_c; a uniform grid
    generically misses it, so the diverging sample must be added for the rate
    function to report the persistent singularity.
    """
    grid = momentum_grid(n_modes)
    extras: list[float] = []
    for b in report.branches:
        if not b.parallel_02:
            continue
        k = b.k_c if b.k_c < math.pi else -math.pi
        extras.append(k)
        if 0.0 < b.k_c < math.pi:
            extras.append(-b.k_c)
    inserted = []
    for k in sorted(extras):
        if np.min(np.abs(grid - k), initial=np.inf) > 1e-12:
            inserted.append(k)
    if inserted:
        grid = np.sort(np.concatenate([grid, np.asarray(inserted)]))
    return grid, inserted


def _warn_near_miss(report) -> None:
    if report.tau_match is not None:
        return
    for b in report.branches:
        if not b.parallel_02:
            continue
        for star in b.tau_star:
            rel = abs(report.tau - star) / star
            if rel < crit.TAU_NEAR_MISS:
                print(f"warning: tau={report.tau:.6g} is within {rel:.2%} of the "
                      f"metamorphic duration tau*={star:.6g} but does not match it",
                      file=sys.stderr)
                return


def _tau_spec_repr(tau_spec) -> str:
    if isinstance(tau_spec, TauStarRef):
        return f"tau_star:n={tau_spec.n},kc={tau_spec.kc}"
    return "literal"


def _axis_values(spec, key: str, positive: bool = False) -> np.ndarray:
    entry = spec.get(key)
    if not isinstance(entry, dict) or "min" not in entry or "max" not in entry:
        raise ConfigError(f"diagram.{key} must be a mapping with min and max")
    lo = _real_entry(entry, "min")
    hi = _real_entry(entry, "max")
    n = _int_entry(entry, "n", default=sweep.DIAGRAM_RESOLUTION, minimum=2)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ParameterError(f"diagram.{key}: need finite min < max, got [{lo}, {hi}]")
    if positive and lo <= 0:
        raise ParameterError(f"diagram.{key}: values must be positive, got min={lo}")
    return np.linspace(lo, hi, n)


def _epsilon_values(spec) -> np.ndarray:
    if "epsilons" in spec:
        eps = spec["epsilons"]
        if not isinstance(eps, (list, tuple)) or not eps:
            raise ConfigError("deviation.epsilons must be a nonempty list")
        values = np.asarray([_real_entry({"epsilon": e}, "epsilon") for e in eps])
    else:
        lo = _real_entry(spec, "eps_min")
        hi = _real_entry(spec, "eps_max")
        n = _int_entry(spec, "n_eps", default=61, minimum=2)
        if not (0 < lo < hi):
            raise ParameterError(f"deviation range needs 0 < eps_min < eps_max, "
                                 f"got [{lo}, {hi}]")
        values = np.logspace(math.log10(lo), math.log10(hi), n)
    if bool(spec.get("mirrored", False)):
        values = np.concatenate([-values[::-1], values])
    if np.any(values == 0.0):
        raise ParameterError("deviation offsets must exclude epsilon = 0")
    return values


def _real_entry(spec, key: str) -> float:
    if key not in spec:
        raise ConfigError(f"missing entry {key!r}")
    value = spec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"entry {key!r} must be a number, got {value!r}")
    return float(value)


def _int_entry(spec, key: str, default, minimum: int) -> int:
    if key not in spec:
        if default is None:
            raise ConfigError(f"missing entry {key!r}")
        return default
    value = spec[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"entry {key!r} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"entry {key!r} must be >= {minimum}, got {value}")
    return value
