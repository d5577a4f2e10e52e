"""Command-line experiment runner: deterministic CSV/JSON artifacts.

Every subcommand writes its table(s) into the output directory together with
a manifest recording the fully resolved configuration and package version.
CSV bodies are byte-identical across reruns of the same configuration;
the manifest timestamp is the only field excluded from that guarantee.
"""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .charging import (
    charge_once,
    regularized_charge_scan,
    size_scan,
    sweep_grid,
)
from .config import ConfigError, parse_config
from .dynamics import QuenchSchedule
from .lattice import ChainConfig
from .oracle import exact_trajectory, spectrum_matches_subset_sums
from .scrambling import lyapunov_scan, nested_commutator_norms, site_density_probe

WORKERS_ENV = "HORIZONBATTERY_WORKERS"


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.11e}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_manifest(outdir, subcommand, cfg, outputs, warnings=0):
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": cfg.to_dict(),
        "outputs": outputs,
        "warnings": warnings,
    }
    path = os.path.join(outdir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
    return path


def _chain(cfg, L=None):
    c = cfg.chain
    return ChainConfig(L=L or c.L, d=c.d, mu=c.mu, frame=c.frame)


def _schedule(cfg, t_max=None):
    s = cfg.schedule
    t_max = t_max if t_max is not None else s.t_max
    return QuenchSchedule(tau=min(s.tau, t_max), t_max=t_max, dt=s.dt)


def _workers(cfg):
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        return max(1, int(env))
    return cfg.workers or os.cpu_count()


def cmd_charge(cfg, outdir):
    traj, metrics, _ = charge_once(
        cfg.quench.x_h0, cfg.quench.x_ht, _chain(cfg), _schedule(cfg)
    )
    tpath = os.path.join(outdir, "trajectory.csv")
    write_csv(tpath, ["t", "delta_e", "delta_e_norm"],
              zip(traj.times, traj.dE, traj.dE_norm))
    mpath = os.path.join(outdir, "metrics.json")
    with open(mpath, "w") as fh:
        json.dump(
            {
                "x_h0": cfg.quench.x_h0,
                "x_ht": cfg.quench.x_ht,
                "e_max_norm": metrics.E_max,
                "p_max_norm": metrics.P_max,
                "tau_star": metrics.tau_star,
                "bandwidth": traj.bandwidth,
            },
            fh,
            indent=2,
        )
    return [tpath, mpath], 0


def cmd_sweep(cfg, outdir):
    result = sweep_grid(
        cfg.grids.x_h0, cfg.grids.x_ht, _chain(cfg), _schedule(cfg),
        workers=_workers(cfg),
    )
    path = os.path.join(outdir, "sweep.csv")
    write_csv(
        path,
        ["x_h0", "x_ht", "e_max_norm", "p_max_norm", "tau_star", "boundary_flag"],
        result.rows(),
    )
    for cell in result.failures:
        print(f"warning: cell ({cell.x_h0}, {cell.x_ht}) failed: {cell.error}",
              file=sys.stderr)
    return [path], len(result.failures)


def cmd_otoc(cfg, outdir):
    o = cfg.otoc
    times = np.arange(0.0, o.t_max + 1e-9, o.dt)
    probe = None if o.site_i is None else (o.site_i, o.site_i + o.offset)
    thresholds = None if o.d_lo is None else (o.d_lo, o.d_hi)
    scan = lyapunov_scan(o.x_h, _chain(cfg), probe=probe, times=times,
                         thresholds=thresholds)
    path = os.path.join(outdir, "otoc.csv")
    write_csv(path, ["x_h", "lambda_fit", "lambda_stderr", "window_lo", "window_hi"],
              scan.table())
    fpath = os.path.join(outdir, "otoc_fit.json")
    flagged = [c.x_h for c in scan.cells if c.flagged]
    with open(fpath, "w") as fh:
        json.dump(
            {"slope": scan.slope, "intercept": scan.intercept, "flagged": flagged},
            fh, indent=2,
        )
    for c in scan.cells:
        if c.flagged:
            print(f"warning: x_h={c.x_h} flagged: {c.reason}", file=sys.stderr)
    return [path, fpath], len(flagged)


def cmd_nested(cfg, outdir):
    n = cfg.nested
    chain = _chain(cfg)
    rows = []
    for x_ht in n.x_ht:
        from .lattice import MetricProfile, build_hamiltonian, build_hoppings

        h = build_hamiltonian(build_hoppings(MetricProfile(x_ht), chain), chain)
        site = chain.L // 2 if n.probe_site is None else n.probe_site
        ladder = nested_commutator_norms(h, site_density_probe(chain.L, site), n.k_max)
        for k, norm in ladder.entries:
            rows.append((x_ht, k, norm))
    path = os.path.join(outdir, "nested.csv")
    write_csv(path, ["x_ht", "k", "norm"], rows)
    return [path], 0


def cmd_size_scan(cfg, outdir):
    rows = size_scan(
        cfg.grids.L, cfg.quench.x_h0, cfg.grids.x_ht, cfg.chain.d, cfg.chain.mu,
        _schedule(cfg), frame=cfg.chain.frame, workers=_workers(cfg),
    )
    path = os.path.join(outdir, "size_scan.csv")
    warn = sum(1 for r in rows if r[4])
    for r in rows:
        if r[4]:
            print(f"warning: cell (L={r[0]}, x_ht={r[1]}) failed: {r[4]}",
                  file=sys.stderr)
    write_csv(path, ["L", "x_ht", "p_max_norm", "tau_star"],
              [(r[0], r[1], r[2], r[3]) for r in rows])
    return [path], warn


def cmd_regularized(cfg, outdir):
    rows = regularized_charge_scan(
        cfg.quench.x_h0, cfg.grids.x_ht, _chain(cfg),
        _schedule(cfg, t_max=cfg.regularization.t_max), workers=_workers(cfg),
    )
    path = os.path.join(outdir, "regularized.csv")
    write_csv(path, ["x_ht_eff", "p_max_norm", "tau_star", "t_max"], rows)
    return [path], 0


def cmd_oracle(cfg, outdir):
    """Small-chain comparison of the Gaussian engine against dense diagonalization."""
    from .lattice import MetricProfile, build_hoppings
    from .dynamics import delta_energy_series

    chain = _chain(cfg)
    if chain.L > 10:
        chain = ChainConfig(L=8, d=chain.d, mu=chain.mu, frame=chain.frame)
        print(f"note: oracle comparison runs at L={chain.L}", file=sys.stderr)
    sched = _schedule(cfg)
    hop0 = build_hoppings(MetricProfile(cfg.quench.x_h0), chain)
    hop1 = build_hoppings(MetricProfile(cfg.quench.x_ht), chain)
    from .lattice import build_hamiltonian

    h0 = build_hamiltonian(hop0, chain)
    h1 = build_hamiltonian(hop1, chain)
    traj = delta_energy_series(h0, h1, sched)
    _, dE_exact, degenerate = exact_trajectory(hop0, hop1, chain, sched)
    dev_traj = float(np.max(np.abs(traj.dE - dE_exact)))
    dev_spec0, ok0 = spectrum_matches_subset_sums(hop0, chain)
    dev_spec1, ok1 = spectrum_matches_subset_sums(hop1, chain)
    report = {
        "L": chain.L,
        "x_h0": cfg.quench.x_h0,
        "x_ht": cfg.quench.x_ht,
        "trajectory_max_dev": dev_traj,
        "spectrum_dev_h0": dev_spec0,
        "spectrum_dev_h1": dev_spec1,
        "ground_state_degenerate": degenerate,
        "pass": bool(ok0 and ok1 and dev_traj < 1e-8),
    }
    path = os.path.join(outdir, "oracle_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    print(("PASS" if report["pass"] else "FAIL")
          + f": trajectory dev {dev_traj:.2e}, spectrum dev {max(dev_spec0, dev_spec1):.2e}")
    return [path], 0 if report["pass"] else 1


_COMMANDS = {
    "charge": cmd_charge,
    "sweep": cmd_sweep,
    "otoc": cmd_otoc,
    "nested": cmd_nested,
    "size-scan": cmd_size_scan,
    "regularized": cmd_regularized,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="horizonbattery",
        description="Quantum-battery charging on black-hole-metric XY chains.",
    )
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--out", help="output directory (default from config)")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--out")
        p.add_argument("-L", type=int, dest="L")
        p.add_argument("--d", type=float)
        p.add_argument("--mu", type=float)
        p.add_argument("--frame", choices=["fixed", "horizon"])
        p.add_argument("--xh0", type=float)
        p.add_argument("--xht", type=float)
        p.add_argument("--tau", type=float)
        p.add_argument("--tmax", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--workers", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {
        "chain.L": args.L,
        "chain.d": args.d,
        "chain.mu": args.mu,
        "chain.frame": args.frame,
        "quench.x_h0": args.xh0,
        "quench.x_ht": args.xht,
        "schedule.tau": args.tau,
        "schedule.t_max": args.tmax,
        "schedule.dt": args.dt,
        "workers": args.workers,
    }
    if args.tmax is not None and args.tau is None:
        overrides["schedule.tau"] = args.tmax
    try:
        cfg = parse_config(args.config, overrides)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    outdir = args.out or cfg.output
    os.makedirs(outdir, exist_ok=True)
    try:
        outputs, warnings = _COMMANDS[args.subcommand](cfg, outdir)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_manifest(outdir, args.subcommand, cfg, outputs, warnings)
    if warnings:
        print(f"{warnings} warning(s); see stderr", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
