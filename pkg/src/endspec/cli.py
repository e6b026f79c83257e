"""Command-line front end.

    endspec <command> --config run.yaml [--out DIR] [--threads N] [--verbose]
    endspec oracle well -V0 5 -a 1
    endspec oracle barrier --height 8 --left 1 --right 2

Commands: spectrum, resonances, essential-spectrum, continue,
parametrix-check, lap, corner, oracle.  Artifacts are CSV tables (with a
provenance comment header) and SVG plots in the output directory.  Exit
codes: 0 success (inconclusive verdicts carry a warning record), 2 config
or usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (RunConfig, build_cross_section, build_potential,
                     build_potential_map, load_config)
from .continuation import (AnalyticVector, CoreModel, continue_matrix_element,
                           parametrix_grid, residual_norm_report)
from .corner import CornerModel, channel_spectra, corner_essential_spectrum, corner_resonances
from .discretize import Grid1D, Grid2D, bound_states, discretize_line, eig, find_resonances
from .errors import ConfigError, EndspecError, NumericalError
from .io import config_hash, fmt, write_csv
from .lap import lap_estimate
from .modes import cusp_to_schrodinger, reduce_cusp, reduce_cylindrical
from .oracles import PiecewiseModel, oracle_bound_states, oracle_resonances
from .scaling import essential_rays
from .spectral_core import surface_point

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _provenance(cfg: RunConfig, command: str, extra: dict | None = None) -> dict:
    prov = {
        "tool": f"endspec {__version__}",
        "command": command,
        "config-sha256": config_hash(cfg.canonical()),
        "grid": f"L={cfg.numerics.L} n={cfg.numerics.n} scheme={cfg.numerics.scheme}",
        "theta": fmt(cfg.numerics.theta),
        "tolerances": (f"rays={cfg.numerics.rays_tolerance} "
                       f"stability={cfg.numerics.stability_tolerance} "
                       f"residual={cfg.numerics.residual_bound}"),
    }
    prov.update(extra or {})
    return prov


def _build_modes(cfg: RunConfig):
    cs = build_cross_section(cfg.model.cross_section, cfg.model.e_max)
    pots = build_potential_map(cfg.model)
    return reduce_cylindrical(cs, pots, cfg.model.e_max), cs


def _maybe_plot(cfg, name, draw):
    if "svg" not in cfg.output.formats:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    draw(ax)
    fig.tight_layout()
    out = Path(cfg.output.directory) / name
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={"Date": None})
    plt.close(fig)


def _ray_segments(rays, length=12.0):
    for o, lab in zip(rays.origins, rays.sources):
        end = o + rays.direction * length
        yield (o.real, o.imag), (end.real, end.imag), lab


def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.model.kind == "cusp":
        cs = build_cross_section(cfg.model.cross_section, cfg.model.e_max)
        rows = []
        for op in reduce_cusp(cs, cfg.model.dimension, cfg.model.e_max):
            line = cusp_to_schrodinger(op)
            pairs = eig(discretize_line(line, -15.0, 15.0, max(cfg.numerics.n, 500)))
            rows.append((op.mode_mu, line.constant, pairs[0][0].real, pairs[0][1]))
        write_csv(Path(cfg.output.directory) / "spectrum.csv",
                  ["mode_mu", "threshold", "bottom", "residual"], rows,
                  _provenance(cfg, "spectrum"))
        return EXIT_OK
    model, cs = _build_modes(cfg)
    rows = []
    seen = set()
    for op in model:
        key = (op.mode_mu, id(op.potential))
        if key in seen:
            continue
        seen.add(key)
        grid = Grid1D(cfg.numerics.L, cfg.numerics.n, cfg.numerics.scheme)
        for k, (e, res) in enumerate(bound_states(op, grid, cfg.numerics.richardson)):
            rows.append((op.mode_mu, k, e, res, cs.multiplicity(op.mode_mu)))
    write_csv(Path(cfg.output.directory) / "spectrum.csv",
              ["mode_mu", "index", "energy", "residual", "multiplicity"], rows,
              _provenance(cfg, "spectrum"))
    return EXIT_OK


def cmd_resonances(cfg: RunConfig, threads: int | None) -> int:
    model, cs = _build_modes(cfg)
    grid = Grid1D(cfg.numerics.L, cfg.numerics.n, cfg.numerics.scheme)
    rset = find_resonances(
        model, cfg.numerics.theta_sweep, grid,
        scaling_radius=cfg.numerics.scaling_radius,
        rays_tolerance=cfg.numerics.rays_tolerance,
        stability_tolerance=cfg.numerics.stability_tolerance,
        residual_bound=cfg.numerics.residual_bound,
        richardson=cfg.numerics.richardson,
        threads=threads,
    )
    rows = [(r.z.real, r.z.imag, r.residual, r.theta_spread, r.mode_mu, r.kind,
             r.multiplicity) for r in rset]
    prov = _provenance(cfg, "resonances", {"warnings": "; ".join(rset.warnings) or "none"})
    write_csv(Path(cfg.output.directory) / "resonances.csv",
              ["re", "im", "residual", "theta_spread", "mode", "method", "multiplicity"],
              rows, prov)

    rays = essential_rays(cs.thresholds(cfg.model.e_max), cfg.numerics.theta)

    def draw(ax):
        for (x0, y0), (x1, y1), _ in _ray_segments(rays):
            ax.plot([x0, x1], [y0, y1], "-", color="tab:gray", lw=1)
        if rows:
            ax.plot([r[0] for r in rows], [r[1] for r in rows], "x", color="tab:red")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title("resonances and essential-spectrum rays")

    _maybe_plot(cfg, "resonances.svg", draw)
    return EXIT_OK


def cmd_essential_spectrum(cfg: RunConfig) -> int:
    if cfg.model.kind == "corner":
        model = _build_corner(cfg)
        rays = corner_essential_spectrum(model, cfg.numerics.theta,
                                         thetas=cfg.numerics.theta_sweep)
    else:
        cs = build_cross_section(cfg.model.cross_section, cfg.model.e_max)
        rays = essential_rays(cs.thresholds(cfg.model.e_max), cfg.numerics.theta)
    rows = [(o.real, o.imag, rays.direction.real, rays.direction.imag, lab)
            for o, lab in zip(rays.origins, rays.sources)]
    write_csv(Path(cfg.output.directory) / "essential_spectrum.csv",
              ["origin_re", "origin_im", "dir_re", "dir_im", "channel"], rows,
              _provenance(cfg, "essential-spectrum"))

    def draw(ax):
        for (x0, y0), (x1, y1), _ in _ray_segments(rays):
            ax.plot([x0, x1], [y0, y1], "-", color="tab:blue", lw=1.2)
        ax.plot([o.real for o in rays.origins], [o.imag for o in rays.origins], "o",
                color="tab:blue", ms=4)
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title("essential spectrum rays")

    _maybe_plot(cfg, "essential_spectrum.svg", draw)
    return EXIT_OK


def cmd_continue(cfg: RunConfig) -> int:
    opts = cfg.task.options
    start = complex(*opts.get("start", [-2.0, 0.0]))
    waypoints = [complex(*w) for w in opts.get("waypoints", [])]
    npts = int(opts.get("points", 50))
    path = [start]
    prev = start
    for w in waypoints:
        seg = np.linspace(0, 1, max(2, npts // max(1, len(waypoints))))[1:]
        path.extend(prev + (w - prev) * s for s in seg)
        prev = w
    f = AnalyticVector(tuple(opts.get("f", [0.0, 1.0])))
    g = AnalyticVector(tuple(opts.get("g", [0.0, 0.0, 1.0])))
    vals = continue_matrix_element(f, g, path, cfg.numerics.theta,
                                   grid=Grid1D(cfg.numerics.L, cfg.numerics.n))
    rows = [(z.real, z.imag, v.real, v.imag) for z, v in zip(path, vals)]
    write_csv(Path(cfg.output.directory) / "continuation.csv",
              ["path_re", "path_im", "value_re", "value_im"], rows,
              _provenance(cfg, "continue"))
    return EXIT_OK


def cmd_parametrix_check(cfg: RunConfig) -> int:
    model, _ = _build_modes(cfg)
    opts = cfg.task.options
    lam_list = [complex(*p) if isinstance(p, (list, tuple)) else complex(p)
                for p in opts.get("lambdas", [-1.0])]
    op = model[0]
    core = CoreModel(op.potential, op.mode_mu,
                     core_radius=float(opts.get("core_radius",
                                                max(1.5, op.potential.support_radius + 1.0))))
    rows = []
    for lam in lam_list:
        grid = parametrix_grid(core, cfg.numerics.n, cfg.numerics.L)
        nrm, sv = residual_norm_report(
            surface_point(lam, [op.mode_mu], (+1,), approach=+1 if lam.imag == 0 else None),
            core, grid)
        resolved = sv[sv > sv[0] * 1e-10]
        ratios = [resolved[min(2 * k + 1, len(resolved) - 1)] / resolved[k]
                  for k in range(min(4, len(resolved)))]
        rows.append((lam.real, lam.imag, nrm, len(resolved),
                     ";".join(f"{r:.3e}" for r in ratios)))
    write_csv(Path(cfg.output.directory) / "parametrix.csv",
              ["lambda_re", "lambda_im", "residual_norm", "resolved_rank", "sv_decay_ratios"],
              rows, _provenance(cfg, "parametrix-check"))
    return EXIT_OK


def cmd_lap(cfg: RunConfig) -> int:
    model, _ = _build_modes(cfg)
    opts = cfg.task.options
    a, b = float(opts.get("a", 1.0)), float(opts.get("b", 2.0))
    p = float(opts.get("p", 2.0))
    width = float(opts.get("test_width", 0.35))

    def phi(u):
        return np.exp(-(((u - 0.5) / width) ** 4))

    phis = [phi if i == 0 or not op.potential.is_zero else None
            for i, op in enumerate(model)]
    report = lap_estimate(model, phis, a, b, p, cfg.numerics.e_grid,
                          Grid1D(cfg.numerics.L, cfg.numerics.n),
                          theta=cfg.numerics.theta)
    rows = list(zip(report.epsilon_grid, report.values))
    prov = _provenance(cfg, "lap", {
        "interval": f"({a},{b})", "p": p,
        "verdict": report.verdict, "sup-estimate": fmt(report.sup_estimate),
    })
    write_csv(Path(cfg.output.directory) / "lap.csv", ["epsilon", "integral"], rows, prov)
    if report.verdict == "inconclusive":
        print("warning: limiting-absorption verdict inconclusive", file=sys.stderr)
    return EXIT_OK


def _build_corner(cfg: RunConfig) -> CornerModel:
    ends = list(cfg.model.ends) + [None, None]
    v1 = build_potential(ends[0])
    v2 = build_potential(ends[1])
    cs = build_cross_section(cfg.model.cross_section, cfg.model.e_max)
    coupling = None
    support = 0.0
    if cfg.model.coupling is not None:
        eps = float(cfg.model.coupling.get("strength", 1e-3))
        size = float(cfg.model.coupling.get("size", 1.0))
        support = size

        def coupling(u1, u2, _e=eps, _s=size):
            return _e * ((u1 <= _s) & (u2 <= _s)).astype(float)

    R0 = cfg.numerics.scaling_radius or max(3.0, v1.support_radius, v2.support_radius)
    return CornerModel(v1, v2, cs, coupling, support, R0, cfg.model.e_max)


def cmd_corner(cfg: RunConfig) -> int:
    model = _build_corner(cfg)
    channels = channel_spectra(model, cfg.numerics.theta_sweep,
                               Grid1D(cfg.numerics.L, cfg.numerics.n))
    rows = [(z.real, z.imag, lab) for z, lab in channels.provenance]
    write_csv(Path(cfg.output.directory) / "corner_channels.csv",
              ["re", "im", "channel"], rows, _provenance(cfg, "corner"))

    rays = corner_essential_spectrum(model, cfg.numerics.theta, channels=channels)
    rows = [(o.real, o.imag, rays.direction.real, rays.direction.imag, lab)
            for o, lab in zip(rays.origins, rays.sources)]
    write_csv(Path(cfg.output.directory) / "corner_rays.csv",
              ["origin_re", "origin_im", "dir_re", "dir_im", "channel"], rows,
              _provenance(cfg, "corner"))

    if cfg.task.options.get("resonances", True):
        rset = corner_resonances(model, cfg.numerics.theta_sweep,
                                 Grid2D(cfg.numerics.L2d, cfg.numerics.n2d),
                                 channels=channels,
                                 stability_tolerance=max(cfg.numerics.stability_tolerance, 1e-5))
        rows = [(r.z.real, r.z.imag, r.residual, r.theta_spread, r.mode_mu, r.kind,
                 r.multiplicity) for r in rset]
        write_csv(Path(cfg.output.directory) / "corner_resonances.csv",
                  ["re", "im", "residual", "theta_spread", "mode", "method", "multiplicity"],
                  rows, _provenance(cfg, "corner"))
    return EXIT_OK


def cmd_oracle(args, cfg: RunConfig | None) -> int:
    if args.oracle_model == "well":
        pm = PiecewiseModel(((0.0, args.width, -args.depth),))
        states = oracle_bound_states(pm)
        for k, e in enumerate(states):
            print(f"bound[{k}] = {e:.12f}")
        if not states:
            print("no bound states")
        return EXIT_OK
    pm = PiecewiseModel(((args.left, args.right, args.height),))
    if args.left > 0:
        pm = PiecewiseModel(((0.0, args.left, 0.0), (args.left, args.right, args.height)))
    lo = args.rect_re_min if args.rect_re_min is not None else 0.2
    hi = args.rect_re_max if args.rect_re_max is not None else max(2.0 * args.height, 10.0)
    roots = oracle_resonances(pm, (lo, hi))
    for k, z in enumerate(roots):
        print(f"resonance[{k}] = {z.real:.12f} {z.imag:+.12f}i")
    if not roots:
        print("no resonances in the rectangle")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="endspec", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"endspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, required=True, help="YAML run configuration")
    common.add_argument("--out", type=Path, default=None, help="output directory override")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: ENDSPEC_THREADS or 1)")
    common.add_argument("--verbose", action="store_true")
    for name in ("spectrum", "resonances", "essential-spectrum", "continue",
                 "parametrix-check", "lap", "corner"):
        sub.add_parser(name, parents=[common])
    orc = sub.add_parser("oracle", help="matching-equation oracles, no config needed")
    osub = orc.add_subparsers(dest="oracle_model", required=True)
    ow = osub.add_parser("well")
    ow.add_argument("-V0", "--depth", type=float, required=True)
    ow.add_argument("-a", "--width", type=float, required=True)
    ob = osub.add_parser("barrier")
    ob.add_argument("--height", type=float, required=True)
    ob.add_argument("--left", type=float, required=True)
    ob.add_argument("--right", type=float, required=True)
    ob.add_argument("--rect-re-min", type=float, default=None)
    ob.add_argument("--rect-re-max", type=float, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        if args.command == "oracle":
            return cmd_oracle(args, None)
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output.directory = str(args.out)
        threads = args.threads
        if threads is None:
            threads = int(os.environ.get("ENDSPEC_THREADS", "1"))
        if args.verbose:
            print(f"config {args.config} -> {cfg.task.command}, hash "
                  f"{config_hash(cfg.canonical())}", file=sys.stderr)
        command = args.command
        if command != cfg.task.command:
            raise ConfigError(
                f"CLI command {command!r} does not match task.command {cfg.task.command!r}")
        if command == "spectrum":
            return cmd_spectrum(cfg)
        if command == "resonances":
            return cmd_resonances(cfg, threads)
        if command == "essential-spectrum":
            return cmd_essential_spectrum(cfg)
        if command == "continue":
            return cmd_continue(cfg)
        if command == "parametrix-check":
            return cmd_parametrix_check(cfg)
        if command == "lap":
            return cmd_lap(cfg)
        if command == "corner":
            return cmd_corner(cfg)
        raise ConfigError(f"unhandled command {command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EndspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
