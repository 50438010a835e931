"""Command-line entry points: noise-gen, simulate {grw,csl}, heat, bounds.

Simulation subcommands work in dimensionless units (hbar = m0 = 1); ``heat``
and ``bounds`` take SI values.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import bounds as bnd
from .csl import heating_energy, run_csl_ensemble
from .extensions import DissipativeParams, derive_dissipative, dissipative_energy
from .grw import amplified_rate_grw, run_ensemble
from .noise import NoiseField, NoiseSpec
from .params import K_B, M_HYDROGEN, YEAR, CollapseParams
from .propagator import Hamiltonian
from .state import Grid1D, gaussian_packet, superpose


def _write(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.9e}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _grid_for(extent: float, finest: float, min_points: int = 64) -> Grid1D:
    n = max(min_points, int(2 ** np.ceil(np.log2(2 * extent / finest))))
    return Grid1D.centered(extent, n)


def _initial_state(separation, width, r_c, spread_room=0.0):
    extent = 0.5 * separation + 10.0 * max(width, r_c) + spread_room
    grid = _grid_for(extent, min(width / 4.0, r_c / 4.0))
    if separation > 0:
        a = gaussian_packet(grid, 0.5 * separation, width)
        b = gaussian_packet(grid, -0.5 * separation, width)
        return superpose(a, b)
    return gaussian_packet(grid, 0.0, width)


def cmd_noise_gen(args):
    grid = Grid1D(0.0, args.dx * args.points, args.points)
    kind = "exponential" if args.kind in ("exponential", "colored") else "white"
    field = NoiseField(NoiseSpec(kind, grid, args.dt, args.seed, args.omega_c))
    data = field.take(args.steps, increments=args.increments)
    if args.format == "binary":
        payload = np.ascontiguousarray(data, dtype="<f8").tobytes()
        if args.out in (None, "-"):
            sys.stdout.buffer.write(payload)
        else:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        return
    rows = [[i] + [float(v) for v in row] for i, row in enumerate(data)]
    _write(_table_csv(["step"] + [f"cell_{j}" for j in range(args.points)], rows), args.out)


def cmd_simulate_grw(args):
    rate = amplified_rate_grw(args.n_particles, args.lam)
    psi0 = _initial_state(args.separation, args.width, args.rc)
    h = Hamiltonian.free(args.mass)
    dt = args.dt or args.t_end / args.records
    stride = max(1, int(round(args.t_end / dt / args.records)))
    trajs = run_ensemble(psi0, h, rate, args.rc, args.t_end, args.trajectories, dt=dt, seed=args.seed,
                         record_stride=stride)
    times = trajs[0].times
    mean = np.mean([t.observables["mean_position"] for t in trajs], axis=0)
    var = np.mean([t.observables["position_variance"] for t in trajs], axis=0)
    events = np.mean([t.event_counts for t in trajs], axis=0)
    rows = [[float(a), float(b), float(c), float(d)] for a, b, c, d in zip(times, mean, var, events)]
    _write(_table_csv(["time", "mean_position", "position_variance", "event_count"], rows), args.out)


def cmd_simulate_csl(args):
    params = CollapseParams(args.lam, args.rc)
    psi0 = _initial_state(args.separation, args.width, args.rc, spread_room=args.room)
    h = Hamiltonian.free(args.mass)
    n_steps = max(1, int(round(args.t_end / args.dt)))
    stride = max(1, n_steps // args.records)
    ens = run_csl_ensemble(psi0, h, params, n_steps * args.dt, args.dt, args.trajectories, seed=args.seed,
                           scheme=args.scheme, noise=args.noise, omega_c=args.omega_c, record_stride=stride)
    keys = ["mean_position", "position_variance", "energy"]
    cols = [ens.times] + [ens.mean(k) for k in keys]
    rows = [[float(v) for v in row] for row in zip(*cols)]
    _write(_table_csv(["time"] + keys, rows), args.out)


def heat_table(mass, params, durations, t_csl, e0=0.0):
    derived = derive_dissipative(DissipativeParams(params, mass, t_csl))
    rows = []
    for t in durations:
        de_white = float(heating_energy(t, e0, mass, params)) - e0
        de_diss = float(dissipative_energy(t, e0, derived)) - e0
        for model, de in (("white", de_white), ("dissipative", de_diss)):
            rows.append({"model": model, "duration_s": float(t), "delta_E_J": de,
                         "delta_T_K": de / (1.5 * K_B)})
    return rows, derived


def cmd_heat(args):
    params = CollapseParams(args.lam, args.rc)
    durations = args.duration or [YEAR]
    rows, derived = heat_table(args.mass, params, durations, args.t_csl, args.e0)
    if args.json:
        doc = {"mass_kg": args.mass, "lambda_per_s": args.lam, "r_c_m": args.rc, "t_csl_K": args.t_csl,
               "k": derived.k, "chi_per_s": derived.chi, "h_as_J": derived.h_as, "rows": rows}
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return
    lines = [f"mass={args.mass:.6e} kg  lambda={args.lam:.3e} 1/s  r_c={args.rc:.3e} m  "
             f"T_CSL={args.t_csl:g} K  (k={derived.k:.4e}, chi={derived.chi:.4e} 1/s)",
             f"{'model':<12} {'duration_s':>14} {'delta_E_J':>14} {'delta_T_K':>14}"]
    for r in rows:
        lines.append(f"{r['model']:<12} {r['duration_s']:>14.6e} {r['delta_E_J']:>14.6e} {r['delta_T_K']:>14.6e}")
    _write("\n".join(lines) + "\n", args.out)


def cmd_bounds(args):
    records = bnd.ingest_experiments(args.experiments)
    grid = bnd.default_rc_grid(args.rc_min, args.rc_max, args.rc_points)
    variant = bnd.ModelVariant(args.variant, args.t_csl, args.omega_c)
    report = bnd.build_report(records, grid, variant, include_lower_bound=not args.no_lower_bound)
    _write(report.to_csv(), args.out)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json() + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collapsesim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("noise-gen", help="emit a noise slice stream")
    n.add_argument("--kind", choices=["white", "exponential", "colored"], default="white")
    n.add_argument("--omega-c", type=float, default=None)
    n.add_argument("--dt", type=float, default=0.01)
    n.add_argument("--dx", type=float, default=0.25)
    n.add_argument("--points", type=int, default=8)
    n.add_argument("--steps", type=int, default=1000)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--increments", action="store_true", help="emit step integrals instead of slices")
    n.add_argument("--format", choices=["csv", "binary"], default="csv")
    n.add_argument("--out", default=None)
    n.set_defaults(func=cmd_noise_gen)

    s = sub.add_parser("simulate", help="run trajectory ensembles").add_subparsers(dest="model", required=True)
    g = s.add_parser("grw", help="GRW collapse of a two-packet superposition")
    g.add_argument("--lambda", dest="lam", type=float, default=1.0)
    g.add_argument("--rc", type=float, default=1.0)
    g.add_argument("--n-particles", type=int, default=1)
    g.add_argument("--separation", type=float, default=10.0)
    g.add_argument("--width", type=float, default=0.2)
    g.add_argument("--mass", type=float, default=100.0)
    g.add_argument("--t-end", type=float, default=5.0)
    g.add_argument("--dt", type=float, default=None)
    g.add_argument("--records", type=int, default=50)
    g.add_argument("--trajectories", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_simulate_grw)

    c = s.add_parser("csl", help="CSL trajectories of a free particle")
    c.add_argument("--scheme", choices=["nonlinear", "linear"], default="linear")
    c.add_argument("--noise", choices=["white", "colored"], default="white")
    c.add_argument("--omega-c", type=float, default=None)
    c.add_argument("--lambda", dest="lam", type=float, default=0.01)
    c.add_argument("--rc", type=float, default=1.0)
    c.add_argument("--mass", type=float, default=1.0)
    c.add_argument("--separation", type=float, default=0.0)
    c.add_argument("--width", type=float, default=3.0)
    c.add_argument("--room", type=float, default=16.0, help="extra box half-width for spreading")
    c.add_argument("--t-end", type=float, default=10.0)
    c.add_argument("--dt", type=float, default=0.05)
    c.add_argument("--records", type=int, default=50)
    c.add_argument("--trajectories", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_simulate_csl)

    h = sub.add_parser("heat", help="collapse-induced heating, white and dissipative")
    h.add_argument("--mass", type=float, default=M_HYDROGEN, help="kg (default: hydrogen atom)")
    h.add_argument("--lambda", dest="lam", type=float, default=1e-16)
    h.add_argument("--rc", type=float, default=1e-7)
    h.add_argument("--t-csl", type=float, default=1.0)
    h.add_argument("--duration", type=float, action="append", help="seconds; repeatable (default 1 year)")
    h.add_argument("--e0", type=float, default=0.0, help="initial energy, J")
    h.add_argument("--json", action="store_true")
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_heat)

    b = sub.add_parser("bounds", help="exclusion curves from experiment descriptors")
    b.add_argument("--experiments", required=True)
    b.add_argument("--variant", choices=["white", "dissipative", "colored"], default="white")
    b.add_argument("--t-csl", type=float, default=1.0)
    b.add_argument("--omega-c", type=float, default=float("inf"))
    b.add_argument("--rc-min", type=float, default=bnd.RC_MIN)
    b.add_argument("--rc-max", type=float, default=bnd.RC_MAX)
    b.add_argument("--rc-points", type=int, default=bnd.RC_POINTS)
    b.add_argument("--no-lower-bound", action="store_true")
    b.add_argument("--out", default=None)
    b.add_argument("--report", default=None)
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
