"""Command-line front end.

Every subcommand writes CSV artifacts plus a key=value summary file into the
output directory (flag --out, else $PULSELAB_OUT, else ./pulselab-out), and
optionally a gnuplot script referencing the CSVs relatively.  All numeric
output uses 12 significant digits; CSVs are comma-delimited with a header
row.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dichotomy as dich
from . import dynamics as dyn
from . import existence as ex
from . import sim
from . import spectrum as spec
from . import slowfield as sf
from . import terrain as terr
from .model import ModelParams, check_assumptions, derive_scales

FMT = "{:.12g}"


class UsageError(Exception):
    pass


# --- config files ------------------------------------------------------------

CONFIG_KEYS = {
    "params": {"a", "m", "D"},
    "terrain": {"kind", "A", "B", "beta", "delta"},
    "numerics": {"L", "n", "dx", "dt", "t_end", "B_lo", "B_hi", "P_lo", "P_hi",
                 "lam_max", "positions", "jobs", "mu_mode", "sample_dt"},
    "output": {"dir", "gnuplot"},
}


class RunConfig:
    """Flat key-value configuration with section headers.

    Parsing rejects unknown sections/keys; serialize() -> parse() is the
    identity on the stored content.
    """

    def __init__(self, sections=None):
        self.sections = {k: dict(v) for k, v in (sections or {}).items()}

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        sections: dict = {}
        current = None
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip()
                if current not in CONFIG_KEYS:
                    raise UsageError(f"config line {ln}: unknown section [{current}]")
                sections.setdefault(current, {})
                continue
            if "=" not in line or current is None:
                raise UsageError(f"config line {ln}: expected 'key = value' inside a section")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in CONFIG_KEYS[current]:
                raise UsageError(f"config line {ln}: unknown key {key!r} in [{current}]")
            sections[current][key] = val
        return cls(sections)

    def serialize(self) -> str:
        out = []
        for sec in sorted(self.sections):
            out.append(f"[{sec}]")
            for key in sorted(self.sections[sec]):
                out.append(f"{key} = {self.sections[sec][key]}")
            out.append("")
        return "\n".join(out)

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)


# --- helpers ------------------------------------------------------------------

def parse_terrain(spec_str: str) -> terr.Terrain:
    """Terrain from 'kind[:param...]': flat, gaussian:A:B, sech:A:B,
    cosine:A:B, lncosh:beta, scaled:<family>:delta:B."""
    parts = spec_str.split(":")
    kind = parts[0].lower()
    try:
        if kind == "flat":
            return terr.flat()
        if kind == "gaussian":
            return terr.gaussian(float(parts[1]), float(parts[2]))
        if kind == "sech":
            return terr.sech_bump(float(parts[1]), float(parts[2]))
        if kind == "cosine":
            return terr.cosine(float(parts[1]), float(parts[2]))
        if kind in ("lncosh", "ln_cosh"):
            return terr.ln_cosh(float(parts[1]))
        if kind == "scaled":
            family, delta, B = parts[1], float(parts[2]), float(parts[3])
            base = {"gaussian": terr.gaussian, "sech": terr.sech_bump,
                    "cosine": terr.cosine}[family](1.0, B)
            return terr.scaled_pair(delta, base.f, base.g,
                                    f_base_prime=base.g, g_base_prime=base.g_prime,
                                    h_base=base.h, period=base.period)
    except (IndexError, ValueError, KeyError) as exc:
        raise UsageError(f"bad terrain spec {spec_str!r}: {exc}") from exc
    raise UsageError(f"unknown terrain kind {kind!r}")


def out_dir(args) -> Path:
    d = args.out or os.environ.get("PULSELAB_OUT") or "pulselab-out"
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def write_csv(path: Path, header: list, columns: list) -> None:
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FMT.format(v) for v in row) + "\n")


def write_summary(path: Path, items: dict) -> None:
    with open(path, "w") as fh:
        for key, val in items.items():
            if isinstance(val, float):
                fh.write(f"{key} = {FMT.format(val)}\n")
            else:
                fh.write(f"{key} = {val}\n")


def write_gnuplot(path: Path, lines: list) -> None:
    with open(path, "w") as fh:
        fh.write("set datafile separator ','\nset key autotitle columnhead\n")
        fh.write("\n".join(lines) + "\n")


def params_from(args) -> ModelParams:
    return ModelParams(a=args.a, m=args.m, D=args.D)


# --- subcommands ----------------------------------------------------------------

def cmd_check(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    rep = check_assumptions(p, t)
    s = derive_scales(p)
    d = out_dir(args)
    write_summary(d / "check_summary.txt", {
        "terrain": t.label(),
        "epsilon": s.epsilon, "mu": s.mu, "tau": s.tau, "nu": s.nu,
        "a1_small_epsilon": rep.a1_small_epsilon,
        "a2_symmetry": rep.a2_symmetry,
        "a3_delta_below_quarter": rep.a3_delta_below_quarter,
        "a4_farfield_decay": rep.a4_farfield_decay,
        "a5_bounded_coefficients": rep.a5_bounded_coefficients,
        "delta": rep.delta,
        "symmetry_residual_f": rep.symmetry_residual_f,
        "symmetry_residual_g": rep.symmetry_residual_g,
        "farfield_level": rep.farfield_level,
        "sup_f": rep.sup_f, "sup_g": rep.sup_g,
    })
    print(f"wrote {d / 'check_summary.txt'}")
    return 0


def cmd_dichotomy_bounds(args) -> int:
    t = parse_terrain(args.terrain)
    delta = terr.terrain_delta(t)
    d = out_dir(args)
    items = {"terrain": t.label(), "delta": delta}
    try:
        consts = dich.roughness_constants(1.0, 1.0, delta)
        si = dich.slope_interval(delta, -1.0)
        items.update({
            "K": consts.K, "rho": consts.rho,
            "projection_distance": dich.projection_distance_bound(1.0, 1.0, delta),
            "projection_vector": dich.projection_vector_closeness(delta),
            "background_distance": dich.bounded_solution_distance_bound(consts, 1.0),
            "slope_C_min": "unbounded" if si.min_unbounded else si.C_min,
            "slope_C_max": "unbounded" if si.max_unbounded else si.C_max,
            "slope_disjoint": si.disjoint,
        })
    except dich.DichotomyError as exc:
        items["error"] = str(exc)
    write_summary(d / "dichotomy_summary.txt", items)
    print(f"wrote {d / 'dichotomy_summary.txt'}")
    return 0


def cmd_slowfield(args) -> int:
    t = parse_terrain(args.terrain)
    sol = sf.solve_slow_field(t, L=args.L, n=args.n)
    d = out_dir(args)
    if sol.u_plus is None:
        write_csv(d / "slowfield.csv", ["x", "u_b", "p_b"],
                  [sol.x, sol.u_b, sol.p_b])
        items = {"terrain": t.label(), "u_b0": sol.u_b0, "periodic": True}
    else:
        up = np.interp(sol.x, sol.x_plus, sol.u_plus, left=math.nan)
        um = np.interp(sol.x, sol.x_minus, sol.u_minus, right=math.nan)
        up[sol.x < 0] = math.nan
        um[sol.x > 0] = math.nan
        write_csv(d / "slowfield.csv", ["x", "u_b", "p_b", "u_plus", "u_minus"],
                  [sol.x, sol.u_b, sol.p_b, up, um])
        items = {"terrain": t.label(), "u_b0": sol.u_b0,
                 "Cs0": sol.Cs0, "Cu0": sol.Cu0}
    write_summary(d / "slowfield_summary.txt", items)
    if args.gnuplot:
        write_gnuplot(d / "slowfield.gp", [
            "plot 'slowfield.csv' using 1:2 with lines title 'u_b'"])
    print(f"wrote {d / 'slowfield.csv'}")
    return 0


def cmd_construct_pulse(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    profile = ex.assemble_profile(t, p, branch=args.branch)
    d = out_dir(args)
    write_csv(d / "pulse_fast.csv", ["xi", "u", "p", "v", "q"],
              [profile.xi, profile.u, profile.p, profile.v, profile.q])
    write_csv(d / "pulse_slow.csv", ["x", "u", "p"],
              [profile.x_slow, profile.u_slow, profile.p_slow])
    X, U, V = profile.physical_fields(p)
    write_csv(d / "pulse_physical.csv", ["x", "U", "V"], [X, U, V])
    rep = ex.existence_check(t, p)
    write_summary(d / "pulse_summary.txt", {
        "terrain": t.label(), "branch": profile.branch,
        "u0": profile.u0,
        "u0_minus": rep.amplitudes.u0_minus if rep.amplitudes.u0_minus else math.nan,
        "u0_plus": rep.amplitudes.u0_plus if rep.amplitudes.u0_plus else math.nan,
        "u_b0": rep.u_b0, "Cs0": rep.Cs0, "mu": rep.mu,
        "exists": rep.exists,
    })
    if args.gnuplot:
        write_gnuplot(d / "pulse.gp", [
            "plot 'pulse_physical.csv' using 1:2 with lines title 'U',"
            " 'pulse_physical.csv' using 1:3 with lines title 'V'"])
    print(f"wrote {d / 'pulse_physical.csv'}")
    return 0


def cmd_spectrum(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    scales = derive_scales(p)
    rep_ex = ex.existence_check(t, p)
    if not rep_ex.exists:
        print("no pulse exists for these parameters", file=sys.stderr)
        return 1
    u0 = rep_ex.amplitudes.branch(args.branch)
    terrain_arg = None if t.kind == "flat" else t
    roots = spec.find_large_eigs(u0, scales.mu, p.m, terrain_arg,
                                 lam_max=args.lam_max)
    d = out_dir(args)
    lam_grid = np.linspace(-0.95, args.lam_max, 241)
    rows = []
    for lv in lam_grid:
        r = spec.eval_R(lv)
        if r.near_pole:
            continue
        t22 = spec.nlep_residual(lv, u0, scales.mu, p.m, terrain_arg)
        rows.append((lv, 0.0, r.R.real, r.R.imag, t22.real, t22.imag))
    arr = np.asarray(rows)
    write_csv(d / "spectrum_scan.csv",
              ["lam_re", "lam_im", "R_re", "R_im", "t22_re", "t22_im"],
              [arr[:, k] for k in range(6)])
    pts = spec.skeleton_points(p.m, n_grid=args.grid)
    if pts.size:
        write_csv(d / "skeleton.csv", ["lam_re", "lam_im"], [pts[:, 0], pts[:, 1]])
    write_summary(d / "spectrum_summary.txt", {
        "terrain": t.label(), "branch": args.branch, "u0": u0,
        "essential_sup_unscaled": spec.essential_spectrum(p.m),
        "reduced_eigs": " ".join(FMT.format(v) for v in spec.reduced_operator_eigs()),
        "large_roots_scaled": " ".join(FMT.format(v) for v in roots) or "none",
        "delta_c": spec.delta_c_stability(),
    })
    if args.gnuplot:
        write_gnuplot(d / "spectrum.gp", [
            "plot 'spectrum_scan.csv' using 1:5 with lines title 't22'",
            "pause -1"])
    print(f"wrote {d / 'spectrum_summary.txt'}")
    return 0


def cmd_small_eig(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    scales = derive_scales(p)
    if t.delta_scale is None or t.h_base is None:
        print("small-eig needs a scaled:<family>:delta:B terrain", file=sys.stderr)
        return 1
    rep_ex = ex.existence_check(t, p)
    if not rep_ex.exists:
        print("no pulse exists for these parameters", file=sys.stderr)
        return 1
    u0 = rep_ex.amplitudes.branch("minus")
    lam_gen = spec.small_eig_general(t.delta_scale, t.f_base_prime, t.g_base_prime,
                                     u0, scales.mu, scales.tau)
    lam_dl = spec.small_eig_double_limit(t.delta_scale, t.f_base_prime,
                                         t.g_base_prime, scales.tau)
    h2_0 = float(t.g_base(np.array([0.0]))[0])
    lam_h = spec.small_eig_height(t.delta_scale, lambda x: t.h_base(np.asarray([x]))[0],
                                  h2_0, u0, scales.mu, scales.tau)
    d = out_dir(args)
    write_summary(d / "small_eig_summary.txt", {
        "terrain": t.label(), "u0": u0,
        "small_eig_general": lam_gen,
        "small_eig_double_limit": lam_dl,
        "small_eig_height_form": lam_h,
    })
    print(f"wrote {d / 'small_eig_summary.txt'}")
    return 0


def cmd_pulse_ode(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    scales = derive_scales(p)
    P0 = [float(s) for s in args.positions.split(",")]
    mu = scales.mu if args.mu_mode == "finite" else 0.0
    traj = dyn.integrate_pulse_ode(t, P0, args.t_end, scales.tau, mu=mu, L=args.L)
    d = out_dir(args)
    cols = [traj.t] + [traj.P[:, j] for j in range(traj.P.shape[1])]
    write_csv(d / "pulse_ode.csv",
              ["t"] + [f"P{j + 1}" for j in range(traj.P.shape[1])], cols)
    write_summary(d / "pulse_ode_summary.txt", {
        "terrain": t.label(), "tau": scales.tau, "mu_mode": args.mu_mode,
        "collided": traj.collided,
        "final_positions": " ".join(FMT.format(v) for v in traj.P[-1]),
    })
    if args.gnuplot:
        write_gnuplot(d / "pulse_ode.gp",
                      ["plot 'pulse_ode.csv' using 1:2 with lines title 'P1'"])
    print(f"wrote {d / 'pulse_ode.csv'}")
    return 0


def cmd_fixed_points(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    scales = derive_scales(p)
    mu = scales.mu if args.mu_mode == "finite" else 0.0
    roots = dyn.find_fixed_points(t, (args.P_lo, args.P_hi), scales.tau, mu=mu,
                                  L=args.L)
    d = out_dir(args)
    items = {"terrain": t.label(),
             "fixed_points": " ".join(FMT.format(v) for v in roots) or "none"}
    if mu == 0.0:
        for j, r in enumerate(roots):
            try:
                items[f"eigenvalue_{j}"] = dyn.fixed_point_eigenvalue(
                    t, r, scales.tau, L=args.L)
            except (ValueError, sf.SolverError) as exc:
                items[f"eigenvalue_{j}"] = f"error: {exc}"
    write_summary(d / "fixed_points_summary.txt", items)
    print(f"wrote {d / 'fixed_points_summary.txt'}")
    return 0


def cmd_bifurcate(args) -> int:
    p = params_from(args)
    scales = derive_scales(p)
    res = dyn.continue_bifurcation(args.family, args.A, args.B_lo, args.B_hi,
                                   scales.tau)
    d = out_dir(args)
    # stability map over the B range, parallelizable across B values
    from . import terrain as _t
    make = {"gaussian": _t.gaussian, "sech": _t.sech_bump, "cosine": _t.cosine}[args.family]
    Bs = np.linspace(args.B_lo, args.B_hi, args.n_B)

    def lam_at(B: float) -> float:
        return dyn.fixed_point_eigenvalue(make(args.A, B), 0.0, scales.tau,
                                          check_fixed=False)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            lams = list(pool.map(lam_at, Bs))
    else:
        lams = [lam_at(B) for B in Bs]
    # rows: centered rest point over the whole sweep, then branch points
    rows_B = list(Bs) + list(res.branch_B) + list(res.branch_B)
    rows_P = [0.0] * len(Bs) + list(res.branch_P) + list(-res.branch_P)
    rows_s = [1.0 if l < 0 else 0.0 for l in lams] + [1.0] * (2 * len(res.branch_B))
    write_csv(d / "bifurcation.csv", ["B", "P_star", "stable"],
              [rows_B, rows_P, rows_s])
    write_csv(d / "bifurcation_center_eigs.csv", ["B", "eigenvalue"], [Bs, lams])
    write_summary(d / "bifurcate_summary.txt", {
        "family": args.family, "A": args.A,
        "B_c": res.B_c if res.B_c is not None else "not found",
    })
    if args.gnuplot:
        write_gnuplot(d / "bifurcate.gp", [
            "plot 'bifurcation.csv' using 1:2 with points title 'rest positions'",
        ])
    print(f"wrote {d / 'bifurcate_summary.txt'}")
    return 0


def cmd_two_pulse(args) -> int:
    P_star = dyn.two_pulse_position(args.beta)
    d = out_dir(args)
    Ps = np.linspace(0.0, max(4.0, 3 * P_star), 161)
    Ts = [dyn.two_pulse_T(P, args.beta) for P in Ps]
    write_csv(d / "two_pulse.csv", ["P", "T"], [Ps, Ts])
    write_summary(d / "two_pulse_summary.txt",
                  {"beta": args.beta, "P_star": P_star})
    print(f"wrote {d / 'two_pulse_summary.txt'} (P* = {FMT.format(P_star)})")
    return 0


def cmd_simulate(args) -> int:
    t = parse_terrain(args.terrain)
    p = params_from(args)
    dx = args.dx if args.dx else sim.default_dx(p)
    n = int(round(2 * args.L / dx)) + 1
    x = np.linspace(-args.L, args.L, n)
    P0 = [float(s) for s in args.positions.split(",")]
    state = sim.seed_pulse(p, x, P0)
    d = out_dir(args)
    hook = None
    if args.snapshots:
        counter = [0]

        def hook(st):
            write_csv(d / f"snapshot_{counter[0]:04d}.csv", ["x", "U", "V"],
                      [st.x, st.U, st.V])
            counter[0] += 1

    rec = sim.run(p, t, state, args.t_end, sample_dt=args.sample_dt,
                  dt=args.dt, mode=args.mode, snapshot_hook=hook)
    write_csv(d / "final_state.csv", ["x", "U", "V"],
              [rec.state.x, rec.state.U, rec.state.V])
    nmax = max((len(tr) for tr in rec.tracks), default=0)
    cols = [rec.times]
    for j in range(nmax):
        cols.append([tr[j] if j < len(tr) else math.nan for tr in rec.tracks])
    write_csv(d / "pulse_tracks.csv",
              ["t"] + [f"P{j + 1}" for j in range(nmax)], cols)
    rU, rV = sim.discrete_residuals(rec.state, p, t)
    write_summary(d / "simulate_summary.txt", {
        "terrain": t.label(), "mode": args.mode, "dt": rec.dt,
        "t_final": rec.state.t, "steady": rec.steady,
        "max_dudt": rec.max_dudt,
        "final_positions": " ".join(FMT.format(v) for v in rec.tracks[-1]) or "none",
        "V_max": float(np.max(rec.state.V)),
        "stationary_residual_U": float(np.max(np.abs(rU))),
        "stationary_residual_V": float(np.max(np.abs(rV))),
        "clipped_nodes": rec.state.clip_count,
    })
    if args.gnuplot:
        write_gnuplot(d / "simulate.gp", [
            "plot 'final_state.csv' using 1:3 with lines title 'V'",
            "replot 'final_state.csv' using 1:2 with lines title 'U'",
        ])
    print(f"wrote {d / 'simulate_summary.txt'}")
    return 0


# --- argument parsing ----------------------------------------------------------

def _add_common(sp, params=True, terrain=True):
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--gnuplot", action="store_true", help="emit gnuplot scripts")
    sp.add_argument("--config", default=None, help="config file with defaults")
    if params:
        sp.add_argument("--a", type=float, default=0.5)
        sp.add_argument("--m", type=float, default=0.45)
        sp.add_argument("--D", type=float, default=0.01)
    if terrain:
        sp.add_argument("--terrain", default="flat")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pulselab",
                                 description="stationary and moving pulses on varying terrain")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="assumption report for a terrain/parameter set")
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("dichotomy-bounds", help="perturbation bounds for a terrain")
    _add_common(sp, params=False)
    sp.set_defaults(func=cmd_dichotomy_bounds)

    sp = sub.add_parser("slowfield", help="background and decaying slow-field solutions")
    _add_common(sp, params=False)
    sp.add_argument("--L", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.set_defaults(func=cmd_slowfield)

    sp = sub.add_parser("construct-pulse", help="leading-order pulse profile")
    _add_common(sp)
    sp.add_argument("--branch", choices=("minus", "plus"), default="minus")
    sp.set_defaults(func=cmd_construct_pulse)

    sp = sub.add_parser("spectrum", help="essential spectrum, R scan, large-eigenvalue roots")
    _add_common(sp)
    sp.add_argument("--branch", choices=("minus", "plus"), default="minus")
    sp.add_argument("--lam-max", dest="lam_max", type=float, default=2.0)
    sp.add_argument("--grid", type=int, default=121, help="skeleton grid per axis")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("small-eig", help="drift eigenvalue of a scaled terrain pair")
    _add_common(sp)
    sp.set_defaults(func=cmd_small_eig)

    sp = sub.add_parser("pulse-ode", help="integrate the pulse-location system")
    _add_common(sp)
    sp.add_argument("--positions", default="0.3")
    sp.add_argument("--t-end", dest="t_end", type=float, default=500.0)
    sp.add_argument("--L", type=float, default=20.0)
    sp.add_argument("--mu-mode", dest="mu_mode", choices=("limit", "finite"),
                    default="limit")
    sp.set_defaults(func=cmd_pulse_ode)

    sp = sub.add_parser("fixed-points", help="rest positions of a single pulse")
    _add_common(sp)
    sp.add_argument("--P-lo", dest="P_lo", type=float, default=-3.0)
    sp.add_argument("--P-hi", dest="P_hi", type=float, default=3.0)
    sp.add_argument("--L", type=float, default=20.0)
    sp.add_argument("--mu-mode", dest="mu_mode", choices=("limit", "finite"),
                    default="limit")
    sp.set_defaults(func=cmd_fixed_points)

    sp = sub.add_parser("bifurcate", help="critical curvature and branch tracking")
    _add_common(sp, terrain=False)
    sp.add_argument("--family", choices=("gaussian", "sech", "cosine"),
                    default="gaussian")
    sp.add_argument("--A", type=float, default=1.0)
    sp.add_argument("--B-lo", dest="B_lo", type=float, default=0.1)
    sp.add_argument("--B-hi", dest="B_hi", type=float, default=2.0)
    sp.add_argument("--n-B", dest="n_B", type=int, default=25)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_bifurcate)

    sp = sub.add_parser("two-pulse", help="symmetric pulse-pair rest separation")
    _add_common(sp, params=False, terrain=False)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.set_defaults(func=cmd_two_pulse)

    sp = sub.add_parser("simulate", help="direct PDE run")
    _add_common(sp)
    sp.add_argument("--L", type=float, default=30.0)
    sp.add_argument("--dx", type=float, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--t-end", dest="t_end", type=float, default=100.0)
    sp.add_argument("--sample-dt", dest="sample_dt", type=float, default=10.0)
    sp.add_argument("--positions", default="0.0")
    sp.add_argument("--mode", choices=("semi-implicit", "explicit"),
                    default="semi-implicit")
    sp.add_argument("--snapshots", action="store_true",
                    help="write snapshot_NNNN.csv at every sample time")
    sp.set_defaults(func=cmd_simulate)
    return ap


def apply_config(args) -> None:
    """Fill argument defaults from a config file (command line wins)."""
    if not getattr(args, "config", None):
        return
    cfg = RunConfig.parse(Path(args.config).read_text())
    mapping = {
        ("params", "a"): ("a", float), ("params", "m"): ("m", float),
        ("params", "D"): ("D", float),
        ("numerics", "L"): ("L", float), ("numerics", "n"): ("n", int),
        ("numerics", "dx"): ("dx", float), ("numerics", "dt"): ("dt", float),
        ("numerics", "t_end"): ("t_end", float),
        ("numerics", "positions"): ("positions", str),
        ("numerics", "jobs"): ("jobs", int),
        ("output", "dir"): ("out", str),
    }
    for (sec, key), (attr, conv) in mapping.items():
        val = cfg.get(sec, key)
        if val is not None and hasattr(args, attr) and \
                build_parser().get_default(attr) == getattr(args, attr):
            setattr(args, attr, conv(val))
    kind = cfg.get("terrain", "kind")
    if kind and hasattr(args, "terrain") and args.terrain == "flat":
        parts = [kind]
        for key in ("A", "B", "beta", "delta"):
            v = cfg.get("terrain", key)
            if v is not None:
                parts.append(v)
        args.terrain = ":".join(parts)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        apply_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(ap.format_usage(), file=sys.stderr, end="")
        return 2
    except (ex.PulseConstructionError, sf.SolverError, dich.DichotomyError,
            sim.SimulationError, ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
