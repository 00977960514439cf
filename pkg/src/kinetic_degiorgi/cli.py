"""Kinetic De Giorgi and Harnack toolkit: command-line entry point.

``kinetic-dg <subcommand> --config run.ini --out DIR [--seed N]``. Exit status
0 on success, 2 on a validation error, 3 when a numerical check fails.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from . import __version__, degiorgi, ellipticity, harnack, kolmogorov
from .geometry import KineticPoint, make_cylinder
from .kernels import (GridField, VelocityGrid, ball_density, boltzmann_kernel, fractional_laplacian,
                      maxwellian_density)
from .serialization import canonical_dumps, make_report, write_field_csv, write_report

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    type: type
    default: object
    doc: str
    check: Optional[Callable] = None
    rule: str = ""


def _pos(x):
    return x > 0


def _unit(x):
    return 0 < x < 1


SCHEMA = {
    "model": {
        "d": Key(int, 1, "velocity and space dimension", lambda x: x in (1, 2, 3), "1, 2 or 3"),
        "s": Key(float, 0.5, "fractional order", _unit, "in (0, 1)"),
        "lambda": Key(float, 1.0, "coercivity constant", _pos, "positive"),
        "Lambda": Key(float, 4.0, "upper-bound constant", _pos, "positive"),
        "Rbar": Key(float, 2.0, "ellipticity radius", _pos, "positive"),
        "kernel": Key(str, "fractional_laplacian", "kernel family",
                      lambda x: x in ("fractional_laplacian", "boltzmann"), "fractional_laplacian or boltzmann"),
        "gamma": Key(float, 0.0, "Boltzmann hard/soft potential exponent"),
    },
    "grid": {
        "Lx": Key(float, 16.0, "periodic x-box length", _pos, "positive"),
        "Lv": Key(float, 16.0, "periodic v-box length", _pos, "positive"),
        "Nx": Key(int, 64, "nodes per x axis", lambda x: x >= 4 and x % 2 == 0, "even and >= 4"),
        "Nv": Key(int, 64, "nodes per v axis", lambda x: x >= 4 and x % 2 == 0, "even and >= 4"),
        "t0": Key(float, 0.0, "initial time"),
        "dt": Key(float, 0.005, "output time step", _pos, "positive"),
        "steps": Key(int, 200, "number of output steps", lambda x: x >= 1, ">= 1"),
        "n_tau": Key(int, 8, "Gauss nodes for the symbol's time integral", lambda x: x >= 2, ">= 2"),
    },
    "initial": {
        "kind": Key(str, "gaussian", "shape of the initial data", lambda x: x in ("gaussian", "bumps"), "gaussian or bumps"),
        "amplitude": Key(float, 1.0, "peak value", lambda x: x >= 0, "nonnegative"),
        "width": Key(float, 1.0, "Gaussian width", _pos, "positive"),
        "n_bumps": Key(int, 3, "bump count for kind=bumps", lambda x: x >= 1, ">= 1"),
        "background": Key(float, 0.0, "constant added to the data", lambda x: x >= 0, "nonnegative"),
    },
    "source": {
        "h1": Key(float, 0.0, "amplitude of a Gaussian source h1", lambda x: x >= 0, "nonnegative"),
    },
    "fundamental": {
        "t": Key(float, 1.0, "time of the fundamental solution", _pos, "positive"),
    },
    "degiorgi": {
        "r0": Key(float, 0.3, "IVL scale", lambda x: 0 < x < 1 / 3, "in (0, 1/3)"),
        "p": Key(float, 2.5, "integrability exponent", lambda x: x > 2, "> 2"),
        "sigma": Key(float, 0.1, "x-regularity exponent", _pos, "positive"),
        "eps": Key(float, 1e-3, "L2 smallness for the first lemma", _pos, "positive"),
        "r_inner": Key(float, 0.5, "inner cylinder radius", _pos, "positive"),
        "r_outer": Key(float, 0.9, "outer cylinder radius", lambda x: 0 < x <= 1, "in (0, 1]"),
        "k_max": Key(int, 8, "iteration depth", lambda x: x >= 1, ">= 1"),
        "delta1": Key(float, 0.5, "IVL lower density", lambda x: 0 < x <= 1, "in (0, 1]"),
        "delta2": Key(float, 0.5, "IVL upper density", lambda x: 0 < x <= 1, "in (0, 1]"),
        "C": Key(float, 1.0, "unspecified constant in the lemma chain", _pos, "positive"),
    },
    "harnack": {
        "r0": Key(float, 0.3, "Harnack scale", lambda x: 0 < x < 1 / 3, "in (0, 1/3)"),
        "m": Key(float, 0.0, "covering multiplier (0 means 5^{1/(2s)})", lambda x: x == 0 or x >= 3, "0 or >= 3"),
        "n_cov": Key(int, 1, "covering time-gap integer", lambda x: x >= 1, ">= 1"),
        "delta0": Key(float, 0.1, "covering density threshold", _unit, "in (0, 1)"),
        "k_max": Key(int, 6, "covering depth", lambda x: x >= 1, ">= 1"),
        "level": Key(float, 0.5, "level set for the covering", lambda x: x >= 0, "nonnegative"),
        "hoelder_r0": Key(float, 0.5, "scale ratio for oscillations", _unit, "in (0, 1)"),
        "n_scales": Key(int, 4, "oscillation scales", lambda x: x >= 3, ">= 3"),
        "delta": Key(float, 0.5, "measure-to-pointwise density", _unit, "in (0, 1)"),
    },
    "surrogate": {
        "theta": Key(float, 0.2, "surrogate theta", lambda x: 0 < x <= 2, "in (0, 2]"),
        "zeta": Key(float, 0.5, "surrogate zeta", lambda x: 0 < x <= 1, "in (0, 1]"),
        "M": Key(float, 2.0, "surrogate M", _pos, "positive"),
    },
}


def schema_help() -> str:
    lines = ["configuration keys (INI sections; unknown keys are errors):"]
    for sec, keys in SCHEMA.items():
        lines.append(f"  [{sec}]")
        for name, k in keys.items():
            rule = f"; {k.rule}" if k.rule else ""
            lines.append(f"    {name} = {k.default!r}  ({k.type.__name__}{rule}) {k.doc}")
    return "\n".join(lines)


def _coerce(sec: str, name: str, raw: str):
    k = SCHEMA[sec][name]
    try:
        if k.type is int:
            val = int(raw)
        elif k.type is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
        else:
            val = raw.strip()
    except ValueError:
        raise ConfigError(f"{sec}.{name}: cannot parse {raw!r} as {k.type.__name__}") from None
    return val


def _read_ini(path, sections=None) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    out = {}
    for sec in cp.sections():
        if sec not in SCHEMA or (sections is not None and sec not in sections):
            allowed = "" if sections is None else f" (allowed: {', '.join(sections)})"
            raise ConfigError(f"unknown section [{sec}] in {path}{allowed}")
        for name, raw in cp.items(sec):
            if name not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{name}")
            out.setdefault(sec, {})[name] = _coerce(sec, name, raw)
    return out


def load_config(path=None, surrogate=None) -> dict:
    """Resolved config: defaults overlaid with the file and the surrogate file."""
    cfg = {sec: {n: k.default for n, k in keys.items()} for sec, keys in SCHEMA.items()}
    if path is not None:
        for sec, vals in _read_ini(path).items():
            cfg[sec].update(vals)
    if surrogate is not None:
        for sec, vals in _read_ini(surrogate, sections=("surrogate",)).items():
            cfg[sec].update(vals)
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    for sec, keys in SCHEMA.items():
        for name, k in keys.items():
            val = cfg[sec][name]
            if k.check is not None and not k.check(val):
                raise ConfigError(f"{sec}.{name} must be {k.rule} (got {val!r})")
    m, g, dg = cfg["model"], cfg["grid"], cfg["degiorgi"]
    if m["lambda"] > m["Lambda"]:
        raise ConfigError("model.lambda must not exceed model.Lambda")
    if m["kernel"] == "boltzmann":
        if m["d"] < 2:
            raise ConfigError("model.kernel = boltzmann needs model.d >= 2")
        if not -m["d"] < m["gamma"] <= 1 or m["gamma"] + 2 * m["s"] > 2:
            raise ConfigError("model.gamma must lie in (-d, 1] with gamma + 2s <= 2")
    try:
        kolmogorov.check_p(dg["p"], m["d"], m["s"])
    except ValueError as exc:
        raise ConfigError(f"degiorgi.p: {exc}") from None
    try:
        kolmogorov.check_sigma(dg["sigma"], m["s"])
    except ValueError as exc:
        raise ConfigError(f"degiorgi.sigma: {exc}") from None
    if not dg["r_inner"] < dg["r_outer"]:
        raise ConfigError("degiorgi.r_inner must be smaller than degiorgi.r_outer")
    hk = cfg["harnack"]
    if not harnack.n_cov_feasible(hk["n_cov"], m["s"], hk["k_max"] + 1):
        raise ConfigError(f"harnack.n_cov = {hk['n_cov']} violates the time-gap inequality; "
                          f"need at least {harnack.min_n_cov(m['s'], hk['k_max'] + 1)}")


# ------------------------------------------------------------------ building

def _phase_grid(cfg: dict, level: int = 0) -> kolmogorov.PhaseGrid:
    g, d = cfg["grid"], cfg["model"]["d"]
    return kolmogorov.PhaseGrid(d, g["Lx"], g["Lv"], g["Nx"] * 2**level, g["Nv"] * 2**level)


def _times(cfg: dict) -> np.ndarray:
    g = cfg["grid"]
    return g["t0"] + g["dt"] * np.arange(g["steps"] + 1)


def _initial(cfg: dict, grid: kolmogorov.PhaseGrid, seed: int) -> np.ndarray:
    ini = cfg["initial"]
    C = grid.coords()
    d = grid.d
    X, V = C[:d], C[d:]
    w = ini["width"]
    if ini["kind"] == "gaussian":
        r2 = sum(x * x for x in X) + sum(v * v for v in V)
        f0 = ini["amplitude"] * np.exp(-r2 / (2 * w * w))
    else:
        sob = qmc.Sobol(2 * d + 1, scramble=True, seed=seed)
        u = sob.random(max(2, 1 << math.ceil(math.log2(ini["n_bumps"]))))[: ini["n_bumps"]]
        f0 = np.zeros(grid.shape)
        for row in u:
            a = ini["amplitude"] * (0.25 + 0.75 * row[0])
            xc = (row[1:1 + d] - 0.5) * grid.Lx / 4
            vc = (row[1 + d:] - 0.5) * grid.Lv / 4
            r2 = sum((x - c) ** 2 for x, c in zip(X, xc)) + sum((v - c) ** 2 for v, c in zip(V, vc))
            f0 = f0 + a * np.exp(-r2 / (2 * w * w))
    return np.broadcast_to(f0 + ini["background"], grid.shape).copy()


def _source(cfg: dict, grid) -> Optional[kolmogorov.SourceDecomposition]:
    a = cfg["source"]["h1"]
    if a == 0:
        return None
    C = grid.coords()
    r2 = sum(c * c for c in C)
    return kolmogorov.SourceDecomposition(h1=np.broadcast_to(a * np.exp(-r2 / 2), grid.shape).copy())


def _solve(cfg: dict, seed: int, level: int = 0) -> tuple[GridField, Optional[np.ndarray]]:
    grid = _phase_grid(cfg, level)
    times = _times(cfg)
    src = _source(cfg, grid)
    f = kolmogorov.solve_kolmogorov(grid, cfg["model"]["s"], _initial(cfg, grid, seed), times, src,
                                    t0=cfg["grid"]["t0"], max_step=cfg["grid"]["dt"],
                                    n_tau=cfg["grid"]["n_tau"])
    return f, (src.h1 if src is not None else None)


def _kernel(cfg: dict):
    m = cfg["model"]
    kw = dict(lam=m["lambda"], Lam=m["Lambda"], Rbar=m["Rbar"])
    if m["kernel"] == "fractional_laplacian":
        return fractional_laplacian(m["s"], m["d"], **kw), None
    vg = VelocityGrid.cube(m["d"], m["Rbar"] * 2, cfg["grid"]["Nv"])
    return boltzmann_kernel(m["s"], m["d"], m["gamma"], vg, maxwellian_density(vg), **kw), vg


def _shift_to_origin(f: GridField) -> GridField:
    """Relabel times so the last sample sits at t = 0."""
    return GridField(f.t - f.t[-1], f.x_axes, f.v_axes, f.values, f.far_field_v, f.x_periodic, f.nonnegative)


# --------------------------------------------------------------- subcommands

def cmd_check_kernel(cfg: dict, seed: int, out: Path, level: int = 0):
    K, vg = _kernel(cfg)
    m = cfg["model"]
    d = m["d"]
    if vg is None:
        vg = VelocityGrid.cube(d, m["Rbar"], min(cfg["grid"]["Nv"] * 2**level, 64 if d == 1 else 16))
    pts = vg.points()
    r2 = np.sum(pts**2, axis=-1)
    R = m["Rbar"] / 2
    tfs = [("bump", np.where(r2 < R * R, (1 - r2 / (R * R)) ** 2, 0.0)),
           ("narrow", np.where(r2 < (R / 2) ** 2, (1 - 4 * r2 / (R * R)) ** 2, 0.0))]
    sob = qmc.Sobol(d, scramble=True, seed=seed)
    vs = [np.zeros(d)] + list((sob.random(4) - 0.5) * m["Rbar"])
    radii = [0.1, 0.25, 0.5]
    payload = {}
    if K.radial:
        rep = ellipticity.check_ellipticity(K, vg, tfs, radii, v_samples=vs)
        payload["compliance"] = rep.to_dict()
        payload["analytic"] = ellipticity.fractional_laplacian_constants(d, m["s"])
        ok = rep.passed
    else:
        cone = ellipticity.cone_lower_bound(K, vs, m["lambda"] * 1e-3)
        payload["cone"] = cone.to_dict()
        ok = not cone.inconclusive
    return payload, [], ok, float(ok)


def cmd_fundamental(cfg: dict, seed: int, out: Path, level: int = 0):
    grid = _phase_grid(cfg, level)
    s, t = cfg["model"]["s"], cfg["fundamental"]["t"]
    try:
        J = kolmogorov.fundamental_solution(s, t, grid, cfg["grid"]["n_tau"])
    except ValueError as exc:
        raise ConfigError(f"fundamental.t / grid: {exc}") from None
    field = grid.field(J.values[None], t=(t,))
    files = []
    if level == 0:
        files = [str(p.name) for p in write_field_csv(out / "fundamental_solution", field)]
    payload = {"s": s, "t": t, "grid": {"d": grid.d, "Lx": grid.Lx, "Lv": grid.Lv, "Nx": grid.Nx, "Nv": grid.Nv},
               "mass": J.mass(), "l2": J.lr_norm(2.0), "l1": J.lr_norm(1.0), "min_ratio": J.min_ratio(),
               "resolved": J.min_ratio() >= -1e-3}
    ok = abs(J.mass() - 1) <= 1e-9
    return payload, files, ok, J.lr_norm(2.0)


def cmd_solve(cfg: dict, seed: int, out: Path, level: int = 0):
    f, _ = _solve(cfg, seed, level)
    cell = float(np.prod(f.dx) * np.prod(f.dv))
    mass = f.values.reshape(f.t.size, -1).sum(axis=1) * cell
    files = []
    if level == 0:
        files = [str(p.name) for p in write_field_csv(out / "solution", f)]
    vmax = float(f.values.max())
    payload = {"times": f.t.tolist(), "mass": mass.tolist(), "min": float(f.values.min()), "max": vmax,
               "mass_drift": float(abs(mass[-1] - mass[0]) / abs(mass[0])) if mass[0] else 0.0}
    ok = cfg["source"]["h1"] > 0 or payload["mass_drift"] <= 1e-6
    return payload, files, ok, payload["mass_drift"]


def _unit_field(cfg: dict, seed: int, level: int) -> tuple[GridField, Optional[np.ndarray]]:
    f, h = _solve(cfg, seed, level)
    f = _shift_to_origin(f)
    top = float(f.values.max())
    if top > 1:
        f = f.with_values(f.values / top)
        h = None if h is None else h / top
    return f, h


def cmd_degiorgi(cfg: dict, seed: int, out: Path, level: int = 0):
    dg, s = cfg["degiorgi"], cfg["model"]["s"]
    K, _ = _kernel(cfg)
    f, h = _unit_field(cfg, seed, level)
    o = KineticPoint.origin(f.d)
    inner = make_cylinder(o, dg["r_inner"], s)
    outer = make_cylinder(o, dg["r_outer"], s)
    payload = {"energy": degiorgi.energy_balance(K, f, h, inner, outer).to_dict(),
               "gain": degiorgi.integrability_gain(K, f, h, inner, outer, dg["p"], dg["sigma"]).to_dict(),
               "constants": degiorgi.paper_constants(f.d, s, dg["p"], dg["delta1"], dg["delta2"],
                                                     sigma=dg["sigma"], C=dg["C"]).to_dict()}
    try:
        fl = degiorgi.first_lemma(K, f, h, inner, outer, dg["p"], dg["eps"], dg["k_max"], dg["C"])
    except ValueError as exc:
        payload["first_lemma"] = {"precondition": str(exc)}
        return payload, [], True, payload["energy"]["ratio"]
    payload["first_lemma"] = fl.to_dict()
    ok = fl.converged and all(c[2] for c in fl.chebyshev) and fl.nested
    return payload, [], ok, payload["energy"]["ratio"]


def cmd_ivl_scan(cfg: dict, seed: int, out: Path, level: int = 0):
    dg, s = cfg["degiorgi"], cfg["model"]["s"]
    K, _ = _kernel(cfg)
    f, h = _unit_field(cfg, seed, level)
    rows = []
    for d1 in (dg["delta1"], dg["delta1"] / 2):
        for d2 in (dg["delta2"], dg["delta2"] / 2):
            r = degiorgi.ivl_check(K, f, h, dg["r0"], d1, d2, dg["sigma"], dg["C"])
            rows.append(dict(r.to_dict(), delta1=d1, delta2=d2))
    ok = all(r["conclusion_holds"] is not False for r in rows)
    return {"rows": rows, "mtp": degiorgi.mtp_constants(cfg["harnack"]["delta"], f.d)}, [], ok, rows[0]["intermediate_measure"]


def cmd_harnack(cfg: dict, seed: int, out: Path, level: int = 0):
    hk, s, sg = cfg["harnack"], cfg["model"]["s"], cfg["surrogate"]
    f, h = _unit_field(cfg, seed, level)
    r0 = hk["r0"]
    m = hk["m"] or max(3.0, harnack.m_threshold(s))
    nest = harnack.covering_nesting(r0, s, hk["k_max"]) if f.d == 1 else {"ok": True, "rows": []}
    target = harnack.covering_sequence(r0, s, 2, f.d)[1]
    pts = harnack.level_set_points(f, hk["level"], target)[:50]
    fam = harnack.vitali_cover(pts, f.cell_volume, s, r0=r0, k=1, m=m, n_cov=hk["n_cov"],
                               delta0=hk["delta0"], k_max=hk["k_max"] + 1)
    ver = harnack.verify_covering(fam)
    big, small = harnack.covering_volume_identity(fam, f.d)
    zl = math.log(sg["zeta"])
    q = harnack.weak_harnack_quotient(f, h, r0, zl, s=s, p=cfg["degiorgi"]["p"])
    strong = harnack.strong_harnack_check(f, r0, zl, cfg["degiorgi"]["p"], s=s, h=h)
    logi = harnack.log_integrability(f, r0, sg["M"], s=s)
    const = degiorgi.paper_constants(f.d, s, cfg["degiorgi"]["p"], delta0=hk["delta0"], delta=hk["delta"], m=m)
    witnesses = [] if q.witness is None else [q.witness]
    witnesses += [{"uncovered": [[z.t, *z.x, *z.v] for z in ver["uncovered"]]}] if ver["uncovered"] else []
    payload = {"constants": const.to_dict(), "surrogate": dict(sg), "quotient": q.to_dict(), "strong": strong,
               "log_integrability": logi, "covering": {"family": fam.to_dict(), "disjoint": ver["disjoint"],
                                                       "covered": ver["covered"], "volume_identity": [big, small],
                                                       "nesting": nest["ok"]},
               "witnesses": witnesses}
    ok = ver["disjoint"] and ver["covered"] and nest["ok"] and q.witness is None
    return payload, [], ok, q.quotient


def cmd_hoelder(cfg: dict, seed: int, out: Path, level: int = 0):
    hk, s = cfg["harnack"], cfg["model"]["s"]
    f, h = _unit_field(cfg, seed, level)
    theta_log = math.log(cfg["surrogate"]["theta"])
    rep = harnack.hoelder_exponent(f, hk["hoelder_r0"], theta_log, s=s, n_scales=hk["n_scales"], h=h)
    files = []
    if level == 0:
        lines = ["scale,osc"] + [f"{format(r, '.17g')},{format(o, '.17g')}" for r, o in zip(rep.radii, rep.oscillations)]
        (out / "oscillations.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        files = ["oscillations.csv"]
    payload = dict(rep.to_dict(), theory=degiorgi.mtp_constants(hk["delta"], f.d))
    return payload, files, rep.nonincreasing, rep.alpha_fit


COMMANDS = {
    "check-kernel": cmd_check_kernel,
    "fundamental-solution": cmd_fundamental,
    "solve": cmd_solve,
    "degiorgi": cmd_degiorgi,
    "ivl-scan": cmd_ivl_scan,
    "harnack-report": cmd_harnack,
    "hoelder-estimate": cmd_hoelder,
}


def run_subcommand(name: str, cfg: dict, out: Path, seed: int = 0, refine: int = 0) -> tuple[int, Path]:
    """Run one subcommand, write ``<name>.json`` into ``out`` and return the exit status."""
    if name not in COMMANDS:
        raise ConfigError(f"unknown subcommand {name}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    payload, files, ok, headline = COMMANDS[name](cfg, seed, out, 0)
    if refine:
        ladder = [headline]
        for lv in range(1, refine + 1):
            ladder.append(COMMANDS[name](cfg, seed, out, lv)[3])
        payload = dict(payload, refinement=ladder)
    payload = dict(payload, files=files, checks_passed=bool(ok))
    run_cfg = dict(cfg, run={"subcommand": name, "seed": seed, "refine": refine})
    path = write_report(out / f"{name}.json", make_report(name, payload, run_cfg))
    return (EXIT_OK if ok else EXIT_CHECK), path


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinetic-dg", description=__doc__.splitlines()[0],
                                epilog=schema_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, epilog=schema_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", type=Path, help="INI configuration file")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--seed", type=int, default=0, help="seed for the scrambled Sobol sampler (u64)")
        sp.add_argument("--surrogate-constants", type=Path, help="INI file with a [surrogate] section")
        sp.add_argument("--refine", type=int, default=0, help="grid-doubling ladder depth")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.refine < 0:
            raise ConfigError("--refine must be nonnegative")
        cfg = load_config(args.config, args.surrogate_constants)
        status, path = run_subcommand(args.command, cfg, args.out, args.seed, args.refine)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(path)
    return status


if __name__ == "__main__":
    sys.exit(main())
