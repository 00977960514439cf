"""Covering, weak and not-so-strong Harnack checks, Hoelder exponents.

Realistic constants (theta, M, zeta) underflow, so every check takes them
in log space and accepts moderate surrogate values. inf and sup over a
cylinder are min and max over nodes with positive quadrature weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import gridops
from .degiorgi import lemma_exponents
from .geometry import (KineticCylinder, KineticPoint, SlantedBox, Variant, alpha_k, box_subset,
                       boxes_intersect, covering_sequence_cylinder, make_cylinder, tilde_past_cylinder,
                       total_dimension)
from .kernels import GridField
from .kolmogorov import check_p


def _check_r0(r0: float) -> None:
    if not 0 < r0 < 1 / 3:
        raise ValueError("r0 must lie in (0, 1/3)")


# -------------------------------------------------------------------- covering

def covering_sequence(r0: float, s: float, k_max: int, d: int = 1) -> list[KineticCylinder]:
    """``Q^1, ..., Q^{k_max}``, decreasing to the tilde past cylinder."""
    _check_r0(r0)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    return [covering_sequence_cylinder(r0, s, k, d) for k in range(1, k_max + 1)]


def _corners(box: SlantedBox) -> list[KineticPoint]:
    """Extreme points of a d=1 slanted box, nudged inside by a relative 1e-9."""
    a = box.anchor
    eps = 1e-9
    lo, hi = box.time_interval
    out = []
    for t in (lo + eps * (hi - lo), hi):
        xc = float(box.x_center(t)[0])
        for sx in (-1, 1):
            for sv in (-1, 1):
                out.append(KineticPoint(t, (xc + sx * box.rho_x * (1 - eps),),
                                        (float(a.v[0]) + sv * box.rho_v * (1 - eps),)))
    return out


def covering_nesting(r0: float, s: float, k_max: int) -> dict:
    """Corner-membership and box-inclusion checks of
    ``tilde Q^- subset Q^k subset closure(Q^k) subset interior(Q^{k-1}) subset Q^-_{r0}``."""
    seq = covering_sequence(r0, s, k_max)
    target = tilde_past_cylinder(r0, s, r0 / 2).box
    past = make_cylinder(KineticPoint.origin(1), r0, s, Variant.PAST).box
    rows = []
    for k, c in enumerate(seq, start=1):
        b = c.box
        row = {"k": k,
               "target_inside": all(b.contains(z) for z in _corners(target)) and box_subset(target, b),
               "inside_past": all(past.contains(z) for z in _corners(b)) and box_subset(b, past)}
        if k > 1:
            row["strictly_inside_previous"] = box_subset(b, seq[k - 2].box, strict=True)
        rows.append(row)
    ok = all(all(v for kk, v in r.items() if kk != "k") for r in rows)
    return {"ok": ok, "rows": rows}


def n_cov_gap(s: float, k: int) -> float:
    """``(7^k + 7)^{2s} - (7^k + 1)^{2s}``."""
    a = 7.0**k
    # factored to avoid cancellation at large k
    return a ** (2 * s) * math.exp(2 * s * math.log1p(1 / a)) * math.expm1(
        2 * s * (math.log1p(7 / a) - math.log1p(1 / a)))


def n_cov_feasible(n_cov: int, s: float, k_max: int) -> bool:
    """The time-gap inequality for ``k = 1..k_max`` (not beyond)."""
    if n_cov < 1:
        raise ValueError("n_cov must be a positive integer")
    need = (2 / n_cov) ** (2 * s)
    return all(n_cov_gap(s, k) >= need for k in range(1, k_max + 1))


def min_n_cov(s: float, k_max: int) -> int:
    """Smallest admissible ``n_cov`` for ``k = 1..k_max``."""
    gap = min(n_cov_gap(s, k) for k in range(1, k_max + 1))
    n = max(1, math.ceil(2 / gap ** (1 / (2 * s)) - 1e-12))
    while not n_cov_feasible(n, s, k_max):
        n += 1
    return n


def m_threshold(s: float) -> float:
    """``5^{1/(2s)}``."""
    return 5 ** (1 / (2 * s))


def delta0_max_log(d: int, s: float, m: float) -> float:
    """``ln (4/(1225 m^2))^{2d + 2s(d+1)}``."""
    return (2 * d + 2 * s * (d + 1)) * math.log(4 / (1225 * m * m))


@dataclass(frozen=True)
class CoveringFamily:
    members: tuple
    m: float
    n_cov: int
    delta0: float
    s: float
    r_max: float
    retained: tuple
    unretained: tuple
    delta0_admissible: bool

    def cylinders(self, factor: float = 1.0) -> list[KineticCylinder]:
        return [make_cylinder(z, factor * r, self.s, Variant.COVERING) for z, r in self.members]

    def to_dict(self) -> dict:
        return {"members": [{"z": [float(z.t), *map(float, z.x), *map(float, z.v)], "r": r}
                            for z, r in self.members],
                "m": self.m, "n_cov": self.n_cov, "delta0": self.delta0, "r_max": self.r_max,
                "retained": len(self.retained), "unretained": len(self.unretained),
                "delta0_admissible": self.delta0_admissible}


def _points_array(points: Sequence[KineticPoint]):
    t = np.array([float(p.t) for p in points])
    x = np.array([[float(c) for c in p.x] for p in points])
    v = np.array([[float(c) for c in p.v] for p in points])
    return t, x, v


def _density(box: SlantedBox, arrs, cell_volume: float) -> float:
    t, x, v = arrs
    if t.size == 0:
        return 0.0
    return float(np.count_nonzero(box.contains_arrays(t, x, v))) * cell_volume / box.volume()


def vitali_cover(A: Sequence[KineticPoint], cell_volume: float, s: float, *, r0: float, k: int,
                 m: Optional[float] = None, n_cov: int = 1, delta0: float = 0.1, n_radii: int = 8,
                 k_max: Optional[int] = None) -> CoveringFamily:
    """Greedy Vitali selection over good candidates ``(z, r)``.

    Candidates have ``z`` in ``A`` and ``r`` on the dyadic ladder
    ``r_max 2^{-j}``, ``r_max = alpha_{k+1}/(5 m n_cov)``. A candidate is good when
    ``|A cap c_{5mr}| <= delta0 |c_{5mr}|`` and ``|A cap c_r| > delta0 |c_r|``,
    with ``|A cap c|`` counted as ``cell_volume`` per point. Candidates are taken
    by decreasing ``r`` then lexicographic centre and kept when ``c_{mr}`` misses
    every kept ``c_{m r_l}``. Points of ``A`` with no good candidate are unretained.
    """
    _check_r0(r0)
    m = m_threshold(s) if m is None else m
    if m < 3:
        raise ValueError("m must be at least 3")
    if not n_cov_feasible(n_cov, s, k_max if k_max is not None else k + 1):
        raise ValueError(f"n_cov = {n_cov} violates the time-gap inequality")
    if not 0 < delta0 < 1:
        raise ValueError("delta0 must lie in (0, 1)")
    pts = list(A)
    d = pts[0].d if pts else 1
    adm = math.log(delta0) <= delta0_max_log(d, s, m)
    r_max = alpha_k(r0, k + 1) / (5 * m * n_cov)
    if not pts:
        return CoveringFamily((), m, n_cov, delta0, s, r_max, (), (), adm)
    arrs = _points_array(pts)
    radii = [r_max * 2.0**-j for j in range(1, n_radii + 1)]
    good = []
    has_good = [False] * len(pts)
    for i, z in enumerate(pts):
        for r in radii:
            big = make_cylinder(z, 5 * m * r, s, Variant.COVERING).box
            small = make_cylinder(z, r, s, Variant.COVERING).box
            if _density(big, arrs, cell_volume) <= delta0 and _density(small, arrs, cell_volume) > delta0:
                good.append((r, i))
                has_good[i] = True
    key = lambda c: (-c[0], tuple(float(u) for u in (pts[c[1]].t, *pts[c[1]].x, *pts[c[1]].v)))
    good.sort(key=key)
    chosen: list[tuple[KineticPoint, float]] = []
    chosen_boxes: list[SlantedBox] = []
    for r, i in good:
        b = make_cylinder(pts[i], m * r, s, Variant.COVERING).box
        if any(boxes_intersect(b, c) for c in chosen_boxes):
            continue
        chosen.append((pts[i], r))
        chosen_boxes.append(b)
    retained = tuple(p for p, g in zip(pts, has_good) if g)
    unretained = tuple(p for p, g in zip(pts, has_good) if not g)
    return CoveringFamily(tuple(chosen), m, n_cov, delta0, s, r_max, retained, unretained, adm)


def verify_covering(F: CoveringFamily) -> dict:
    """Brute-force pairwise disjointness of ``c_{m r_l}`` and coverage of the
    retained points by ``c_{5m r_l}``."""
    inner = [c.box for c in F.cylinders(F.m)]
    outer = [c.box for c in F.cylinders(5 * F.m)]
    overlaps = [(i, j) for i in range(len(inner)) for j in range(i + 1, len(inner))
                if boxes_intersect(inner[i], inner[j])]
    uncovered = [z for z in F.retained if not any(b.contains(z) for b in outer)]
    radius_ok = all(0 < r < F.r_max * (1 + 1e-12) for _, r in F.members)
    return {"disjoint": not overlaps, "covered": not uncovered, "radii_in_range": radius_ok,
            "overlaps": overlaps, "uncovered": uncovered}


def covering_volume_identity(F: CoveringFamily, d: int) -> tuple[float, float]:
    """``(sum |c_{5m r_l}|, (5m)^n sum |c_{r_l}|)``; equal by scaling."""
    n = total_dimension(d, F.s)
    big = sum(c.volume() for c in F.cylinders(5 * F.m))
    small = sum(c.volume() for c in F.cylinders(1.0))
    return big, (5 * F.m) ** n * small


def level_set_points(f: GridField, level: float, domain=None, strict: bool = True) -> list[KineticPoint]:
    """Nodes with ``f > level`` (or ``>=``) and positive weight in ``domain``."""
    mask = f.values > level if strict else f.values >= level
    if domain is not None:
        mask = mask & (gridops.box_weights(f, domain) > 0)
    pts = []
    axes = (f.t, *f.x_axes, *f.v_axes)
    d = f.d
    for idx in zip(*np.nonzero(mask)):
        c = [float(a[i]) for a, i in zip(axes, idx)]
        pts.append(KineticPoint(c[0], tuple(c[1:1 + d]), tuple(c[1 + d:])))
    return pts


# ------------------------------------------------------------------- Harnack

def _h_sup(f: GridField, h) -> float:
    if h is None:
        return 0.0
    vals = h.values if isinstance(h, GridField) else np.asarray(h, dtype=float)
    return float(np.max(np.abs(vals)))


def _shifted(f: GridField, h_sup: float) -> np.ndarray:
    if h_sup == 0:
        return f.values
    T = f.t.reshape((-1,) + (1,) * (2 * f.d))
    return f.values + (1 + T) * h_sup


@dataclass(frozen=True)
class HarnackReport:
    zeta_log: float
    quotient: float
    beta_log: float
    infimum: float
    integral: float
    lhs: float
    rhs: float
    h_sup: float
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"zeta_log": self.zeta_log, "quotient": self.quotient, "beta_log": self.beta_log,
                "infimum": self.infimum, "integral": self.integral, "lhs": self.lhs, "rhs": self.rhs,
                "h_sup": self.h_sup, "witness": self.witness}


def weak_harnack_quotient(f: GridField, h, r0: float, zeta_log: float, *, s: float = 0.5,
                          p: float = 2.5) -> HarnackReport:
    """``(int_{tilde Q^-_{r0/2}} f^zeta)^{1/zeta} / (inf_{Q_{r0/2}} f + ||h||)``.

    With a source the field is shifted to ``f + (1 + t) ||h||``. ``beta_log``
    is ``ln(zeta beta2)`` for the exponent ``p``.
    """
    _check_r0(r0)
    zeta = math.exp(zeta_log)
    if not 0 < zeta <= 1:
        raise ValueError("zeta must lie in (0, 1]")
    d = f.d
    hs = _h_sup(f, h)
    g = _shifted(f, hs)
    wt = gridops.box_weights(f, tilde_past_cylinder(r0, s, r0 / 2, d))
    wq = gridops.box_weights(f, make_cylinder(KineticPoint.origin(d), r0 / 2, s))
    if wt.sum() == 0 or wq.sum() == 0:
        raise ValueError("the grid does not resolve the Harnack cylinders")
    sel = np.broadcast_to(wt, g.shape) > 0
    if np.any(g[sel] < -1e-12):
        raise ValueError("f must be nonnegative on the integration cylinder")
    integral = gridops.integrate(f, np.maximum(g, 0.0) ** zeta, wt)
    lhs = integral ** (1 / zeta)
    inf = gridops.inf_over(f, g, wq)
    rhs = inf + hs
    witness = None
    if rhs > 0:
        q = lhs / rhs
    elif lhs > 0:
        q = math.inf
        witness = {"reason": "zero right side with positive integral", "lhs": lhs}
    else:
        q = 0.0
    _, b2 = lemma_exponents(p)
    return HarnackReport(zeta_log, q, zeta_log + math.log(b2), inf, integral, lhs, rhs, hs, witness)


def strong_harnack_check(f: GridField, r0: float, zeta_log: float, p: float, *, s: float = 0.5,
                         h=None, C: float = 1.0) -> dict:
    """``sup_{tilde Q^-_{r0/4}} f <= C (inf_{Q_{r0/4}} f + ||h||)^beta`` with ``beta = zeta beta2``."""
    _check_r0(r0)
    check_p(p, f.d, s)
    _, b2 = lemma_exponents(p)
    beta = math.exp(zeta_log) * b2
    d = f.d
    wt = gridops.box_weights(f, tilde_past_cylinder(r0, s, r0 / 4, d))
    wq = gridops.box_weights(f, make_cylinder(KineticPoint.origin(d), r0 / 4, s))
    if wt.sum() == 0 or wq.sum() == 0:
        raise ValueError("the grid does not resolve the Harnack cylinders")
    sup = gridops.sup_over(f, f.values, wt)
    inf = gridops.inf_over(f, f.values, wq)
    if inf < -1e-12 or sup > 1 + 1e-12:
        raise ValueError("f must take values in [0, 1]")
    hs = _h_sup(f, h)
    base = max(inf, 0.0) + hs
    bound = C * base**beta if base > 0 else 0.0
    return {"sup_val": sup, "inf_val": inf, "beta": beta, "beta_log": zeta_log + math.log(b2),
            "bound": bound, "satisfied": sup <= bound * (1 + 1e-12), "C": C}


def log_integrability(f: GridField, r: float, M: float, *, s: float = 0.5) -> dict:
    """``|{f > M} cap Q^-_r| / |Q^-_r|`` and ``int_{Q^-_r} (ln(1+f))^{1/(18d+48)}``."""
    if not M > 0:
        raise ValueError("M must be positive")
    d = f.d
    w = gridops.box_weights(f, make_cylinder(KineticPoint.origin(d), r, s, Variant.PAST))
    vol = float(w.sum()) * f.cell_volume
    if vol == 0:
        raise ValueError("the grid does not resolve Q^-_r")
    frac = gridops.measure(f, f.values > M, w) / vol
    power = 1 / (18 * d + 48)
    integral = gridops.integrate(f, np.log1p(np.maximum(f.values, 0.0)) ** power, w)
    delta_M = (1 / math.log1p(M)) ** (1 / (18 * d + 47))
    return {"lhs_measure_fraction": frac, "log_integral": integral, "delta_M": delta_M,
            "premise": frac <= delta_M, "power": power}


def level_set_implication(f: GridField, z: KineticPoint, r: float, M: float, delta: float, *, s: float = 0.5) -> dict:
    """``|{f > M} cap Q_r(z)| / |Q_r(z)| > delta  =>  inf_{Q^+_{r/2}(z)} f >= 1``."""
    w = gridops.box_weights(f, make_cylinder(z, r, s))
    vol = float(w.sum()) * f.cell_volume
    if vol == 0:
        raise ValueError("the grid does not resolve Q_r(z)")
    frac = gridops.measure(f, f.values > M, w) / vol
    wf = gridops.box_weights(f, make_cylinder(z, r / 2, s, Variant.FUTURE))
    if wf.sum() == 0:
        raise ValueError("the grid does not resolve Q^+_{r/2}(z)")
    inf = gridops.inf_over(f, f.values, wf)
    premise, conclusion = frac > delta, inf >= 1
    holds = (not premise) or conclusion
    witness = None if holds else {"fraction": frac, "inf_future": inf}
    return {"fraction": frac, "premise": premise, "inf_future": inf, "conclusion": conclusion,
            "holds": holds, "witness": witness}


# ------------------------------------------------------------------- Hoelder

def theory_alpha(r0: float, theta_log: float) -> dict:
    """``alpha = ln(1 - theta/2) / ln r0`` with a log form for tiny theta."""
    if not 0 < r0 < 1:
        raise ValueError("r0 must lie in (0, 1)")
    if theta_log > math.log(2):
        raise ValueError("theta must not exceed 2")
    lr = math.log(r0)
    if theta_log > -30:
        a = math.log1p(-math.exp(theta_log) / 2) / lr
        return {"alpha": a, "alpha_log": math.log(a) if a > 0 else -math.inf, "clipped": a >= 1}
    alpha_log = theta_log - math.log(2) - math.log(-lr)
    return {"alpha": math.exp(alpha_log), "alpha_log": alpha_log, "clipped": False}


@dataclass(frozen=True)
class HoelderReport:
    theta_log: float
    alpha_theory: float
    alpha_theory_log: float
    radii: tuple
    oscillations: tuple
    normalized: tuple
    nonincreasing: bool
    alpha_fit: float
    clipped: bool

    def to_dict(self) -> dict:
        return {"theta_log": self.theta_log, "alpha_theory": self.alpha_theory,
                "alpha_theory_log": self.alpha_theory_log, "radii": list(self.radii),
                "oscillations": list(self.oscillations), "normalized": list(self.normalized),
                "nonincreasing": self.nonincreasing, "alpha_fit": self.alpha_fit, "clipped": self.clipped}


def oscillations(f: GridField, z0: KineticPoint, radii: Sequence[float], s: float) -> list[float]:
    out = []
    for r in radii:
        w = gridops.box_weights(f, make_cylinder(z0, r, s))
        if w.sum() == 0:
            out.append(math.nan)
            continue
        out.append(gridops.sup_over(f, f.values, w) - gridops.inf_over(f, f.values, w))
    return out


def hoelder_exponent(f: GridField, r0: float, theta_log: float, *, s: float = 0.5,
                     z0: Optional[KineticPoint] = None, n_scales: int = 4, h=None,
                     source_factor_log: Optional[float] = None) -> HoelderReport:
    """Oscillations over ``Q_{r0^n}(z0)``, ``n = 0..n_scales-1``, a least-squares
    slope of ``ln osc`` against ``ln r`` and the theoretical exponent.

    Normalisation divides by ``max{osc_0, e^{c} ||h||}`` with
    ``c = 2(3 + 2^{18d+46})`` unless ``source_factor_log`` overrides it.
    """
    if not 0 < r0 < 1:
        raise ValueError("r0 must lie in (0, 1)")
    z0 = KineticPoint.origin(f.d) if z0 is None else z0
    radii = [r0**n for n in range(n_scales)]
    osc = oscillations(f, z0, radii, s)
    usable = [(r, o) for r, o in zip(radii, osc) if math.isfinite(o) and o > 0]
    if len(usable) < 3:
        raise ValueError("fewer than 3 usable scales")
    lr = np.log([u[0] for u in usable])
    lo = np.log([u[1] for u in usable])
    slope = float(np.polyfit(lr, lo, 1)[0])
    hs = _h_sup(f, h)
    c = 2 * (3 + 2.0 ** (18 * f.d + 46)) if source_factor_log is None else source_factor_log
    src_log = c + math.log(hs) if hs > 0 else -math.inf
    den_log = max(math.log(osc[0]) if osc[0] > 0 else -math.inf, src_log)
    norm = tuple(math.exp(math.log(o) - den_log) if o > 0 and math.isfinite(den_log) else 0.0 for o in osc)
    mono = all(b <= a * (1 + 1e-12) for a, b in zip(norm, norm[1:]))
    pa = theory_alpha(r0, theta_log)
    return HoelderReport(theta_log, pa["alpha"], pa["alpha_log"], tuple(radii), tuple(osc), norm, mono,
                         slope, pa["clipped"])
