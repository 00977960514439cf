"""De Giorgi machinery on grid fields.

Truncations, the local energy and integrability estimates, the first-lemma
iteration, barriers, the weak Poincare terms, the intermediate value lemma
and the measure-to-pointwise constants. Level-set measures are cell counts
weighted by ``gridops`` box weights. Every constant that underflows is kept
as a natural log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import numpy as np

from . import gridops
from .geometry import KineticCylinder, KineticPoint, SlantedBox, Variant, box_subset, make_cylinder, total_dimension
from .kernels import GridField, KernelSpec, kernel_matrix, tail_mass
from .kolmogorov import check_p, check_sigma, critical_p, p_star, sigma_max

SLAB_TOL = 1e-6  # spectral ringing allowance


# ---------------------------------------------------------------- truncations

@dataclass(frozen=True)
class Truncation:
    plus: GridField
    minus: GridField
    level_set_measure: float


def _level_values(f: GridField, psi) -> np.ndarray:
    if isinstance(psi, GridField):
        if psi.values.shape != f.values.shape:
            raise ValueError("cutoff field lives on a different grid")
        return psi.values
    return np.broadcast_to(np.asarray(psi, dtype=float), f.values.shape)


def truncate_levels(f: GridField, psi, domain=None) -> Truncation:
    """``(f - psi)_+``, ``(f - psi)_-`` and ``|{f > psi}|`` over ``domain``
    (a cylinder or box; the whole grid when omitted).

    ``(f - psi)_- = min(f - psi, 0)`` is nonpositive, so that
    ``f = (f - psi)_+ + (f - psi)_- + psi``.
    """
    g = f.values - _level_values(f, psi)
    plus = np.maximum(g, 0.0)
    minus = np.minimum(g, 0.0)
    w = np.ones_like(g) if domain is None else gridops.box_weights(f, domain)
    far = f.far_field_v - (float(psi) if np.isscalar(psi) else 0.0)
    return Truncation(
        f.with_values(plus, nonnegative=True, far_field_v=max(far, 0.0)),
        f.with_values(minus, nonnegative=False, far_field_v=min(far, 0.0)),
        gridops.measure(f, g > 0, w),
    )


def level_function(values, mu: float, k: int):
    """``mu^{-2k} (f - (1 - mu^{2k}))``."""
    if not 0 < mu < 1:
        raise ValueError("mu must lie in (0, 1)")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return values
    q = mu ** (2 * k)
    return (np.asarray(values) - (1 - q)) / q


def cross_term(K: KernelSpec, f: GridField, psi) -> float:
    """``-sum_z sum_{v,w} (f-psi)_+(v) (f-psi)_-(w) K(v, w)`` with quadrature weights.

    Nonnegative for nonnegative kernels since the negative part is nonpositive.
    """
    g = f.values - _level_values(f, psi)
    nv = int(np.prod([a.size for a in f.v_axes]))
    G = g.reshape(-1, nv)
    Km = kernel_matrix(K, f.v_grid)
    plus, minus = np.maximum(G, 0.0), np.minimum(G, 0.0)
    hv = float(np.prod(f.dv))
    return -float(np.einsum("ai,ij,aj->", plus, Km, minus)) * hv * f.cell_volume


# ------------------------------------------------------------ energy estimates

def _box(c) -> SlantedBox:
    return c.box if isinstance(c, KineticCylinder) else c


def _slab_weights(f: GridField, outer) -> gridops.ProductWeights:
    pw = gridops.product_weights(f, outer)
    return gridops.ProductWeights(pw.wt, pw.wx, np.ones_like(pw.wv))


def _check_slab(f: GridField, outer) -> None:
    w = _slab_weights(f, outer).full(f.d)
    lo = gridops.inf_over(f, f.values, w)
    hi = gridops.sup_over(f, f.values, w)
    if lo < -SLAB_TOL or hi > 1 + SLAB_TOL:
        raise ValueError(f"f leaves [0, 1] on the outer slab (min {lo:.3g}, max {hi:.3g})")


def _slice_at(f: GridField, t: float) -> np.ndarray:
    """Linear interpolation of ``f`` in time."""
    if not f.t[0] - 1e-12 <= t <= f.t[-1] + 1e-12:
        raise ValueError(f"time {t} outside the field's range")
    if f.t.size == 1:
        return f.values[0]
    u = (t - f.t[0]) / f.dt
    i = int(min(max(math.floor(u), 0), f.t.size - 2))
    a = u - i
    if abs(a) < 1e-9:
        return f.values[i]
    if abs(a - 1) < 1e-9:
        return f.values[i + 1]
    return (1 - a) * f.values[i] + a * f.values[i + 1]


def _slice_weights(f: GridField, box: SlantedBox, t: float) -> np.ndarray:
    """x-v weights of the box section at absolute time ``t``."""
    one = GridField(np.array([t]), f.x_axes, f.v_axes, np.zeros((1,) + f.values.shape[1:]))
    sec = SlantedBox(box.anchor, t - float(box.anchor.t) - 1.0, t - float(box.anchor.t),
                     box.rho_x, box.rho_v)
    return gridops.box_weights(one, sec)[0]


def _radius(c) -> float:
    if isinstance(c, KineticCylinder):
        return float(c.radius)
    return float(_box(c).rho_v)


def _h_values(f: GridField, h) -> np.ndarray:
    if h is None:
        return np.zeros_like(f.values)
    if isinstance(h, GridField):
        if h.values.shape != f.values.shape:
            raise ValueError("source lives on a different grid")
        return h.values
    return np.broadcast_to(np.asarray(h, dtype=float), f.values.shape)


@dataclass(frozen=True)
class EnergyReport:
    lhs: float
    rhs: float
    ratio: float
    terms: dict

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "terms": dict(self.terms)}


def _ratio(a: float, b: float) -> float:
    if b > 0:
        return a / b
    return 0.0 if a == 0 else math.inf


def _common_terms(f: GridField, h, inner, outer) -> tuple[dict, float, float]:
    ib, ob = _box(inner), _box(outer)
    if ib.anchor != ob.anchor:
        raise ValueError("inner and outer cylinders need the same centre")
    if not box_subset(ib, ob):
        raise ValueError("inner cylinder is not inside the outer one")
    _check_slab(f, outer)
    r, R = _radius(inner), _radius(outer)
    t_start = ib.time_interval[0]
    f0 = _slice_at(f, t_start)
    w0 = _slice_weights(f, ob, t_start)
    cell_xv = float(np.prod(f.dx)) * float(np.prod(f.dv))
    initial = float(np.sum(f0**2 * w0)) * cell_xv
    wo = gridops.box_weights(f, ob)
    positive = gridops.measure(f, f.values > 0, wo)
    source = gridops.integrate(f, _h_values(f, h) ** 2, wo)
    return {"initial_mass": initial, "positive_measure": positive, "source_l2": source}, r, R


def energy_balance(K: KernelSpec, f: GridField, h, inner, outer) -> EnergyReport:
    """Both sides of the local energy estimate with implicit constant 1.

    LHS: sup over inner time slices of ``int f^2`` plus the v-Gagliardo energy
    over ``Q_r x B_r``. RHS: initial slice mass on the outer section at the
    inner start time, ``(R-r)^{-2} |{f > 0} cap Q_R|`` and ``int_{Q_R} h^2``.
    """
    terms, r, R = _common_terms(f, h, inner, outer)
    ib = _box(inner)
    pw = gridops.product_weights(f, ib)
    cell_xv = float(np.prod(f.dx)) * float(np.prod(f.dv))
    w2 = (pw.wx.reshape(pw.wx.shape + (1,) * f.d) * pw.wv.reshape((1,) * f.d + pw.wv.shape))
    sup_mass = 0.0
    for it in np.nonzero(pw.wt > 0)[0]:
        sup_mass = max(sup_mass, float(np.sum(f.values[it] ** 2 * w2)) * cell_xv)
    gag = gridops.v_gagliardo(f, f.values, pw, pw.wv, K.s)
    lhs = sup_mass + gag
    rhs = terms["initial_mass"] + (R - r) ** -2 * terms["positive_measure"] + terms["source_l2"]
    terms = dict(terms, sup_mass=sup_mass, gagliardo=gag)
    return EnergyReport(lhs, rhs, _ratio(lhs, rhs), terms)


@dataclass(frozen=True)
class GainReport:
    lp_lhs: float
    w_sigma_lhs: float
    rhs: float
    lp_ratio: float
    w_sigma_ratio: float
    terms: dict

    def to_dict(self) -> dict:
        return {"lp_lhs": self.lp_lhs, "w_sigma_lhs": self.w_sigma_lhs, "rhs": self.rhs,
                "lp_ratio": self.lp_ratio, "w_sigma_ratio": self.w_sigma_ratio, "terms": dict(self.terms)}


def integrability_gain(K: KernelSpec, f: GridField, h, inner, outer, p: float, sigma: float) -> GainReport:
    """``||f||^2_{L^p(Q_r)}``, ``||f||^2_{L^1 W^{sigma,1}_x(Q_r)}`` and their common RHS."""
    check_p(p, f.d, K.s)
    check_sigma(sigma, K.s)
    terms, r, R = _common_terms(f, h, inner, outer)
    ib = _box(inner)
    wi = gridops.box_weights(f, ib)
    lp = gridops.integrate(f, np.abs(f.values) ** p, wi) ** (2 / p)
    pw = gridops.product_weights(f, ib)
    l1 = gridops.integrate(f, np.abs(f.values), wi)
    ws = (l1 + gridops.x_gagliardo_l1(f, f.values, pw, sigma)) ** 2
    rhs = ((R - r) ** -2 * terms["initial_mass"] + (R - r) ** -4 * terms["positive_measure"]
           + (R - r) ** -2 * terms["source_l2"])
    return GainReport(lp, ws, rhs, _ratio(lp, rhs), _ratio(ws, rhs), terms)


# ------------------------------------------------------------------ first lemma

def lemma_exponents(p: float) -> tuple[float, float]:
    """``(beta1, beta2) = (2p/(2p-2), (p-2)/(2(2p-2)))``."""
    if not p > 2:
        raise ValueError("the first lemma needs p > 2")
    return 2 * p / (2 * p - 2), (p - 2) / (2 * (2 * p - 2))


def log2_Q(p: float) -> float:
    """``log2 Q`` for the smallest ``Q`` with ``2^8 <= Q^{(p-2)/p}``."""
    if not p > 2:
        raise ValueError("the first lemma needs p > 2")
    return 8 * p / (p - 2)


def level_cap_log(A0: float, gap: float, h_norm: float, p: float) -> float:
    """``ln L`` for ``L = A0^{b2} gap^{-b1} 2^{4p^2/((p-2)(2p-2))} [1 + gap ||h||]^{p/(2p-2)}``."""
    b1, b2 = lemma_exponents(p)
    if A0 <= 0:
        return -math.inf
    return (b2 * math.log(A0) - b1 * math.log(gap) + 4 * p * p / ((p - 2) * (2 * p - 2)) * math.log(2)
            + p / (2 * p - 2) * math.log1p(gap * h_norm))


@dataclass(frozen=True)
class DeGiorgiSchedule:
    L: float
    levels: tuple
    radii: tuple
    times: tuple
    boxes: tuple
    A: tuple = ()

    def to_dict(self) -> dict:
        return {"L": self.L, "levels": list(self.levels), "radii": list(self.radii),
                "times": list(self.times), "A": list(self.A)}


def degiorgi_schedule(L: float, r: float, R: float, z0: KineticPoint, s: float, k_max: int) -> DeGiorgiSchedule:
    """``l_k = L(1-2^{-k})``, ``r_k = r + 2^{-k}(R-r)`` and absolute
    ``t_k = t0 - r^{2s} - 2^{-k}(R^{2s} - r^{2s})``; ``Q_k = (t_k, t0] x B_{r_k^{1+2s}} x B_{r_k}``
    slanted along the anchor velocity."""
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    t0 = float(z0.t)
    ks = range(k_max + 1)
    levels = tuple(L * (1 - 2.0**-k) for k in ks)
    radii = tuple(r + 2.0**-k * (R - r) for k in ks)
    times = tuple(t0 - r ** (2 * s) - 2.0**-k * (R ** (2 * s) - r ** (2 * s)) for k in ks)
    boxes = tuple(SlantedBox(z0, tk - t0, 0.0, rk ** (1 + 2 * s), rk, closed_left=False)
                  for tk, rk in zip(times, radii))
    return DeGiorgiSchedule(L, levels, radii, times, boxes)


@dataclass(frozen=True)
class FirstLemmaReport:
    converged: bool
    bound: float
    schedule: DeGiorgiSchedule
    L_log: float
    log2_Q: float
    beta1: float
    beta2: float
    A: tuple
    recurrence_ok: tuple
    chebyshev: tuple
    nested: bool
    sup_inner: float
    C: float

    def to_dict(self) -> dict:
        return {"converged": self.converged, "bound": self.bound, "schedule": self.schedule.to_dict(),
                "L_log": self.L_log, "log2_Q": self.log2_Q, "beta1": self.beta1, "beta2": self.beta2,
                "A": list(self.A), "recurrence_ok": list(self.recurrence_ok),
                "chebyshev": [list(c) for c in self.chebyshev], "nested": self.nested,
                "sup_inner": self.sup_inner, "C": self.C}


def first_lemma(K: KernelSpec, f: GridField, h, inner, outer, p: float, eps: float,
                k_max: int = 8, C: float = 1.0, L: Optional[float] = None) -> FirstLemmaReport:
    """Run the level/cylinder iteration on measured truncation energies.

    ``A_k = int_{Q_k} (f - l_k)_+^2``; convergence means ``A_k <= A_0 Q^{-k}``
    for ``k <= k_max``. ``L`` defaults to the lemma's level cap.
    """
    check_p(p, f.d, K.s)
    b1, b2 = lemma_exponents(p)
    lq = log2_Q(p)
    ib, ob = _box(inner), _box(outer)
    _check_slab(f, outer)
    wo = gridops.box_weights(f, ob)
    mass = gridops.integrate(f, f.values**2, wo)
    if mass > eps:
        raise ValueError(f"int_outer f^2 = {mass:.6g} exceeds eps = {eps:.6g}")
    r, R = _radius(inner), _radius(outer)
    gap = R - r
    h_norm = gridops.sup_over(f, np.abs(_h_values(f, h)), wo) if h is not None else 0.0
    h_norm = max(h_norm, 0.0)
    A0 = gridops.integrate(f, np.maximum(f.values, 0.0) ** 2, gridops.box_weights(f, degiorgi_schedule(1.0, r, R, ib.anchor, K.s, 0).boxes[0]))
    if L is None:
        L_log = level_cap_log(A0, gap, h_norm, p)
        L_val = math.exp(L_log) if L_log > -700 else 0.0
    else:
        if L <= 0:
            raise ValueError("L must be positive")
        L_val, L_log = float(L), math.log(L)
    sched = degiorgi_schedule(L_val, r, R, ib.anchor, K.s, k_max)
    A, rec, cheb = [], [], []
    for k, (lk, box) in enumerate(zip(sched.levels, sched.boxes)):
        w = gridops.box_weights(f, box)
        g = np.maximum(f.values - lk, 0.0)
        Ak = gridops.integrate(f, g**2, w)
        A.append(Ak)
        if A0 == 0:
            rec.append(Ak == 0)
        else:
            rec.append(Ak == 0 or math.log(Ak) <= math.log(A0) - k * lq * math.log(2) + 1e-12)
        if L_val > 0:
            thr = 2.0 ** (-k - 2) * L_val
            lhs = gridops.measure(f, g > thr, w)
            rhs = 2.0 ** (2 * k + 4) * L_val**-2 * Ak
            cheb.append((lhs, rhs, lhs <= rhs * (1 + 1e-12)))
        else:
            cheb.append((0.0, 0.0, True))
    nested = all(box_subset(b1_, b0_) for b0_, b1_ in zip(sched.boxes, sched.boxes[1:]))
    sched = DeGiorgiSchedule(sched.L, sched.levels, sched.radii, sched.times, sched.boxes, tuple(A))
    cap = C * (1 + gap * h_norm) ** (b1 / 2) * gap ** (-b1) * eps ** b2
    sup_inner = max(gridops.sup_over(f, f.values, gridops.box_weights(f, ib)), 0.0)
    return FirstLemmaReport(all(rec), min(cap, 0.5), sched, L_log, lq, b1, b2, tuple(A), tuple(rec),
                            tuple(cheb), nested, sup_inner, C)


# --------------------------------------------------------------------- barriers

def _exact(*xs) -> bool:
    return all(isinstance(x, Rational) for x in xs)


def _pow(a, e):
    """``a**e`` kept rational when ``e`` is an integer and ``a`` rational."""
    if isinstance(e, Rational) and Fraction(e).denominator == 1 and _exact(a):
        return Fraction(a) ** int(Fraction(e))
    return float(a) ** float(e)


def _norm2(u) -> object:
    u = tuple(u) if np.ndim(u) else (u,)
    return sum(c * c for c in u)


@dataclass(frozen=True)
class Barriers:
    """Velocity profiles ``F_i`` and barriers ``phi_i = psi + 1 + mu^i F_i``."""

    r0: object
    mu: object
    s: object
    C: tuple = (10, 9, 8)

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if not self.r0 > 0:
            raise ValueError("r0 must be positive")

    def F(self, i: int, v):
        r0 = self.r0
        q = _norm2(v) - self.C[i] * r0 * r0
        inner = min(0, q) / r0
        return max(-r0, inner) / r0

    def psi(self, x):
        """0 on ``B_{(3r0)^{1+2s}}``, 1 outside ``B_{(9r0)^{1+2s}}``, linear in ``|x|``."""
        a = _pow(3 * self.r0, 1 + 2 * self.s)
        b = _pow(9 * self.r0, 1 + 2 * self.s)
        n2 = _norm2(x)
        if n2 <= a * a:
            return 0
        if n2 >= b * b:
            return 1
        if np.ndim(x) == 0:
            nx = abs(x)
        elif len(x) == 1:
            nx = abs(x[0])
        else:
            nx = math.sqrt(float(n2))
        return (nx - a) / (b - a)

    def phi(self, i: int, x, v):
        return self.psi(x) + 1 + self.mu**i * self.F(i, v)


def barrier_eval(B: Barriers, x, v, which: int):
    """``phi_which(x, v)``; exact when all inputs are rational."""
    if which not in (0, 1, 2):
        raise ValueError("which must be 0, 1 or 2")
    return B.phi(which, x, v)


def barrier_arrays(B: Barriers, f: GridField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``phi_0, phi_1, phi_2`` broadcast over the field's (x, v) nodes."""
    r0, mu, s = float(B.r0), float(B.mu), float(B.s)
    X = np.meshgrid(*f.x_axes, indexing="ij")
    V = np.meshgrid(*f.v_axes, indexing="ij")
    nx = np.sqrt(sum(c * c for c in X))
    v2 = sum(c * c for c in V)
    a, b = (3 * r0) ** (1 + 2 * s), (9 * r0) ** (1 + 2 * s)
    psi = np.clip((nx - a) / (b - a), 0.0, 1.0)
    out = []
    for i in range(3):
        F = np.clip((v2 - B.C[i] * r0 * r0) / (r0 * r0), -1.0, 0.0)
        phi = psi.reshape(psi.shape + (1,) * f.d) + 1 + mu**i * F.reshape((1,) * f.d + F.shape)
        out.append(np.broadcast_to(phi[None], f.values.shape))
    return tuple(out)


# ------------------------------------------------------------- weak Poincare

@dataclass(frozen=True)
class PoincareReport:
    lhs: float
    sym_term: float
    skew_term: float
    sobolev_term: float
    source_term: float
    eps: float
    sigma: float
    C: float
    weights: tuple
    mean: float

    @property
    def rhs(self) -> float:
        w = self.weights
        return w[0] * self.sym_term + w[1] * self.skew_term + w[2] * self.sobolev_term + w[3] * self.source_term

    @property
    def ratio(self) -> float:
        return _ratio(self.lhs, self.rhs)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.C * self.rhs

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "sym_term": self.sym_term, "skew_term": self.skew_term,
                "sobolev_term": self.sobolev_term, "source_term": self.source_term, "eps": self.eps,
                "sigma": self.sigma, "C": self.C, "weights": list(self.weights), "mean": self.mean,
                "rhs": self.rhs, "ratio": self.ratio, "holds": self.holds}


def poincare_regions(d: int, s: float) -> dict:
    """Unit-scale boxes for the weak Poincare inequality, anchored at the origin."""
    o = KineticPoint.origin(d)
    q1 = SlantedBox(o, -1.0, 0.0, 1.0, 1.0, closed_left=False)
    q1m = SlantedBox(o, -3.0, -2.0, 1.0, 1.0, closed_left=False)
    q2 = SlantedBox(o, -(2.0 ** (2 * s)), 0.0, 2.0 ** (1 + 2 * s), 2.0, closed_left=False)
    q3 = SlantedBox(o, -(3.0 ** (2 * s)), 0.0, 3.0 ** (1 + 2 * s), 3.0, closed_left=False)
    return {"Q1": q1, "Q1_minus": q1m, "Q2": q2, "Q3": q3}


def poincare_terms(K: KernelSpec, f: GridField, h, eps: float, sigma: float, C: float = 1.0) -> PoincareReport:
    """Both sides of the hypoelliptic weak Poincare inequality.

    LHS ``||(f - <f>_{Q1^-})_+||_{L^1(Q1)}``. RHS terms: the square-root
    v-energy over ``(-3^{2s}, 0] x B_{3^{1+2s}} x (v-box)`` with weight
    ``eps^{-(d+2)}``, the kernel skew term with weight ``eps^{-d}``, the
    ``L^1 + W^{sigma,1}_x`` norm over ``Q2`` with weight ``eps^sigma`` and
    ``||h||_{L^1(Q3)}``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    check_sigma(sigma, K.s)
    d, s = f.d, K.s
    reg = poincare_regions(d, s)
    vals = f.values
    ref = float(vals.flat[0])
    wm = gridops.box_weights(f, reg["Q1_minus"])
    vol_m = float(wm.sum())
    if vol_m == 0:
        raise ValueError("the grid does not resolve Q1^-")
    mean = ref + float(np.sum((vals - ref) * wm)) / vol_m
    lhs = gridops.integrate(f, np.maximum(vals - mean, 0.0), gridops.box_weights(f, reg["Q1"]))
    pw3 = gridops.product_weights(f, reg["Q3"])
    pw3 = gridops.ProductWeights(pw3.wt, pw3.wx, np.ones_like(pw3.wv))
    Km = kernel_matrix(K, f.v_grid)
    tails = tail_mass(K, f.v_grid) if K.radial else None
    sym = gridops.sqrt_energy(f, vals, pw3, Km, tails)
    skew = gridops.skew_term(f, vals, pw3, Km)
    pw2 = gridops.product_weights(f, reg["Q2"])
    w2 = pw2.full(d)
    sob = gridops.integrate(f, np.abs(vals), w2) + gridops.x_gagliardo_l1(f, vals, pw2, sigma)
    src = gridops.integrate(f, np.abs(_h_values(f, h)), gridops.box_weights(f, reg["Q3"]))
    weights = (eps ** -(d + 2), eps ** -d, eps**sigma, 1.0)
    return PoincareReport(lhs, sym, skew, sob, src, eps, sigma, C, weights, mean)


# ---------------------------------------------------- intermediate value lemma

def ivl_logs(d: int, delta1: float, delta2: float, sigma: float, C: float = 1.0) -> dict:
    """``ln eps``, ``ln mu`` and ``ln`` of the measure lower bound factor
    ``((delta1 delta2/4) eps^{d+2} mu)^2`` (times ``r0^n``)."""
    for name, x in (("delta1", delta1), ("delta2", delta2)):
        if not 0 < x <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    lp = math.log(delta1 * delta2 / (4 * C))
    log_eps = lp / sigma
    # delta2 + 1/delta1 + eps^{-(d+2)}/delta1, summed in log space
    parts = np.array([math.log(delta2), -math.log(delta1), -(d + 2) * log_eps - math.log(delta1)])
    log_den = float(np.logaddexp.reduce(parts))
    log_mu = 2 * (lp - log_den)
    log_factor = 2 * (math.log(delta1 * delta2 / 4) + (d + 2) * log_eps + log_mu)
    return {"eps_log": log_eps, "mu_log": log_mu, "measure_factor_log": log_factor}


@dataclass(frozen=True)
class IVLReport:
    hypotheses_hold: bool
    intermediate_measure: float
    nu_bound_log: float
    mu_log: float
    nu_log: float
    eps_log: float
    hypothesis_measures: tuple
    h_sup: float
    conclusion_holds: Optional[bool]
    C: float

    def to_dict(self) -> dict:
        return {"hypotheses_hold": self.hypotheses_hold, "intermediate_measure": self.intermediate_measure,
                "nu_bound_log": self.nu_bound_log, "mu_log": self.mu_log, "nu_log": self.nu_log, "eps_log": self.eps_log,
                "hypothesis_measures": list(self.hypothesis_measures), "h_sup": self.h_sup,
                "conclusion_holds": self.conclusion_holds, "C": self.C}


def ivl_check(K: KernelSpec, f: GridField, h, r0: float, delta1: float, delta2: float,
              sigma: Optional[float] = None, C: float = 1.0) -> IVLReport:
    """Hypotheses and conclusion of the intermediate value lemma on a grid field.

    ``nu_bound_log`` is the log of the lower bound ``nu |Q_{1/2}|`` for ``|{phi0 < f < phi2}|`` on the fixed
    window ``(-3, 0] x B_{(1/2)^{1+2s}} x B_{1/2}``.
    """
    if not 0 < r0 < 1 / 3:
        raise ValueError("r0 must lie in (0, 1/3)")
    d, s = f.d, K.s
    sigma = 0.5 * sigma_max(s) if sigma is None else sigma
    check_sigma(sigma, s)
    logs = ivl_logs(d, delta1, delta2, sigma, C)
    mu = math.exp(logs["mu_log"])
    mu2 = math.exp(2 * logs["mu_log"])
    o = KineticPoint.origin(d)
    qm = make_cylinder(o, r0, s, Variant.PAST).box
    q = make_cylinder(o, r0, s, Variant.PLAIN).box
    q3 = make_cylinder(o, 3 * r0, s, Variant.PLAIN).box
    wm, wq = gridops.box_weights(f, qm), gridops.box_weights(f, q)
    vm, vq = float(wm.sum()) * f.cell_volume, float(wq.sum()) * f.cell_volume
    if vm == 0 or vq == 0:
        raise ValueError("the grid does not resolve Q_{r0} and Q^-_{r0}")
    m1 = gridops.measure(f, f.values <= 0, wm)
    m2 = gridops.measure(f, f.values > 1 - mu2, wq)
    hs = max(gridops.sup_over(f, np.abs(_h_values(f, h)), gridops.box_weights(f, q3)), 0.0)
    hyp = m1 >= delta1 * vm and m2 >= delta2 * vq and hs <= C * mu2
    B = Barriers(r0, mu, s)
    p0, _, p2 = barrier_arrays(B, f)
    half = SlantedBox(o, -3.0, 0.0, 0.5 ** (1 + 2 * s), 0.5, closed_left=False)
    inter = gridops.measure(f, (p0 < f.values) & (f.values < p2), gridops.box_weights(f, half))
    n = total_dimension(d, s)
    bound_log = logs["measure_factor_log"] + n * math.log(r0)
    q_half = make_cylinder(o, 0.5, s).volume()
    nu_log = bound_log - math.log(q_half)
    concl = None
    if hyp:
        concl = inter > 0 and math.log(inter) >= bound_log
    return IVLReport(hyp, inter, bound_log, logs["mu_log"], nu_log, logs["eps_log"], (m1, vm, m2, vq),
                     hs, concl, C)


# ------------------------------------------------------ constants and exponents

def mtp_constants(delta: float, d: int) -> dict:
    """``ln theta = 2(1 + delta^{-(18d+46)}) ln delta`` and ``ln(-ln theta)``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    e = 18 * d + 46
    ld = math.log(delta)
    lnl = math.log(2) + e * (-ld) + math.log1p(delta**e) + math.log(-ld)
    try:
        theta_log = 2 * (1 + delta ** (-e)) * ld
    except OverflowError:
        theta_log = -math.inf
    return {"theta_log": theta_log, "log_neg_theta_log": lnl, "exponent": e}


@dataclass(frozen=True)
class PaperConstants:
    d: int
    s: float
    p: float
    n: float
    p_critical: float
    p_star: float
    sigma_max: float
    beta1: float
    beta2: float
    log2_Q: float
    mu_exponents: tuple
    nu_exponent: int
    theta_exponent: int
    zeta_exponent: int
    log_integrability_powers: tuple
    m_threshold: float
    delta0_max_log: float
    eps_log: float
    mu_log: float
    nu_factor_log: float
    theta_log: float
    log_neg_theta_log: float
    zeta_log: float
    M_log: float
    C: float

    def to_dict(self) -> dict:
        out = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            out[k] = list(v) if isinstance(v, tuple) else v
        return out


def paper_constants(d: int, s: float, p: float, delta1: float = 0.5, delta2: float = 0.5,
                    delta0: float = 0.5, delta: float = 0.5, sigma: Optional[float] = None,
                    C: float = 1.0, m: Optional[float] = None) -> PaperConstants:
    """Closed-form exponents and the log-space constants of the lemma chain."""
    check_p(p, d, s)
    sigma = 0.5 * sigma_max(s) if sigma is None else sigma
    b1, b2 = lemma_exponents(p)
    mthr = 5 ** (1 / (2 * s))
    m = mthr if m is None else m
    logs = ivl_logs(d, delta1, delta2, sigma, C)
    mtp = mtp_constants(delta, d)
    z_exp = 18 * d + 47
    zeta_log = z_exp * math.log(delta0)
    return PaperConstants(
        d=d, s=s, p=p, n=total_dimension(d, s), p_critical=critical_p(d, s), p_star=p_star(d, s),
        sigma_max=sigma_max(s), beta1=b1, beta2=b2, log2_Q=log2_Q(p),
        mu_exponents=(6 * d + 16, 6 * d + 14), nu_exponent=18 * d + 46, theta_exponent=18 * d + 46,
        zeta_exponent=z_exp, log_integrability_powers=(1 / (18 * d + 47), 1 / (18 * d + 48)),
        m_threshold=mthr, delta0_max_log=(2 * d + 2 * s * (d + 1)) * math.log(4 / (1225 * m * m)),
        eps_log=logs["eps_log"], mu_log=logs["mu_log"], nu_factor_log=logs["measure_factor_log"],
        theta_log=mtp["theta_log"], log_neg_theta_log=mtp["log_neg_theta_log"], zeta_log=zeta_log,
        M_log=-mtp["theta_log"], C=C,
    )
