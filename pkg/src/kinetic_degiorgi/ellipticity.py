"""Numerical checks of the kernel ellipticity class and the cone-of-directions
lower bound for Boltzmann-type kernels.

Singular radial integrals around ``v`` are done in polar coordinates: an
antipodal direction lattice times Gauss-Legendre rules on dyadic shells. The
innermost ball of ``int_{B_r(v)} K |v-w|^2`` is extrapolated with the scaling
``rho^{2-2s}`` that the condition itself asserts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .kernels import KernelKind, KernelSpec, VelocityGrid, gagliardo_energy, hyperplane_weight, kernel_matrix, kernel_values, tail_mass
from .quadrature import gauss_legendre, sphere_area, sphere_directions

ANALYTIC_RTOL = 1e-6
SAMPLED_MARGIN = 0.10

CONDITIONS = ("coercivity", "coercivity_sqrt", "upperbound2", "upperbound_rings",
              "cancellation1", "cancellation2", "coercivity_full")


@dataclass
class ConditionRecord:
    condition: str
    lhs: float
    rhs: float
    constant: float
    required: float
    passed: Optional[bool]
    witness: str
    certificate: str = "quadrature"
    decisive: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ComplianceReport:
    kernel: str
    s: float
    d: int
    lam: float
    Lam: float
    records: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.records.values())

    def __getitem__(self, name: str) -> ConditionRecord:
        return self.records[name]

    def to_dict(self) -> dict:
        return {"kernel": self.kernel, "s": self.s, "d": self.d, "lambda": self.lam, "Lambda": self.Lam,
                "passed": self.passed,
                "conditions": [self.records[c].to_dict() for c in CONDITIONS if c in self.records]}


def fractional_laplacian_constants(d: int, s: float) -> dict:
    """Analytic constants of ``|v-w|^{-(d+2s)}``.

    ``upperbound2``: ``int_{B_r} K |u|^2 = |S| r^{2-2s} / (2-2s)``;
    ``rings``: ``int_{B_{2r} \\ B_r} K = (1 - 2^{-2s}) |S| r^{-2s} / (2s)``.
    """
    S = sphere_area(d)
    return {"upperbound2": S / (2 - 2 * s), "rings": (1 - 2 ** (-2 * s)) * S / (2 * s)}


def _polar(v: np.ndarray, r_lo: float, r_hi: float, d: int, n_dirs: int, n_gl: int, n_shells: int):
    """Nodes ``w = v + rho theta`` and weights ``rho^{d-1} w_rho w_theta``."""
    dirs, wd = sphere_directions(d, n_dirs)
    edges = np.geomspace(r_lo, r_hi, n_shells + 1)
    rho, wr = gauss_legendre(edges[:-1], edges[1:], n_gl)
    rho, wr = rho.ravel(), wr.ravel()
    pts = v[None, None, :] + rho[None, :, None] * dirs[:, None, :]
    wts = wd[:, None] * (wr * rho ** (d - 1))[None, :]
    return pts, wts, dirs, rho


def _kv(K: KernelSpec, v, w) -> np.ndarray:
    return kernel_values(K, np.broadcast_to(v, np.shape(w)), w)


@dataclass(frozen=True)
class RadialRule:
    n_dirs: int = 64
    n_gl: int = 16
    n_dyadic: int = 24


def upperbound2_integral(K: KernelSpec, v, r: float, rule: RadialRule = RadialRule()) -> float:
    """``int_{B_r(v)} K(v, w) |v - w|^2 dw``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    a = 2 - 2 * K.s
    total = 0.0
    last = 0.0
    for k in range(rule.n_dyadic):
        hi = r * 2.0**-k
        pts, wts, _, rho = _polar(v, hi / 2, hi, K.d, rule.n_dirs, rule.n_gl, 1)
        last = float(np.sum(_kv(K, v, pts) * rho[None, :] ** 2 * wts))
        total += last
    # B_{r 2^{-n}}: geometric series of the last shell under rho^{2-2s} scaling
    return total + last / (2.0**a - 1)


def ring_integral(K: KernelSpec, v, r: float, rule: RadialRule = RadialRule(), second_line: bool = False,
                  Rbar: Optional[float] = None) -> float:
    """``int_{B_{2r}(v) \\ B_r(v)} K(v, w) dw``; with ``second_line`` the
    integral over the first argument, restricted to ``B_Rbar``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    pts, wts, _, _ = _polar(v, r, 2 * r, K.d, rule.n_dirs, rule.n_gl, 1)
    if not second_line:
        return float(np.sum(_kv(K, v, pts) * wts))
    vals = kernel_values(K, pts, np.broadcast_to(v, pts.shape))
    if Rbar is not None:
        vals = vals * (np.linalg.norm(pts, axis=-1) < Rbar)
    return float(np.sum(vals * wts))


def cancellation_integrals(K: KernelSpec, v, r: float, r_far: float, rule: RadialRule = RadialRule()):
    """``PV int (K(v,w) - K(w,v)) dw`` over ``B_{r_far}(v)`` and
    ``|PV int_{B_r(v)} (v - w)(K(v,w) - K(w,v)) dw|``, both over symmetric shells."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    def asym(lo, hi, n_shells):
        pts, wts, dirs, rho = _polar(v, lo, hi, K.d, rule.n_dirs, rule.n_gl, n_shells)
        a = (_kv(K, v, pts) - kernel_values(K, pts, np.broadcast_to(v, pts.shape))) * wts
        return a, dirs, rho

    a_in, dirs, rho = asym(r * 2.0**-rule.n_dyadic, r, rule.n_dyadic)
    c1 = float(np.sum(a_in))
    if r_far > r:
        a_out, _, _ = asym(r, r_far, max(1, int(math.ceil(math.log2(r_far / r)))))
        c1 += float(np.sum(a_out))
    vec = -(rho[None, :, None] * dirs[:, None, :]) * a_in[..., None]
    c2 = float(np.linalg.norm(vec.sum(axis=(0, 1))))
    return c1, c2


def _ball_mask(grid: VelocityGrid, R: float) -> np.ndarray:
    return np.linalg.norm(grid.flat_points(), axis=-1) < R


def _check_test_support(grid: VelocityGrid, phi: np.ndarray, R: float, name: str) -> None:
    outside = ~_ball_mask(grid, R)
    if np.any(np.asarray(phi).reshape(-1)[outside] != 0):
        raise ValueError(f"test function {name} is not supported in B_{R:g}")


def _pair_sums(K: KernelSpec, grid: VelocityGrid, phi: np.ndarray, Kmat: np.ndarray):
    """Both sides of the two coercivity conditions for one test function."""
    pts = grid.flat_points()
    f = phi.reshape(-1)
    h2 = grid.cell_volume**2
    inner = _ball_mask(grid, K.Rbar / 2)
    outer = _ball_mask(grid, K.Rbar)
    r = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    diff = np.abs(f[:, None] - f[None, :])
    mi = inner[:, None] & inner[None, :]
    mo = outer[:, None] & outer[None, :]
    g2 = np.sum((diff**2 * r ** (-(K.d + 2 * K.s)))[mi]) * h2
    k2 = np.sum((diff**2 * Kmat)[mo]) * h2
    g1 = np.sum((diff * r ** (-(K.d + 2 * K.s) / 2))[mi]) * h2
    k1 = np.sum((diff * np.sqrt(Kmat))[mo]) * h2
    return float(g2), float(k2), float(g1), float(k1)


def _lower_record(name, lam, lhs_unit, rhs, witness) -> ConditionRecord:
    constant = rhs / lhs_unit if lhs_unit > 0 else math.inf
    passed = constant >= lam * (1 - ANALYTIC_RTOL)
    decisive = abs(constant - lam) > SAMPLED_MARGIN * lam
    return ConditionRecord(name, lam * lhs_unit, rhs, constant, lam, passed, witness, "sampled", decisive)


def check_ellipticity(K: KernelSpec, grid: VelocityGrid, test_functions: Sequence, radii: Iterable[float],
                      v_samples: Optional[Sequence] = None, rule: RadialRule = RadialRule(),
                      r_far: Optional[float] = None) -> ComplianceReport:
    """Evaluate both sides of every ellipticity condition.

    ``test_functions`` are velocity slices on ``grid`` (or ``(name, slice)``
    pairs) supported in ``B_{Rbar/2}``; the grid should cover ``B_Rbar``.
    Lower bounds are sampled certificates over the family: the reported
    constant is the worst ratio found.
    """
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise ValueError("radii must be positive")
    named = []
    for i, tf in enumerate(test_functions):
        name, phi = tf if isinstance(tf, tuple) else (f"tf{i}", tf)
        phi = np.asarray(phi, dtype=float)
        if phi.shape != grid.shape:
            raise ValueError(f"test function {name} does not match the grid")
        _check_test_support(grid, phi, K.Rbar / 2, name)
        named.append((name, phi))
    if v_samples is None:
        v_samples = [np.zeros(K.d)] + [np.full(K.d, c * K.Rbar / math.sqrt(K.d)) for c in (0.3, -0.6, 0.9)]
    v_samples = [np.atleast_1d(np.asarray(v, dtype=float)) for v in v_samples]
    r_far = r_far if r_far is not None else 16 * K.Rbar
    rep = ComplianceReport(K.kind.value, K.s, K.d, K.lam, K.Lam)

    if named:
        Kmat = kernel_matrix(K, grid)
        np.fill_diagonal(Kmat, 0.0)
        tails = tail_mass(K, grid) if K.radial else None
        worst = {}
        for name, phi in named:
            g2, k2, g1, k1 = _pair_sums(K, grid, phi, Kmat)
            f = phi.reshape(-1)
            # int int (phi(v) - phi(w)) K phi(v), plus the zero-extension tail
            cross = float(f @ (Kmat.sum(axis=1) * f - Kmat @ f)) * grid.cell_volume**2
            if tails is not None:
                cross += float(np.sum(f**2 * tails)) * grid.cell_volume
            l2 = float(np.sum(f**2)) * grid.cell_volume
            full = 0.5 * gagliardo_energy(grid, phi, K.s)
            for cond, lhs_u, rhs in (("coercivity", g2, k2), ("coercivity_sqrt", g1, k1),
                                     ("coercivity_full", full, cross + K.Lam * l2)):
                if lhs_u == 0 and rhs == 0:
                    continue
                c = rhs / lhs_u if lhs_u > 0 else math.inf
                if cond not in worst or c < worst[cond][0]:
                    worst[cond] = (c, lhs_u, rhs, name)
        for cond, (c, lhs_u, rhs, name) in worst.items():
            rep.records[cond] = _lower_record(cond, K.lam, lhs_u, rhs, name)

    ub2, wit2 = -math.inf, ""
    ring, witr = -math.inf, ""
    c1m, witc1 = 0.0, ""
    c2ratio, witc2 = 0.0, ""
    for v in v_samples:
        for r in radii:
            val = upperbound2_integral(K, v, r, rule) / r ** (2 - 2 * K.s)
            if val > ub2:
                ub2, wit2 = val, f"v={v.tolist()}, r={r:g}"
            a = ring_integral(K, v, r, rule) * r ** (2 * K.s)
            b = ring_integral(K, v, r, rule, second_line=True, Rbar=K.Rbar) * r ** (2 * K.s)
            if max(a, b) > ring:
                ring, witr = max(a, b), f"v={v.tolist()}, r={r:g}"
            c1, c2 = cancellation_integrals(K, v, r, max(r_far, 2 * r), rule)
            if abs(c1) >= c1m:
                c1m, witc1 = abs(c1), f"v={v.tolist()}"
            q = c2 / (1 + r ** (1 - 2 * K.s))
            if q >= c2ratio:
                c2ratio, witc2 = q, f"v={v.tolist()}, r={r:g}"
    tol = 1 + ANALYTIC_RTOL
    rep.records["upperbound2"] = ConditionRecord("upperbound2", ub2, K.Lam, ub2, K.Lam, ub2 <= K.Lam * tol, wit2)
    rep.records["upperbound_rings"] = ConditionRecord("upperbound_rings", ring, K.Lam, ring, K.Lam, ring <= K.Lam * tol, witr)
    rep.records["cancellation1"] = ConditionRecord("cancellation1", c1m, K.Lam, c1m, K.Lam, c1m <= K.Lam * tol, witc1)
    enforce = K.s >= 0.5
    rep.records["cancellation2"] = ConditionRecord(
        "cancellation2", c2ratio, K.Lam, c2ratio, K.Lam, (c2ratio <= K.Lam * tol) if enforce else None, witc2,
        "quadrature" if enforce else "informational")
    return rep


def equivalence_ratios(K: KernelSpec, v, radii: Iterable[float], rule: RadialRule = RadialRule()) -> list[float]:
    """``C_ring(r) / C_ub2(2r)`` per radius; bounded by ``2^{2-2s} <= 4``."""
    out = []
    for r in radii:
        ring = ring_integral(K, v, r, rule) * r ** (2 * K.s)
        ub = upperbound2_integral(K, v, 2 * r, rule) / (2 * r) ** (2 - 2 * K.s)
        out.append(ring / ub)
    return out


@dataclass
class ConeSample:
    v: list
    directions: np.ndarray
    in_cone: np.ndarray
    measure: float
    lambda_achieved: float
    lambda_sup: float
    implied_c: float

    def to_dict(self) -> dict:
        return {"v": self.v, "measure": self.measure, "n_directions": int(len(self.in_cone)),
                "n_in_cone": int(self.in_cone.sum()), "lambda_achieved": self.lambda_achieved,
                "lambda_sup": self.lambda_sup, "implied_c": self.implied_c}


@dataclass
class ConeReport:
    lam: float
    c0: float
    C0: float
    samples: list

    @property
    def inconclusive(self) -> bool:
        return any(smp.measure == 0 for smp in self.samples)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "c0": self.c0, "C0": self.C0, "inconclusive": self.inconclusive,
                "samples": [smp.to_dict() for smp in self.samples]}


def cone_lower_bound(K: KernelSpec, v_samples: Sequence, lam: float, n_dirs: int = 64,
                     rho_samples: Sequence[float] = (0.05, 0.1, 0.2, 0.4, 0.8),
                     c0: float = 0.25, C0: float = 4.0) -> ConeReport:
    """Directions ``e`` with ``K(v, v - rho e) rho^{d+2s} >= lam (1 + |v|^{1+2s+gamma})``
    at every sampled ``rho``; the measure of ``A(v)`` is fraction times sphere area.

    For Boltzmann kernels the left side does not depend on ``rho`` and equals
    the hyperplane weight, so one evaluation per direction suffices.
    """
    if K.kind is KernelKind.BOLTZMANN and K.d < 2:
        raise ValueError("cone analysis of boltzmann kernels needs d >= 2")
    if K.d > 3:
        raise ValueError("cone analysis supports d <= 3")
    gamma = K.gamma if K.gamma is not None else 0.0
    dirs, wts = sphere_directions(K.d, n_dirs)
    out = []
    for v in v_samples:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        weight = 1 + np.linalg.norm(v) ** (1 + 2 * K.s + gamma)
        if K.kind is KernelKind.BOLTZMANN:
            ratio = hyperplane_weight(K, np.broadcast_to(v, dirs.shape), dirs) / weight
        else:
            rho = np.asarray(rho_samples, dtype=float)
            pts = v[None, None, :] - rho[None, :, None] * dirs[:, None, :]
            vals = _kv(K, v, pts) * rho[None, :] ** (K.d + 2 * K.s)
            ratio = vals.min(axis=1) / weight
        ok = ratio >= lam
        meas = float(np.sum(wts[ok]))
        achieved = float(ratio[ok].min()) if ok.any() else 0.0
        out.append(ConeSample(v.tolist(), dirs, ok, meas, achieved, float(ratio.max()),
                              meas * (1 + float(np.linalg.norm(v)))))
    return ConeReport(lam, c0, C0, out)


@dataclass
class SqrtCoercivityResult:
    lhs: float
    rhs: float
    ratio: float
    inconclusive: bool

    def to_dict(self) -> dict:
        return asdict(self)


def sqrt_coercivity_check(K: KernelSpec, cone: ConeReport, grid: VelocityGrid, g, R: float) -> SqrtCoercivityResult:
    """``int_{B_R^2} |g(v)-g(v')| |v-v'|^{-(d/2+s)}`` against
    ``int_{B_{2R}^2} |g(v)-g(v')| K^{1/2}`` by double sums over the grid."""
    g = np.asarray(g, dtype=float)
    if g.shape != grid.shape:
        raise ValueError("g does not match the grid")
    _check_test_support(grid, g, R, "g")
    pts = grid.flat_points()
    f = g.reshape(-1)
    inner = _ball_mask(grid, R)
    outer = _ball_mask(grid, 2 * R)
    ip, op = pts[inner], pts[outer]
    h2 = grid.cell_volume**2
    r = np.linalg.norm(ip[:, None, :] - ip[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    lhs = float(np.sum(np.abs(f[inner][:, None] - f[inner][None, :]) * r ** (-(K.d / 2 + K.s)))) * h2
    fo = f[outer]
    rhs = 0.0
    for i, p in enumerate(op):
        kv = kernel_values(K, p[None, :], op)
        kv[i] = 0.0
        rhs += float(np.sum(np.abs(fo[i] - fo) * np.sqrt(kv)))
    rhs *= h2
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return SqrtCoercivityResult(lhs, rhs, ratio, cone.inconclusive)
