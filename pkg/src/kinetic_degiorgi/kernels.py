"""Non-local kernels, sampled fields, the principal-value operator and the
bilinear form.

Fractional-Laplacian kernels are normalised as ``K(v, w) = |v - w|^{-(d+2s)}``
with constant 1; the ellipticity constants absorb the usual ``c_{d,s}``.
Boltzmann kernels use the hyperplane representation

    K_f(v, v') = (int_{w . (v - v') = 0} f(v + w) |w|^{gamma+1+2s} dw) |v - v'|^{-(d+2s)}

with the implicit constant set to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .geometry import KineticPoint
from .quadrature import sphere_directions, unit_ball_volume


def _uniform_axis(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    if a.size > 1:
        h = np.diff(a)
        if not np.all(h > 0):
            raise ValueError(f"{name} spacing must be positive")
        if not np.allclose(h, h[0], rtol=1e-9, atol=0):
            raise ValueError(f"{name} must be uniform")
    return a


def uniform_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """Node-centred axis: ``n`` cells tiling [lo, hi], nodes at the cell midpoints."""
    h = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * h


@dataclass(frozen=True)
class VelocityGrid:
    """Tensor grid of uniform velocity axes. Each node owns a cell of side ``h``."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(_uniform_axis(a, f"v axis {i}") for i, a in enumerate(self.axes))
        if not axes:
            raise ValueError("need at least one velocity axis")
        for a in axes:
            if a.size < 2:
                raise ValueError("velocity axes need at least 2 nodes")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def cube(cls, d: int, half_width: float, n: int) -> "VelocityGrid":
        ax = uniform_axis(-half_width, half_width, n)
        return cls(tuple(ax.copy() for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    @property
    def h(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.axes])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def lower(self) -> np.ndarray:
        """Lower cell edges of the box covered by the grid."""
        return np.array([a[0] for a in self.axes]) - self.h / 2

    @property
    def upper(self) -> np.ndarray:
        return np.array([a[-1] for a in self.axes]) + self.h / 2

    def points(self) -> np.ndarray:
        """Nodes as an array of shape ``shape + (d,)``."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, self.d)


@dataclass(frozen=True)
class GridField:
    """Samples of ``f(t, x, v)`` on a uniform kinetic grid.

    ``values`` has shape ``(Nt, Nx_1..Nx_d, Nv_1..Nv_d)``. ``far_field_v`` is
    the constant assumed for velocities outside the v-box.
    """

    t: np.ndarray
    x_axes: tuple
    v_axes: tuple
    values: np.ndarray
    far_field_v: float = 0.0
    x_periodic: bool = False
    nonnegative: bool = False

    def __post_init__(self):
        t = _uniform_axis(self.t, "t axis")
        xs = tuple(_uniform_axis(a, f"x axis {i}") for i, a in enumerate(self.x_axes))
        vs = tuple(_uniform_axis(a, f"v axis {i}") for i, a in enumerate(self.v_axes))
        if len(xs) != len(vs) or not xs:
            raise ValueError("x and v need the same positive number of axes")
        vals = np.asarray(self.values, dtype=float)
        shape = (t.size, *(a.size for a in xs), *(a.size for a in vs))
        if vals.shape != shape:
            raise ValueError(f"values have shape {vals.shape}, grid needs {shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if not math.isfinite(self.far_field_v):
            raise ValueError("far_field_v must be finite")
        if self.nonnegative and (vals.min(initial=0.0) < 0 or self.far_field_v < 0):
            raise ValueError("field flagged nonnegative has negative values")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x_axes", xs)
        object.__setattr__(self, "v_axes", vs)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return len(self.x_axes)

    @property
    def v_grid(self) -> VelocityGrid:
        return VelocityGrid(self.v_axes)

    @staticmethod
    def _step(a: np.ndarray) -> float:
        return float(a[1] - a[0]) if a.size > 1 else 1.0

    @property
    def dt(self) -> float:
        return self._step(self.t)

    @property
    def dx(self) -> np.ndarray:
        return np.array([self._step(a) for a in self.x_axes])

    @property
    def dv(self) -> np.ndarray:
        return np.array([self._step(a) for a in self.v_axes])

    @property
    def cell_volume(self) -> float:
        return self.dt * float(np.prod(self.dx)) * float(np.prod(self.dv))

    def with_values(self, values, nonnegative: Optional[bool] = None, far_field_v: Optional[float] = None) -> "GridField":
        return GridField(self.t, self.x_axes, self.v_axes, values,
                         self.far_field_v if far_field_v is None else far_field_v,
                         self.x_periodic, self.nonnegative if nonnegative is None else nonnegative)

    def mesh(self):
        """Broadcastable coordinate arrays ``(T, X_1..X_d, V_1..V_d)``."""
        return np.meshgrid(self.t, *self.x_axes, *self.v_axes, indexing="ij", sparse=True)

    def locate(self, z: KineticPoint, tol: float = 1e-9) -> tuple:
        """Index tuple of the node at ``z``; raises if ``z`` is off-grid."""
        if z.d != self.d:
            raise ValueError(f"dimension mismatch: point has d={z.d}, field d={self.d}")
        idx = []
        for c, a in zip((z.t, *z.x, *z.v), (self.t, *self.x_axes, *self.v_axes)):
            i = int(np.argmin(np.abs(a - float(c))))
            step = self._step(a)
            if abs(a[i] - float(c)) > tol * max(1.0, step):
                raise ValueError(f"point coordinate {c} is not a grid node")
            idx.append(i)
        return tuple(idx)


class KernelKind(str, Enum):
    FRACTIONAL_LAPLACIAN = "fractional_laplacian"
    BOLTZMANN = "boltzmann"
    CUSTOM = "custom"


@dataclass(frozen=True)
class KernelSpec:
    """A non-negative kernel with its ellipticity metadata.

    ``density`` (Boltzmann kind) holds cell values on ``density_grid``; values
    outside the grid are taken as zero. ``func`` (custom kind) maps arrays
    ``v, w`` of shape ``(..., d)`` to kernel values.
    """

    s: float
    d: int
    lam: float = 1.0
    Lam: float = 1.0
    Rbar: float = 2.0
    kind: KernelKind = KernelKind.FRACTIONAL_LAPLACIAN
    gamma: Optional[float] = None
    density: Optional[np.ndarray] = None
    density_grid: Optional[VelocityGrid] = None
    func: Optional[Callable] = None
    line_step: Optional[float] = None
    n_angles: int = 64
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.d < 1:
            raise ValueError("d must be positive")
        if not 0 < self.lam <= self.Lam:
            raise ValueError("need 0 < lambda <= Lambda")
        if not self.Rbar > 0:
            raise ValueError("Rbar must be positive")
        if self.kind is KernelKind.BOLTZMANN:
            if self.gamma is None or self.density is None or self.density_grid is None:
                raise ValueError("boltzmann kernels need gamma, density and density_grid")
            if not -self.d < self.gamma <= 1:
                raise ValueError(f"gamma must lie in (-d, 1], got {self.gamma}")
            if self.gamma + 2 * self.s > 2:
                raise ValueError("boltzmann kernels need gamma + 2s <= 2")
            dens = np.asarray(self.density, dtype=float)
            if dens.shape != self.density_grid.shape:
                raise ValueError("density shape does not match its grid")
            if dens.min() < 0:
                raise ValueError("density must be nonnegative")
            if self.d >= 2:
                interp = RegularGridInterpolator(self.density_grid.axes, dens, bounds_error=False, fill_value=0.0)
                object.__setattr__(self, "_interp", interp)
        if self.kind is KernelKind.CUSTOM and self.func is None:
            raise ValueError("custom kernels need func")

    @property
    def radial(self) -> bool:
        """True for translation-invariant radial kernels (analytic tails apply)."""
        return self.kind is KernelKind.FRACTIONAL_LAPLACIAN


def fractional_laplacian(s: float, d: int = 1, **kw) -> KernelSpec:
    return KernelSpec(s=s, d=d, kind=KernelKind.FRACTIONAL_LAPLACIAN, **kw)


def ball_density(grid: VelocityGrid, radius: float = 1.0, supersample: int = 16) -> np.ndarray:
    """Cell averages of the indicator of ``B_radius`` (midpoint supersampling)."""
    sub = (np.arange(supersample) + 0.5) / supersample - 0.5
    pts = grid.points()
    acc = np.zeros(grid.shape)
    offsets = np.stack(np.meshgrid(*([sub] * grid.d), indexing="ij"), axis=-1).reshape(-1, grid.d)
    for o in offsets:
        acc += np.sum((pts + o * grid.h) ** 2, axis=-1) <= radius**2
    return acc / len(offsets)


def maxwellian_density(grid: VelocityGrid, mass: float = 1.0, temperature: float = 1.0) -> np.ndarray:
    pts = grid.points()
    d = grid.d
    return mass * (2 * math.pi * temperature) ** (-d / 2) * np.exp(-np.sum(pts**2, axis=-1) / (2 * temperature))


def boltzmann_kernel(s: float, d: int, gamma: float, grid: VelocityGrid, density, **kw) -> KernelSpec:
    return KernelSpec(s=s, d=d, kind=KernelKind.BOLTZMANN, gamma=gamma,
                      density=np.asarray(density, dtype=float), density_grid=grid, **kw)


def _perp_basis(e: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to each row of ``e``.
    Returns shape (P, d-1, d)."""
    P, d = e.shape
    if d == 2:
        return np.stack([-e[:, 1], e[:, 0]], axis=-1)[:, None, :]
    # d = 3: Gram-Schmidt against the least aligned coordinate axis
    ax = np.eye(3)[np.argmin(np.abs(e), axis=1)]
    b1 = ax - np.sum(ax * e, axis=1, keepdims=True) * e
    b1 /= np.linalg.norm(b1, axis=1, keepdims=True)
    b2 = np.cross(e, b1)
    return np.stack([b1, b2], axis=1)


def hyperplane_weight(K: KernelSpec, v: np.ndarray, e: np.ndarray) -> np.ndarray:
    """``int_{w . e = 0} f(v + w) |w|^{gamma+1+2s} dw`` for rows of ``v`` and unit ``e``.

    Midpoint rule in polar coordinates on the hyperplane, truncated where the
    ray leaves the density grid.
    """
    if K.kind is not KernelKind.BOLTZMANN:
        raise ValueError("hyperplane weights are defined for boltzmann kernels")
    if K.d == 1:
        raise ValueError("boltzmann kernels are unsupported in d = 1 (the hyperplane is a point)")
    if K.d > 3:
        raise NotImplementedError("boltzmann kernels are provided for d <= 3")
    v = np.atleast_2d(np.asarray(v, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    e = e / np.linalg.norm(e, axis=1, keepdims=True)
    v, e = np.broadcast_arrays(v, e)
    g = K.density_grid
    step = K.line_step if K.line_step is not None else float(g.h.min()) / 2
    corners = np.maximum(np.abs(g.lower), np.abs(g.upper))
    reach = np.linalg.norm(np.abs(v) + corners, axis=1)
    n_rho = int(np.ceil(reach.max() / step))
    rho = (np.arange(n_rho) + 0.5) * step
    power = K.gamma + 1 + 2 * K.s
    basis = _perp_basis(e)
    if K.d == 2:
        # the line through v, both half-lines
        b = basis[:, 0, :]
        out = np.zeros(len(v))
        for sign in (1.0, -1.0):
            pts = v[:, None, :] + sign * rho[None, :, None] * b[:, None, :]
            out += K._interp(pts) @ (rho**power) * step
        return out
    n_a = K.n_angles
    ang = (np.arange(n_a) + 0.5) * 2 * math.pi / n_a
    dirs = (np.cos(ang)[None, :, None] * basis[:, None, 0, :]
            + np.sin(ang)[None, :, None] * basis[:, None, 1, :])  # (P, n_a, 3)
    out = np.zeros(len(v))
    for j in range(n_a):
        pts = v[:, None, :] + rho[None, :, None] * dirs[:, j, None, :]
        out += K._interp(pts) @ (rho ** (power + 1)) * step * (2 * math.pi / n_a)
    return out


def kernel_values(K: KernelSpec, v, w) -> np.ndarray:
    """Vectorised kernel evaluation over broadcast arrays of shape ``(..., d)``.

    Coincident pairs give ``inf``; callers puncture them.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if K.d == 1:
        if v.ndim == 0 or v.shape[-1] != 1:
            v = v[..., None]
        if w.ndim == 0 or w.shape[-1] != 1:
            w = w[..., None]
    v, w = np.broadcast_arrays(v, w)
    if v.shape[-1] != K.d:
        raise ValueError(f"vectors have length {v.shape[-1]}, kernel d={K.d}")
    r = np.linalg.norm(v - w, axis=-1)
    with np.errstate(divide="ignore"):
        base = r ** (-(K.d + 2 * K.s))
    if K.kind is KernelKind.FRACTIONAL_LAPLACIAN:
        return base
    if K.kind is KernelKind.CUSTOM:
        return np.asarray(K.func(v, w), dtype=float)
    shape = r.shape
    vf = v.reshape(-1, K.d)
    df = (v - w).reshape(-1, K.d)
    rf = r.reshape(-1)
    out = np.full(rf.shape, np.inf)
    ok = rf > 0
    if np.any(ok):
        out[ok] = hyperplane_weight(K, vf[ok], df[ok] / rf[ok, None]) * base.reshape(-1)[ok]
    return out.reshape(shape)


def kernel_eval(K: KernelSpec, v, w) -> float:
    """``K(v, w)`` for a single pair ``v != w``."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if v.shape != (K.d,) or w.shape != (K.d,):
        raise ValueError(f"expected vectors of length {K.d}")
    if np.array_equal(v, w):
        raise ValueError("kernel is singular at v = w")
    if K.kind is KernelKind.BOLTZMANN and K.d == 1:
        raise ValueError("boltzmann kernels are unsupported in d = 1 (the hyperplane is a point)")
    val = float(kernel_values(K, v, w))
    if val < 0:
        raise ValueError(f"kernel evaluated negative at v={v}, w={w}")
    return val


def kernel_matrix(K: KernelSpec, grid: VelocityGrid) -> np.ndarray:
    """Dense ``K(v_i, v_j)`` over flattened grid nodes with a zero diagonal."""
    pts = grid.flat_points()
    if K.kind is KernelKind.BOLTZMANN:
        out = np.zeros((len(pts), len(pts)))
        for i, p in enumerate(pts):
            out[i] = kernel_values(K, p[None, :], pts)
    else:
        out = kernel_values(K, pts[:, None, :], pts[None, :, :])
    np.fill_diagonal(out, 0.0)
    return out


def exit_distances(grid: VelocityGrid, v: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Distance from each node in ``v`` (P, d) to the box boundary along ``dirs`` (m, d)."""
    lo, hi = grid.lower, grid.upper
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(dirs[None] > 0, (hi - v[:, None, :]) / dirs[None], np.inf)
        dn = np.where(dirs[None] < 0, (lo - v[:, None, :]) / dirs[None], np.inf)
    return np.min(np.minimum(up, dn), axis=-1)


def tail_mass(K: KernelSpec, grid: VelocityGrid, n_dirs: int = 256) -> np.ndarray:
    """``int_{outside box} K(v, w) dw`` at every node, for radial kernels.

    In polar coordinates around v the radial integral is
    ``rho_exit^{-2s} / (2s)``; d=1 is exact.
    """
    if not K.radial:
        raise ValueError("analytic tails need a radial kernel")
    dirs, wts = sphere_directions(grid.d, n_dirs)
    rho = exit_distances(grid, grid.flat_points(), dirs)
    return (rho ** (-2 * K.s) / (2 * K.s)) @ wts


def _laplacian(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Second differences summed over axes; one-sided copies at the edges."""
    out = np.zeros_like(g)
    for ax in range(g.ndim):
        gp = np.concatenate([np.take(g, [1], axis=ax), g, np.take(g, [-2], axis=ax)], axis=ax)
        sl = [slice(None)] * g.ndim
        c = gp[tuple(sl[:ax] + [slice(1, -1)] + sl[ax + 1:])]
        lft = gp[tuple(sl[:ax] + [slice(0, -2)] + sl[ax + 1:])]
        rgt = gp[tuple(sl[:ax] + [slice(2, None)] + sl[ax + 1:])]
        out += (lft - 2 * c + rgt) / h[ax] ** 2
    return out


def operator_on_slice(K: KernelSpec, grid: VelocityGrid, g: np.ndarray, far_field: float = 0.0,
                      near_field: bool = True, tails: bool = True) -> np.ndarray:
    """``PV int K(v, w) (g(w) - g(v)) dw`` at every node of ``grid``.

    Punctured-grid sum, plus (radial kernels only) a near-field correction
    for the punctured cell and the analytic tail against ``far_field``.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != grid.shape:
        raise ValueError(f"slice shape {g.shape} does not match grid {grid.shape}")
    if min(grid.shape) < 3:
        raise ValueError("grid too coarse to puncture: need >= 3 nodes per axis")
    Kmat = kernel_matrix(K, grid)
    gf = g.reshape(-1)
    out = (Kmat @ gf - Kmat.sum(axis=1) * gf) * grid.cell_volume
    if K.radial:
        if near_field:
            # equal-volume ball around v: int_{B_rho} |u|^{-d-2s} (u.D^2g.u)/2 du
            d = grid.d
            rho = (grid.cell_volume / unit_ball_volume(d)) ** (1 / d)
            area = d * unit_ball_volume(d)
            lap = _laplacian(g, grid.h).reshape(-1)
            out += lap / (2 * d) * area * rho ** (2 - 2 * K.s) / (2 - 2 * K.s)
        if tails:
            out += (far_field - gf) * tail_mass(K, grid)
    return out.reshape(grid.shape)


def apply_nonlocal_operator(K: KernelSpec, f: GridField, z: KineticPoint, near_field: bool = True) -> float:
    """``(L f)(z)`` for a grid node ``z``."""
    if K.d != f.d:
        raise ValueError("kernel and field dimensions differ")
    idx = f.locate(z)
    d = f.d
    g = f.values[idx[: 1 + d]]
    out = operator_on_slice(K, f.v_grid, g, f.far_field_v, near_field=near_field)
    return float(out[idx[1 + d:]])


def _check_support(g: np.ndarray, name: str) -> None:
    for ax in range(g.ndim):
        if np.any(np.take(g, 0, axis=ax) != 0) or np.any(np.take(g, -1, axis=ax) != 0):
            raise ValueError(f"{name} must vanish on the grid boundary")


def bilinear_form(K: KernelSpec, grid: VelocityGrid, phi: np.ndarray, g: np.ndarray, near_field: bool = True) -> float:
    """``E(phi, g) = -int (L phi)(v) g(v) dv`` with ``phi`` extended by zero."""
    phi = np.asarray(phi, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_support(phi, "phi")
    _check_support(g, "g")
    Lphi = operator_on_slice(K, grid, phi, 0.0, near_field=near_field)
    return float(-np.sum(Lphi * g) * grid.cell_volume)


def gagliardo_energy(grid: VelocityGrid, g: np.ndarray, s: float, p: float = 2.0, with_tail: bool = True) -> float:
    """``int int |g(v) - g(w)|^p / |v - w|^{d+ps}`` over R^d x R^d for g extended by zero.

    For p=2 this is the Gagliardo energy with weight ``|v-w|^{-(d+2s)}``.
    """
    pts = grid.flat_points()
    gf = np.asarray(g, dtype=float).reshape(-1)
    r = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    w = r ** (-(grid.d + p * s))
    val = float(np.sum(np.abs(gf[:, None] - gf[None, :]) ** p * w)) * grid.cell_volume**2
    if with_tail:
        # pairs with exactly one point outside the box, counted twice
        K = fractional_laplacian(p * s / 2, grid.d)
        val += 2 * float(np.sum(np.abs(gf) ** p * tail_mass(K, grid))) * grid.cell_volume
    return val


def hs_norm(grid: VelocityGrid, g: np.ndarray, s: float) -> float:
    """``(||g||_{L^2}^2 + [g]_{H^s}^2)^{1/2}`` with the seminorm halved."""
    g = np.asarray(g, dtype=float)
    l2 = float(np.sum(g**2)) * grid.cell_volume
    return math.sqrt(l2 + 0.5 * gagliardo_energy(grid, g, s))


def bilinear_bound_ratio(K: KernelSpec, grid: VelocityGrid, phi, g) -> float:
    """``|E(phi, g)| / (||phi||_{H^s} ||g||_{H^s})``, an empirical constant."""
    num = abs(bilinear_form(K, grid, phi, g))
    den = hs_norm(grid, phi, K.s) * hs_norm(grid, g, K.s)
    return num / den if den > 0 else 0.0


@dataclass(frozen=True)
class Macroscopics:
    M: np.ndarray
    E: np.ndarray
    H: Optional[np.ndarray]


def compute_macroscopics(f: GridField, entropy: bool = True) -> Macroscopics:
    """Mass, energy and entropy densities over ``(t, x)`` by grid quadrature."""
    d = f.d
    vals = f.values
    vaxes = tuple(range(1 + d, 1 + 2 * d))
    dv = float(np.prod(f.dv))
    V = np.meshgrid(*f.v_axes, indexing="ij")
    v2 = sum(c**2 for c in V)
    M = vals.sum(axis=vaxes) * dv
    E = (vals * v2).sum(axis=vaxes) * dv
    H = None
    if entropy:
        if vals.min(initial=0.0) < 0:
            raise ValueError("entropy needs a nonnegative field")
        with np.errstate(divide="ignore", invalid="ignore"):
            flnf = np.where(vals > 0, vals * np.log(np.where(vals > 0, vals, 1.0)), 0.0)
        H = flnf.sum(axis=vaxes) * dv
    return Macroscopics(M, E, H)


def velocity_slice_field(grid: VelocityGrid, g: np.ndarray, far_field: float = 0.0) -> GridField:
    """Wrap a velocity slice as a single-time, single-position GridField."""
    d = grid.d
    vals = np.asarray(g, dtype=float).reshape((1,) + (1,) * d + grid.shape)
    return GridField(np.array([0.0]), tuple(np.array([0.0]) for _ in range(d)), grid.axes, vals, far_field)


def stack_slices(slices: Sequence[np.ndarray]) -> np.ndarray:
    return np.stack([np.asarray(s, dtype=float) for s in slices])
