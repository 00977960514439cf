"""Quadrature over cylinders for sampled fields.

Boxes anchored at zero velocity are products ``I x B_x x B_v``, so the
weights factor per axis group. In d=1 each factor is the fraction of the
node's cell that lies inside the interval (exact for intervals); for d >= 2
ball factors use node membership. Slanted boxes fall back to node
membership in x and v with time overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import KineticCylinder, SlantedBox
from .kernels import GridField
from .quadrature import axis_overlap


@dataclass(frozen=True)
class ProductWeights:
    wt: np.ndarray
    wx: np.ndarray
    wv: np.ndarray

    def full(self, d: int) -> np.ndarray:
        wt = self.wt.reshape((-1,) + (1,) * (2 * d))
        wx = self.wx.reshape((1,) + self.wx.shape + (1,) * d)
        wv = self.wv.reshape((1,) * (1 + d) + self.wv.shape)
        return wt * wx * wv


def _as_box(c) -> SlantedBox:
    return c.box if isinstance(c, KineticCylinder) else c


def _ball_weights(axes, center, radius) -> np.ndarray:
    if len(axes) == 1:
        return axis_overlap(axes[0], center[0] - radius, center[0] + radius)
    pts = np.meshgrid(*axes, indexing="ij")
    r2 = sum((p - c) ** 2 for p, c in zip(pts, center))
    return (r2 < radius**2).astype(float)


def product_weights(f: GridField, c) -> ProductWeights:
    """Per-axis-group weights of a zero-velocity-anchored box."""
    box = _as_box(c)
    a = box.anchor
    if any(float(u) != 0.0 for u in a.v):
        raise ValueError("product weights need a box anchored at zero velocity")
    lo, hi = box.time_interval
    wt = axis_overlap(f.t, lo, hi)
    wx = _ball_weights(f.x_axes, [float(u) for u in a.x], box.rho_x)
    wv = _ball_weights(f.v_axes, [0.0] * f.d, box.rho_v)
    return ProductWeights(wt, wx, wv)


def box_weights(f: GridField, c) -> np.ndarray:
    """Quadrature weights in [0, 1] for the box, shaped like ``f.values``."""
    box = _as_box(c)
    if all(float(u) == 0.0 for u in box.anchor.v):
        return product_weights(f, box).full(f.d)
    lo, hi = box.time_interval
    wt = axis_overlap(f.t, lo, hi)
    T, *rest = np.meshgrid(f.t, *f.x_axes, *f.v_axes, indexing="ij")
    d = f.d
    X = np.stack(rest[:d], axis=-1)
    V = np.stack(rest[d:], axis=-1)
    # membership in x and v at each node's own time, time handled by overlap
    xa = np.array(box.anchor.x, float)
    va = np.array(box.anchor.v, float)
    dx = X - xa - (T - float(box.anchor.t))[..., None] * va
    inside = (np.sum(dx**2, axis=-1) < box.rho_x**2) & (np.sum((V - va) ** 2, axis=-1) < box.rho_v**2)
    return wt.reshape((-1,) + (1,) * (2 * d)) * inside


def box_volume_on_grid(f: GridField, c) -> float:
    return float(box_weights(f, c).sum() * f.cell_volume)


def integrate(f: GridField, values, weights) -> float:
    return float(np.sum(np.asarray(values) * weights) * f.cell_volume)


def measure(f: GridField, mask, weights) -> float:
    return float(np.sum(np.asarray(mask, dtype=float) * weights) * f.cell_volume)


def sup_over(f: GridField, values, weights) -> float:
    """Max over nodes with positive weight (-inf when none)."""
    v = np.asarray(values)
    sel = np.broadcast_to(weights, v.shape) > 0
    return float(v[sel].max()) if sel.any() else -np.inf


def inf_over(f: GridField, values, weights) -> float:
    v = np.asarray(values)
    sel = np.broadcast_to(weights, v.shape) > 0
    return float(v[sel].min()) if sel.any() else np.inf


def _flat_slices(f: GridField, values) -> np.ndarray:
    """Reshape to (Nt, Nx_flat, Nv_flat)."""
    d = f.d
    nx = int(np.prod([a.size for a in f.x_axes]))
    nv = int(np.prod([a.size for a in f.v_axes]))
    return np.asarray(values).reshape(f.t.size, nx, nv)


def _v_points(f: GridField) -> np.ndarray:
    return np.stack(np.meshgrid(*f.v_axes, indexing="ij"), axis=-1).reshape(-1, f.d)


def _x_points(f: GridField) -> np.ndarray:
    return np.stack(np.meshgrid(*f.x_axes, indexing="ij"), axis=-1).reshape(-1, f.d)


def v_gagliardo(f: GridField, values, pw: ProductWeights, w_weights: np.ndarray, s: float,
                diagonal: bool = True) -> float:
    """``int_{z in Q} int_{w in B} |g(v) - g(w)|^2 / |v - w|^{d+2s} dw dz``.

    ``pw`` weights the outer variable, ``w_weights`` (over v nodes) the inner.
    In d=1 the coincident-cell term ``|g'|^2 2h^{3-2s}/((2-2s)(3-2s))`` is added.
    """
    d = f.d
    g = _flat_slices(f, values)
    vp = _v_points(f)
    r = np.linalg.norm(vp[:, None, :] - vp[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    k = r ** (-(d + 2 * s)) * np.asarray(w_weights).reshape(1, -1)
    wv = pw.wv.reshape(-1)
    wx = pw.wx.reshape(-1)
    hv = float(np.prod(f.dv))
    total = 0.0
    for it in np.nonzero(pw.wt > 0)[0]:
        gt = g[it][wx > 0]  # (nx_sel, nv)
        diff2 = (gt[:, :, None] - gt[:, None, :]) ** 2
        inner = np.einsum("xij,ij->xi", diff2, k) * hv
        if diagonal and d == 1:
            h = float(f.dv[0])
            grad = np.gradient(gt, h, axis=1)
            inner = inner + grad**2 * np.asarray(w_weights).reshape(1, -1) * 2 * h ** (3 - 2 * s) / ((2 - 2 * s) * (3 - 2 * s)) / h
        total += pw.wt[it] * float(np.sum(inner * wv[None, :] * wx[wx > 0][:, None]))
    return total * f.cell_volume


def sqrt_energy(f: GridField, values, pw: ProductWeights, Kmat: np.ndarray, tails: np.ndarray | None) -> float:
    """``int_{z} (int_{R^d} |g(v) - g(w)|^2 K(v, w) dw)^{1/2} dz`` over the
    weighted region; outside the v-box ``g`` equals the far field."""
    g = _flat_slices(f, values)
    wv = pw.wv.reshape(-1)
    wx = pw.wx.reshape(-1)
    hv = float(np.prod(f.dv))
    total = 0.0
    for it in np.nonzero(pw.wt > 0)[0]:
        gt = g[it][wx > 0]
        diff2 = (gt[:, :, None] - gt[:, None, :]) ** 2
        inner = np.einsum("xij,ij->xi", diff2, Kmat) * hv
        if tails is not None:
            inner = inner + (gt - f.far_field_v) ** 2 * tails[None, :]
        total += pw.wt[it] * float(np.sum(np.sqrt(inner) * wv[None, :] * wx[wx > 0][:, None]))
    return total * f.cell_volume


def skew_term(f: GridField, values, pw: ProductWeights, Kmat: np.ndarray) -> float:
    """``|int_z int_w g(v) (K(v, w) - K(w, v)) dw dz|`` over the weighted region."""
    g = _flat_slices(f, values)
    asym = (Kmat - Kmat.T).sum(axis=1) * float(np.prod(f.dv))
    full = pw.full(f.d).reshape(g.shape)
    return abs(float(np.sum(g * asym[None, None, :] * full))) * f.cell_volume


def x_gagliardo_l1(f: GridField, values, pw: ProductWeights, sigma: float, diagonal: bool = True) -> float:
    """``int_{t,v} int_{x,y in B_x} |g(x) - g(y)| / |x - y|^{d+sigma}`` over the region."""
    if sigma == 0:
        return 0.0
    d = f.d
    g = _flat_slices(f, values)
    xp = _x_points(f)
    wx = pw.wx.reshape(-1)
    sel = wx > 0
    xs = xp[sel]
    r = np.linalg.norm(xs[:, None, :] - xs[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    kern = r ** (-(d + sigma)) * wx[sel][:, None] * wx[sel][None, :]
    wv = pw.wv.reshape(-1)
    hx = float(np.prod(f.dx))
    total = 0.0
    for it in np.nonzero(pw.wt > 0)[0]:
        gt = g[it][sel]  # (nx_sel, nv)
        acc = np.zeros(gt.shape[1])
        for i in range(gt.shape[0]):
            acc += np.abs(gt[i][None, :] - gt) .T @ kern[i]
        acc *= hx
        if diagonal and d == 1 and gt.shape[0] > 1:
            h = float(f.dx[0])
            grad = np.abs(np.gradient(gt, h, axis=0))
            acc += (grad * wx[sel][:, None]).sum(axis=0) * 2 * h ** (2 - sigma) / ((1 - sigma) * (2 - sigma)) / h
        total += pw.wt[it] * float(np.sum(acc * wv))
    return total * f.cell_volume
