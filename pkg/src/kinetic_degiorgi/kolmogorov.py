"""The fractional Kolmogorov equation

    d_t f + v . grad_x f + (-Delta_v)^s f = h1 + (-Delta_v)^{s/2} h2 - m

on a periodic phase-space box: symbol, fundamental solution, the modified
convolution and a Duhamel solver.

Fourier convention: ``f^(k, eta) = int f e^{-i(k.x + eta.v)}`` with angular
frequencies ``k = 2 pi * fftfreq``. In this convention the solution of the
homogeneous problem satisfies

    f^(t, k, eta) = f0^(k, eta + k t) exp(-t int_0^1 |eta + k t tau|^{2s} dtau),

which is the modified convolution of ``f0`` with ``J(t)`` and matches
``Jhat(phi, xi) = exp(-int_0^1 |xi - tau phi|^{2s} dtau)`` at
``phi = -k t^{1+1/(2s)}``, ``xi = eta t^{1/(2s)}``.

The solver works with the pulled-back unknown ``G(t, x, v) = f(t, x + t v, v)``.
Transport disappears and the diffusion symbol becomes ``|zeta - k t|^{2s}``,
so each step is an exact multiplication in Fourier space. The shear back to
``f`` is a per-velocity spectral phase shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .kernels import GridField
from .quadrature import _leggauss


def critical_p(d: int, s: float) -> float:
    """Upper end of the integrability range ``2 <= p < 2 + 2s/(d(1+s))``."""
    return 2 + 2 * s / (d * (1 + s))


def p_star(d: int, s: float) -> float:
    """``p* = (2d(1+s) + 2s) / (2d(1+s) + s)``."""
    return (2 * d * (1 + s) + 2 * s) / (2 * d * (1 + s) + s)


def sigma_max(s: float) -> float:
    """Upper end of ``sigma in [0, s/(1+2s))``."""
    return s / (1 + 2 * s)


def check_p(p: float, d: int, s: float) -> None:
    if not 2 <= p < critical_p(d, s):
        raise ValueError(f"p={p} outside [2, {critical_p(d, s):.6g})")


def check_sigma(sigma: float, s: float) -> None:
    if not 0 <= sigma < sigma_max(s):
        raise ValueError(f"sigma={sigma} outside [0, {sigma_max(s):.6g})")


def tau_integral(s: float, a, b, n: int = 8) -> np.ndarray:
    """``int_0^1 |a + tau b|^{2s} dtau`` for arrays of vectors (last axis d).

    In d=1 the antiderivative ``y |y|^{2s} / (2s+1)`` is used whenever ``|b|``
    is not negligible against ``|a|``. Otherwise Gauss-Legendre runs on both
    sides of the minimiser ``tau* = clip(-a.b/|b|^2)``, where the integrand
    has its kink.
    """
    if n < 1:
        raise ValueError("n_tau must be >= 1")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    bb = np.sum(b * b, axis=-1)
    ab = np.sum(a * b, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = np.where(bb > 0, -ab / np.where(bb > 0, bb, 1.0), 0.0)
    ts = np.clip(ts, 0.0, 1.0)
    x, w = _leggauss(n)
    total = np.zeros(bb.shape)
    for lo, hi in ((np.zeros_like(ts), ts), (ts, np.ones_like(ts))):
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        for xi, wi in zip(x, w):
            tau = (mid + half * xi)[..., None]
            total += wi * half * np.sum((a + tau * b) ** 2, axis=-1) ** s
    if a.shape[-1] == 1:
        a1, b1 = a[..., 0], b[..., 0]
        exact = np.abs(b1) > 1e-3 * np.abs(a1)
        F = lambda y: y * np.abs(y) ** (2 * s) / (2 * s + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            closed = (F(a1 + b1) - F(a1)) / np.where(exact, b1, 1.0)
        total = np.where(exact, closed, total)
    return total


def symbol_eval(s: float, phi, xi, n_tau: int = 8) -> float:
    """``Jhat(phi, xi) = exp(-int_0^1 |xi - tau phi|^{2s} dtau)``."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if phi.shape != xi.shape:
        raise ValueError("phi and xi need the same dimension")
    return float(np.exp(-tau_integral(s, xi, -phi, n_tau)))


@dataclass(frozen=True)
class SymbolTable:
    s: float
    phi: np.ndarray
    xi: np.ndarray
    values: np.ndarray


def symbol_table(s: float, phi: np.ndarray, xi: np.ndarray, n_tau: int = 8) -> SymbolTable:
    """``Jhat`` on the tensor grid of 1-d frequency arrays ``phi`` and ``xi``."""
    P, X = np.meshgrid(phi, xi, indexing="ij")
    vals = np.exp(-tau_integral(s, X[..., None], -P[..., None], n_tau))
    return SymbolTable(s, np.asarray(phi), np.asarray(xi), vals)


def periodic_axis(L: float, N: int) -> np.ndarray:
    """Nodes ``-L/2 + j L/N``; ``N`` even puts a node at the origin."""
    if N < 2 or N % 2:
        raise ValueError("periodic axes need an even number of nodes")
    return -L / 2 + np.arange(N) * (L / N)


@dataclass(frozen=True)
class PhaseGrid:
    """Periodic ``[-Lx/2, Lx/2)^d x [-Lv/2, Lv/2)^d`` box with N nodes per axis."""

    d: int
    Lx: float
    Lv: float
    Nx: int
    Nv: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.Lx <= 0 or self.Lv <= 0:
            raise ValueError("box lengths must be positive")
        periodic_axis(self.Lx, self.Nx)
        periodic_axis(self.Lv, self.Nv)

    @property
    def x(self) -> np.ndarray:
        return periodic_axis(self.Lx, self.Nx)

    @property
    def v(self) -> np.ndarray:
        return periodic_axis(self.Lv, self.Nv)

    @property
    def hx(self) -> float:
        return self.Lx / self.Nx

    @property
    def hv(self) -> float:
        return self.Lv / self.Nv

    @property
    def shape(self) -> tuple:
        return (self.Nx,) * self.d + (self.Nv,) * self.d

    @property
    def cell(self) -> float:
        return (self.hx * self.hv) ** self.d

    @property
    def x_axes_(self) -> int:
        return self.d

    def _axes(self):
        return tuple(range(2 * self.d))

    def coords(self):
        """Broadcastable ``(X_1..X_d, V_1..V_d)``."""
        return np.meshgrid(*([self.x] * self.d), *([self.v] * self.d), indexing="ij", sparse=True)

    def freqs(self):
        """Broadcastable angular frequencies ``(K_1..K_d, Z_1..Z_d)`` in FFT order."""
        k = 2 * math.pi * np.fft.fftfreq(self.Nx, self.hx)
        z = 2 * math.pi * np.fft.fftfreq(self.Nv, self.hv)
        return np.meshgrid(*([k] * self.d), *([z] * self.d), indexing="ij", sparse=True)

    def kz_vectors(self):
        """Dense ``k`` and ``zeta`` vector arrays with a trailing axis of length d."""
        F = self.freqs()
        K = np.stack(np.broadcast_arrays(*F[: self.d]), axis=-1) if self.d > 1 else np.broadcast_to(F[0], self.shape)[..., None]
        Z = np.stack(np.broadcast_arrays(*F[self.d:]), axis=-1) if self.d > 1 else np.broadcast_to(F[1], self.shape)[..., None]
        return np.broadcast_to(K, self.shape + (self.d,)), np.broadcast_to(Z, self.shape + (self.d,))

    def field(self, values, t=(0.0,)) -> GridField:
        return GridField(np.asarray(t, float), (self.x,) * self.d, (self.v,) * self.d,
                         np.asarray(values), 0.0, True)


def _fft_x(g: np.ndarray, d: int) -> np.ndarray:
    return np.fft.fftn(g, axes=tuple(range(d)))


def _ifft_x(g: np.ndarray, d: int) -> np.ndarray:
    return np.fft.ifftn(g, axes=tuple(range(d)))


def shear(grid: PhaseGrid, g: np.ndarray, t: float) -> np.ndarray:
    """``(T_t g)(x, v) = g(x - t v, v)`` by spectral phase shift in x."""
    if t == 0:
        return np.array(g, dtype=float)
    F = grid.freqs()
    C = grid.coords()
    phase = sum(F[i] * C[grid.d + i] for i in range(grid.d))
    gh = _fft_x(np.asarray(g, dtype=float), grid.d) * np.exp(-1j * t * phase)
    return _ifft_x(gh, grid.d).real


def fundamental_symbol(grid: PhaseGrid, s: float, t: float, n_tau: int = 8) -> np.ndarray:
    """``Jhat(t, k, eta) = exp(-t int_0^1 |eta + k t tau|^{2s} dtau)`` in FFT order."""
    K, Z = grid.kz_vectors()
    return np.exp(-t * tau_integral(s, Z, K * t, n_tau))


@dataclass(frozen=True)
class FundamentalSolutionTable:
    s: float
    t: float
    grid: PhaseGrid
    values: np.ndarray

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell)

    def lr_norm(self, r: float) -> float:
        return float((np.abs(self.values) ** r).sum() * self.grid.cell) ** (1 / r)

    def l2_norm_spectral(self) -> float:
        """``||J||_{L^2}`` of the trigonometric interpolant via Parseval."""
        return self.lr_norm(2.0)

    def min_ratio(self) -> float:
        return float(self.values.min() / self.values.max())


def self_similar_widths(s: float, t: float) -> tuple[float, float]:
    """Core widths ``t^{1+1/(2s)}`` in x and ``t^{1/(2s)}`` in v."""
    return t ** (1 + 1 / (2 * s)), t ** (1 / (2 * s))


def fundamental_solution(s: float, t: float, grid: PhaseGrid, n_tau: int = 8) -> FundamentalSolutionTable:
    """``J(t, x, v)`` on the grid from the inverse FFT of its symbol.

    ``C_d`` is fixed by ``Jhat(0, 0) = 1``, so ``int J = 1`` exactly on the grid.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not t > 0:
        raise ValueError("t must be positive")
    wx, wv = self_similar_widths(s, t)
    if wx > grid.Lx / 4 or wv > grid.Lv / 4:
        raise ValueError(f"box too small for the self-similar width at t={t}")
    if wx < grid.hx or wv < grid.hv:
        raise ValueError(f"grid too coarse to resolve J at t={t}")
    Jh = fundamental_symbol(grid, s, t, n_tau)
    axes = grid._axes()
    vals = np.fft.fftshift(np.fft.ifftn(Jh, axes=axes).real, axes=axes) / grid.cell
    return FundamentalSolutionTable(s, t, grid, vals)


def modified_convolve(grid: PhaseGrid, f: np.ndarray, g: np.ndarray, t: float, strict: bool = False) -> np.ndarray:
    """``(f *_t g)(x, v) = int f(x', v') g(x - x' - t v', v - v') dx' dv'``.

    Shear ``f`` by ``t`` and convolve, all periodic. When ``t |v|`` exceeds
    half the x-period the shear wraps; this raises with ``strict`` and is
    otherwise reported through :func:`shear_aliasing`.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != grid.shape or g.shape != grid.shape:
        raise ValueError("fields do not match the grid")
    if strict and shear_aliasing(grid, t):
        raise ValueError("shear t*V exceeds half the x-period")
    axes = grid._axes()
    Ff = np.fft.fftn(shear(grid, f, t), axes=axes)
    Fg = np.fft.fftn(np.fft.ifftshift(g, axes=axes), axes=axes)
    return np.fft.ifftn(Ff * Fg, axes=axes).real * grid.cell


def shear_aliasing(grid: PhaseGrid, t: float) -> bool:
    return abs(t) * grid.Lv / 2 > grid.Lx / 2


Source = Union[None, np.ndarray, GridField]


@dataclass
class SourceDecomposition:
    """``h = h1 + (-Delta_v)^{s/2} h2`` and a nonnegative sink ``m``.

    Each entry is None, a time-independent array on the phase grid, or a
    GridField sampled in time (held constant from each node to the next).
    """

    h1: Source = None
    h2: Source = None
    m: Source = None

    def __post_init__(self):
        m = self.m
        if m is not None:
            vals = m.values if isinstance(m, GridField) else np.asarray(m)
            if vals.min() < 0:
                raise ValueError("m must be nonnegative")

    @staticmethod
    def _at(src: Source, t: float) -> Optional[np.ndarray]:
        if src is None:
            return None
        if isinstance(src, GridField):
            i = int(np.clip(np.searchsorted(src.t, t + 1e-12 * max(1.0, abs(t)), side="right") - 1, 0, src.t.size - 1))
            return src.values[i]
        return np.asarray(src, dtype=float)

    def empty(self) -> bool:
        return self.h1 is None and self.h2 is None and self.m is None


def _time_symbol(grid: PhaseGrid, s: float, ta: float, tb: float, n_tau: int) -> np.ndarray:
    """``exp(-int_ta^tb |zeta - k sigma|^{2s} dsigma)`` in FFT order."""
    K, Z = grid.kz_vectors()
    return np.exp(-(tb - ta) * tau_integral(s, Z - K * ta, -K * (tb - ta), n_tau))


def _uniform_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty list")
    if times.size > 1:
        h = np.diff(times)
        if not np.all(h > 0):
            raise ValueError("times must be increasing")
        if not np.allclose(h, h[0], rtol=1e-9, atol=0):
            raise ValueError("output times must be uniformly spaced")
    return times


def solve_kolmogorov(grid: PhaseGrid, s: float, f0: np.ndarray, times: Sequence[float],
                     src: Optional[SourceDecomposition] = None, t0: float = 0.0,
                     max_step: Optional[float] = None, substeps: int = 4, n_tau: int = 8) -> GridField:
    """Duhamel solution sampled at ``times``.

    ``f0`` is the state at absolute time ``t0``. Restarting from an output
    ``f(t1)`` with ``t0=t1`` continues the same trajectory. Sources use a
    left-endpoint rule on ``substeps`` sub-intervals per step; with no
    sources the step size is irrelevant because the propagator is exact.
    """
    f0 = np.asarray(f0, dtype=float)
    if f0.shape != grid.shape:
        raise ValueError("f0 does not match the grid")
    times = _uniform_times(times)
    if times[0] < t0:
        raise ValueError("negative time step: output times precede t0")
    if max_step is not None and max_step <= 0:
        raise ValueError("max_step must be positive")
    src = src or SourceDecomposition()
    axes = grid._axes()
    K, Z = grid.kz_vectors()
    G = np.fft.fftn(shear(grid, f0, -t0), axes=axes)
    out = np.empty((times.size,) + grid.shape)
    t = t0
    for n, target in enumerate(times):
        span = target - t
        n_steps = 1 if max_step is None or span == 0 else max(1, int(math.ceil(span / max_step - 1e-9)))
        edges = np.linspace(t, target, n_steps + 1)
        for ta, tb in zip(edges[:-1], edges[1:]):
            if tb <= ta:
                continue
            if src.empty():
                G = G * _time_symbol(grid, s, ta, tb, n_tau)
                continue
            sub = np.linspace(ta, tb, substeps + 1)
            for a, b in zip(sub[:-1], sub[1:]):
                E = _time_symbol(grid, s, a, b, n_tau)
                S = np.zeros(grid.shape, dtype=complex)
                h1 = src._at(src.h1, a)
                if h1 is not None:
                    S += np.fft.fftn(shear(grid, h1, -a), axes=axes)
                h2 = src._at(src.h2, a)
                if h2 is not None:
                    mult = np.sum((Z - K * a) ** 2, axis=-1) ** (s / 2)
                    S += mult * np.fft.fftn(shear(grid, h2, -a), axes=axes)
                m = src._at(src.m, a)
                if m is not None:
                    S -= np.fft.fftn(shear(grid, m, -a), axes=axes)
                G = (G + (b - a) * S) * E
        t = target
        out[n] = shear(grid, np.fft.ifftn(G, axes=axes).real, t)
    return GridField(times, (grid.x,) * grid.d, (grid.v,) * grid.d, out, 0.0, True)


def fractional_laplacian_v(grid: PhaseGrid, g: np.ndarray, power: float) -> np.ndarray:
    """``(-Delta_v)^{power} g`` with multiplier ``|zeta|^{2 power}``."""
    _, Z = grid.kz_vectors()
    axes = grid._axes()
    mult = np.sum(Z**2, axis=-1) ** power
    return np.fft.ifftn(mult * np.fft.fftn(g, axes=axes), axes=axes).real


@dataclass(frozen=True)
class NormSuite:
    p: float
    sigma: float
    lp: float
    l1: float
    w_sigma_seminorm: float
    w_sigma_1_x: float
    p_critical: float
    p_star: float
    sigma_critical: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def gagliardo_x_l1(f: GridField, sigma: float, diagonal: bool = True, tails: bool = True) -> float:
    """``int_{t,v} int int |f(x) - f(y)| / |x - y|^{d+sigma} dx dy`` over the x-box.

    d=1 adds the punctured-cell term ``|f_x| 2 h^{2-sigma} / ((1-sigma)(2-sigma))``
    and, for non-periodic fields, the zero-extension tail ``2 |f| rho^{-sigma}/sigma``
    summed over both exits.
    """
    d = f.d
    if sigma == 0:
        return 0.0
    vals = f.values
    xs = np.stack(np.meshgrid(*f.x_axes, indexing="ij"), axis=-1).reshape(-1, d)
    nx = xs.shape[0]
    if f.x_periodic:
        Lx = np.array([a.size * (a[1] - a[0]) if a.size > 1 else np.inf for a in f.x_axes])
        diff = xs[:, None, :] - xs[None, :, :]
        diff = diff - Lx * np.round(diff / Lx)
        r = np.linalg.norm(diff, axis=-1)
    else:
        r = np.linalg.norm(xs[:, None, :] - xs[None, :, :], axis=-1)
    np.fill_diagonal(r, np.inf)
    w = r ** (-(d + sigma))
    # move x axes to the end and flatten
    nt = vals.shape[0]
    nv = int(np.prod(vals.shape[1 + d:]))
    g = np.moveaxis(vals.reshape((nt,) + tuple(a.size for a in f.x_axes) + (nv,)), list(range(1, 1 + d)), list(range(2, 2 + d)))
    g = g.reshape(nt, nv, nx)
    hx = float(np.prod(f.dx))
    total = 0.0
    for i in range(nx):
        total += float(np.sum(np.abs(g[..., i:i + 1] - g) * w[i]))
    total *= hx * hx
    if d == 1 and diagonal and nx > 1:
        h = float(f.dx[0])
        grad = np.abs(np.gradient(g, h, axis=-1))
        total += float(np.sum(grad)) * hx * 2 * h ** (2 - sigma) / ((1 - sigma) * (2 - sigma))
    if d == 1 and tails and not f.x_periodic and nx > 1:
        h = float(f.dx[0])
        lo, hi = xs[0, 0] - h / 2, xs[-1, 0] + h / 2
        tail = ((xs[:, 0] - lo) ** (-sigma) + (hi - xs[:, 0]) ** (-sigma)) / sigma
        total += float(np.sum(np.abs(g) * tail)) * hx
    return total * f.dt * float(np.prod(f.dv))


def norm_suite(f: GridField, p: float, sigma: float, s: float) -> NormSuite:
    """``||f||_{L^p}`` over all grid cells and ``||f||_{L^1_{t,v} W^{sigma,1}_x}``."""
    d = f.d
    check_p(p, d, s)
    check_sigma(sigma, s)
    cell = f.cell_volume
    lp = float((np.abs(f.values) ** p).sum() * cell) ** (1 / p)
    l1 = float(np.abs(f.values).sum() * cell)
    semi = gagliardo_x_l1(f, sigma)
    return NormSuite(p, sigma, lp, l1, semi, l1 + semi, critical_p(d, s), p_star(d, s), sigma_max(s))
