"""Shared quadrature helpers: Gauss-Legendre rules, sphere lattices, radial shells."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_area(d: int) -> float:
    """(d-1)-dimensional measure of the unit sphere in R^d (2 for d=1)."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a, b, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b].

    ``a`` and ``b`` may be arrays; nodes get a trailing axis of length n.
    """
    x, w = _leggauss(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def sphere_directions(d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Antipodally symmetric direction lattice on S^{d-1}.

    Returns ``(dirs, weights)`` with ``dirs`` of shape (m, d) and weights
    summing to the sphere area. The second half of ``dirs`` is the negation
    of the first half, so odd integrands cancel exactly. For d=2 the lattice
    is equispaced in angle; for d=3 it is a Fibonacci lattice.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif d == 2:
        half = max(1, n // 2)
        ang = (np.arange(half) + 0.5) * math.pi / half
        first = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        dirs = np.concatenate([first, -first])
    elif d == 3:
        half = max(1, n // 2)
        golden = (1 + 5**0.5) / 2
        i = np.arange(half)
        z = (i + 0.5) / half  # upper hemisphere
        rho = np.sqrt(1 - z**2)
        phi = 2 * math.pi * i / golden
        first = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
        dirs = np.concatenate([first, -first])
    else:
        raise NotImplementedError("direction lattices are provided for d <= 3")
    weights = np.full(len(dirs), sphere_area(d) / len(dirs))
    return dirs, weights


def radial_rule(r_lo: float, r_hi: float, n_shells: int, n_gl: int):
    """Composite Gauss-Legendre rule on [r_lo, r_hi] with geometric shells.

    Geometric grading keeps the relative accuracy uniform for integrands
    with power-law behaviour near r_lo.
    """
    if not 0 < r_lo < r_hi:
        raise ValueError("need 0 < r_lo < r_hi")
    edges = np.geomspace(r_lo, r_hi, n_shells + 1)
    x, w = gauss_legendre(edges[:-1], edges[1:], n_gl)
    return x.ravel(), w.ravel()


def axis_overlap(nodes: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Fraction of each node-centred cell of a uniform axis lying in [lo, hi]."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size == 1:
        return np.array([1.0 if lo <= nodes[0] <= hi else 0.0])
    h = nodes[1] - nodes[0]
    left = np.maximum(nodes - h / 2, lo)
    right = np.minimum(nodes + h / 2, hi)
    return np.clip(right - left, 0.0, None) / h
