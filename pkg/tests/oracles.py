"""Independent reference computations used by the tests.

Nothing here imports the package's numerics; formulas are re-derived with
Fractions, mpmath quadrature or direct enumeration.
"""

from fractions import Fraction

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def homogeneous_dimension(d, s):
    s = Fraction(s)
    return 2 * s + d * (2 + 2 * s)


def p_critical(d, s):
    s = Fraction(s)
    return 2 + 2 * s / (d * (1 + s))


def p_star(d, s):
    s = Fraction(s)
    return (2 * d * (1 + s) + 2 * s) / (2 * d * (1 + s) + s)


def tau_integral_mp(s, phi, xi):
    """``int_0^1 |xi - tau phi|^{2s} dtau`` for scalars, split at the kink."""
    f = lambda tau: abs(xi - tau * phi) ** (2 * s)
    pts = [0, 1]
    if phi != 0 and 0 < xi / phi < 1:
        pts = [0, mp.mpf(xi) / phi, 1]
    return mp.quad(f, pts)


def ring_integral_mp(d, s, r):
    """``int_{r < |u| < 2r} |u|^{-(d+2s)} du`` in d=1."""
    assert d == 1
    return 2 * mp.quad(lambda u: u ** (-(1 + 2 * s)), [r, 2 * r])


def upperbound2_mp(s, r):
    """``int_{|u| < r} |u|^{2 - (1+2s)} du`` in d=1."""
    return 2 * mp.quad(lambda u: u ** (1 - 2 * s), [0, r])


def ball_line_weight(gamma, s):
    """``int_{-1}^{1} |w|^{gamma+1+2s} dw`` for the unit-ball density in d=2 at v=0."""
    return 2 * mp.quad(lambda w: w ** (gamma + 1 + 2 * s), [0, 1])


def box_contains(anchor, t_lo, t_hi, rho_x, rho_v, closed_left, t, x, v):
    """d=1 slanted-box membership from the definition."""
    ta, xa, va = anchor
    dt = t - ta
    ok_t = (t_lo <= dt if closed_left else t_lo < dt) and dt <= t_hi
    return ok_t and abs(v - va) < rho_v and abs(x - xa - dt * va) < rho_x


def boxes_meet_1d(a, b):
    """Do two d=1 slanted boxes share a point?

    Each box is ``(anchor, t_lo, t_hi, rho_x, rho_v, closed_left)``. The
    x-constraint at time t is ``|alpha + beta t| < rho_x^a + rho_x^b``; the
    minimum of a convex function over the common window is checked on a
    fine grid of the window plus the root of the affine function.
    """
    (ta, xa, va), alo, ahi, arx, arv, acl = a
    (tb, xb, vb), blo, bhi, brx, brv, bcl = b
    lo_a, hi_a = ta + alo, ta + ahi
    lo_b, hi_b = tb + blo, tb + bhi
    lo, hi = max(lo_a, lo_b), min(hi_a, hi_b)
    if hi < lo:
        return False
    if abs(va - vb) >= arv + brv:
        return False
    beta = va - vb
    alpha = (xa - ta * va) - (xb - tb * vb)
    cands = list(np.linspace(lo, hi, 2001))
    if beta != 0:
        cands.append(min(max(-alpha / beta, lo), hi))
    for t in cands:
        in_a = (lo_a <= t if acl else lo_a < t) and t <= hi_a
        in_b = (lo_b <= t if bcl else lo_b < t) and t <= hi_b
        if in_a and in_b and abs(alpha + beta * t) < arx + brx:
            return True
    return False


def barrier_F(i, r0, v2):
    """Velocity profile from its definition with Fractions: clip((|v|^2 - c_i r0^2)/r0^2, -1, 0)."""
    c = (10, 9, 8)[i]
    q = (v2 - c * r0 * r0) / (r0 * r0)
    return max(Fraction(-1), min(Fraction(0), q))
