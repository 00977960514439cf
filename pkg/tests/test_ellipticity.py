import math

import numpy as np
import pytest

import oracles
from kinetic_degiorgi import ellipticity as E
from kinetic_degiorgi import kernels as KK


def _bumps(grid, R):
    v2 = np.sum(grid.points() ** 2, axis=-1)
    return [("wide", np.where(v2 < R * R, (1 - v2 / (R * R)) ** 2, 0.0)),
            ("narrow", np.where(v2 < R * R / 4, (1 - 4 * v2 / (R * R)) ** 2, 0.0))]


def test_analytic_constants():
    for s in (0.25, 0.5, 0.75):
        c = E.fractional_laplacian_constants(1, s)
        assert c["upperbound2"] == pytest.approx(float(oracles.upperbound2_mp(s, 1.0)), rel=1e-12)
        assert c["rings"] == pytest.approx(float(oracles.ring_integral_mp(1, s, 1.0)), rel=1e-12)
    c2 = E.fractional_laplacian_constants(2, 0.5)
    assert c2["upperbound2"] == pytest.approx(2 * math.pi)


def test_fractional_laplacian_is_compliant():
    K = KK.fractional_laplacian(0.5, 1, lam=1.0, Lam=4.0)
    g = KK.VelocityGrid.cube(1, 2.0, 64)
    rep = E.check_ellipticity(K, g, _bumps(g, 1.0), [0.1, 0.25, 0.5])
    assert rep.passed
    d = rep.to_dict()
    names = [c["condition"] for c in d["conditions"]]
    for n in ("coercivity", "upperbound2", "upperbound_rings", "cancellation1", "cancellation2"):
        assert n in names
    assert rep["upperbound2"].constant == pytest.approx(2.0, rel=1e-9)
    assert rep["coercivity"].constant >= 1.0


def test_too_small_Lambda_fails_with_witness():
    K = KK.fractional_laplacian(0.5, 1, lam=1.0, Lam=1.5)
    g = KK.VelocityGrid.cube(1, 2.0, 32)
    rep = E.check_ellipticity(K, g, _bumps(g, 1.0), [0.2])
    assert not rep.passed
    assert rep["upperbound2"].passed is False
    assert "r=" in rep["upperbound2"].witness


def test_test_function_support_enforced():
    K = KK.fractional_laplacian(0.5, 1)
    g = KK.VelocityGrid.cube(1, 2.0, 32)
    with pytest.raises(ValueError):
        E.check_ellipticity(K, g, [np.ones(g.shape)], [0.2])
    with pytest.raises(ValueError):
        E.check_ellipticity(K, g, [], [0.0])


def test_cancellation2_informational_below_half():
    K = KK.fractional_laplacian(0.25, 1, Lam=10.0)
    g = KK.VelocityGrid.cube(1, 2.0, 32)
    rep = E.check_ellipticity(K, g, _bumps(g, 1.0), [0.2])
    assert rep["cancellation2"].passed is None
    assert rep["cancellation2"].certificate == "informational"


def test_cone_full_sphere_for_radial_kernel():
    K = KK.fractional_laplacian(0.5, 2)
    rep = E.cone_lower_bound(K, [np.zeros(2), np.array([0.5, 0.2])], 0.1)
    for smp in rep.samples:
        assert smp.measure == pytest.approx(2 * math.pi, rel=1e-12)
    assert not rep.inconclusive


def test_equivalence_ratios_scale_free():
    K = KK.fractional_laplacian(0.5, 1)
    r = E.equivalence_ratios(K, [0.3], [0.1, 0.2, 0.4])
    assert np.allclose(r, r[0], rtol=1e-9)
