import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinetic_degiorgi import kernels as KK
from kinetic_degiorgi.geometry import KineticPoint


def test_operator_on_poisson_profile():
    """For s=1/2 and unit constant, L[1/(1+v^2)] = -pi (1-v^2)/(1+v^2)^2."""
    K = KK.fractional_laplacian(0.5, 1)
    errs = []
    for N in (400, 800):
        g = KK.VelocityGrid.cube(1, 40.0, N)
        v = g.axes[0]
        out = KK.operator_on_slice(K, g, 1 / (1 + v**2))
        ref = -math.pi * (1 - v**2) / (1 + v**2) ** 2
        errs.append(np.abs(out - ref)[np.abs(v) < 2].max())
    assert errs[1] <= 2e-3
    assert errs[1] < errs[0] / 4


def test_operator_kills_constants():
    K = KK.fractional_laplacian(0.3, 2)
    g = KK.VelocityGrid.cube(2, 2.0, 12)
    out = KK.operator_on_slice(K, g, np.full(g.shape, 0.7), far_field=0.7)
    assert np.max(np.abs(out)) <= 1e-9


def test_tail_mass_exact_in_1d():
    s = 0.4
    K = KK.fractional_laplacian(s, 1)
    g = KK.VelocityGrid.cube(1, 3.0, 30)
    v = g.axes[0]
    lo, hi = g.lower[0], g.upper[0]
    ref = ((v - lo) ** (-2 * s) + (hi - v) ** (-2 * s)) / (2 * s)
    assert np.allclose(KK.tail_mass(K, g), ref, rtol=1e-12)


def test_bilinear_form_symmetric():
    K = KK.fractional_laplacian(0.5, 1)
    g = KK.VelocityGrid.cube(1, 2.0, 81)
    v = g.axes[0]
    phi = np.where(np.abs(v) < 1, (1 - v**2) ** 2, 0.0)
    psi = np.where(np.abs(v - 0.3) < 0.8, (0.64 - (v - 0.3) ** 2) ** 2, 0.0)
    a = KK.bilinear_form(K, g, phi, psi)
    b = KK.bilinear_form(K, g, psi, phi)
    assert a == pytest.approx(b, rel=2e-2)
    assert KK.bilinear_form(K, g, phi, phi) > 0
    with pytest.raises(ValueError):
        KK.bilinear_form(K, g, np.ones(g.shape), phi)


def test_gagliardo_energy_scaling():
    """``[g(l.)]^2 = l^{2s-1} [g]^2`` in d=1, compared on matched grids."""
    s = 0.5
    g1 = KK.VelocityGrid.cube(1, 4.0, 160)
    g2 = KK.VelocityGrid.cube(1, 2.0, 160)
    f = lambda v: np.exp(-v**2)
    e1 = KK.gagliardo_energy(g1, f(g1.axes[0]), s)
    e2 = KK.gagliardo_energy(g2, f(2 * g2.axes[0]), s)
    assert e2 == pytest.approx(2 ** (2 * s - 1) * e1, rel=1e-10)


def test_densities_and_macroscopics():
    g = KK.VelocityGrid.cube(2, 6.0, 48)
    M = KK.maxwellian_density(g)
    assert M.sum() * g.cell_volume == pytest.approx(1.0, rel=1e-6)
    B = KK.ball_density(KK.VelocityGrid.cube(2, 1.25, 40))
    assert B.sum() * (2.5 / 40) ** 2 == pytest.approx(math.pi, rel=2e-3)
    f = KK.GridField(np.array([0.0]), (np.array([0.0, 1.0]),), (g.axes[0],), np.ones((1, 2, 48)), 0.0)
    mac = KK.compute_macroscopics(f)
    assert mac.M.shape == (1, 2)
    grid1 = KK.VelocityGrid.cube(1, 8.0, 200)
    M1 = KK.maxwellian_density(grid1)
    f1 = KK.velocity_slice_field(grid1, M1)
    mac1 = KK.compute_macroscopics(f1)
    assert float(mac1.M.ravel()[0]) == pytest.approx(1.0, rel=1e-8)
    assert float(mac1.E.ravel()[0]) == pytest.approx(1.0, rel=1e-6)


def test_gridfield_validation():
    t = np.array([0.0, 1.0])
    x = np.array([0.0, 0.5, 1.0])
    v = np.array([-1.0, 0.0, 1.0])
    KK.GridField(t, (x,), (v,), np.zeros((2, 3, 3)))
    with pytest.raises(ValueError):
        KK.GridField(t, (x,), (v,), np.zeros((2, 3, 4)))
    with pytest.raises(ValueError):
        KK.GridField(t, (np.array([0.0, 0.5, 2.0]),), (v,), np.zeros((2, 3, 3)))
    with pytest.raises(ValueError):
        KK.GridField(t, (x,), (v,), np.full((2, 3, 3), np.nan))
    with pytest.raises(ValueError):
        KK.GridField(t, (x,), (v,), -np.ones((2, 3, 3)), nonnegative=True)
    f = KK.GridField(t, (x,), (v,), np.arange(18.0).reshape(2, 3, 3))
    assert f.locate(KineticPoint(1.0, (0.5,), (1.0,))) == (1, 1, 2)
    with pytest.raises(ValueError):
        f.locate(KineticPoint(0.3, (0.5,), (1.0,)))
    assert f.cell_volume == pytest.approx(0.5)


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KK.fractional_laplacian(1.0, 1)
    with pytest.raises(ValueError):
        KK.fractional_laplacian(0.5, 1, lam=2.0, Lam=1.0)
    g = KK.VelocityGrid.cube(2, 2.0, 8)
    with pytest.raises(ValueError):
        KK.boltzmann_kernel(0.5, 2, 1.5, g, KK.maxwellian_density(g))
    with pytest.raises(ValueError):
        KK.boltzmann_kernel(0.5, 2, 0.0, g, -KK.maxwellian_density(g))
    g1 = KK.VelocityGrid.cube(1, 2.0, 8)
    K1 = KK.boltzmann_kernel(0.5, 1, 0.0, g1, KK.maxwellian_density(g1))
    with pytest.raises(ValueError):
        KK.kernel_eval(K1, [0.0], [1.0])
    K = KK.fractional_laplacian(0.5, 1)
    with pytest.raises(ValueError):
        KK.kernel_eval(K, [0.0], [0.0])


@settings(max_examples=100)
@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([0.2, 0.5, 0.8]))
def test_fractional_kernel_symmetric_and_homogeneous(v, w, s):
    if abs(v - w) < 1e-6:
        return
    K = KK.fractional_laplacian(s, 1)
    a = KK.kernel_eval(K, [v], [w])
    assert a == KK.kernel_eval(K, [w], [v])
    assert a == pytest.approx(abs(v - w) ** (-(1 + 2 * s)), rel=1e-12)


def test_boltzmann_kernel_matrix_nonnegative_and_symmetry_defect():
    g = KK.VelocityGrid.cube(2, 3.0, 10)
    K = KK.boltzmann_kernel(0.5, 2, 0.0, g, KK.maxwellian_density(g))
    M = KK.kernel_matrix(K, g)
    assert M.min() >= 0
    assert np.all(np.diag(M) == 0)
