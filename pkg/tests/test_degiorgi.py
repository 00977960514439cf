import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from kinetic_degiorgi import degiorgi as D
from kinetic_degiorgi import kolmogorov as KO
from kinetic_degiorgi.geometry import KineticPoint, box_subset, make_cylinder
from kinetic_degiorgi.kernels import GridField, fractional_laplacian

S = 0.5
K = fractional_laplacian(S, 1)


def _field(N=16, amp=0.01):
    g = KO.PhaseGrid(1, 8.0, 8.0, N, N)
    X, V = g.coords()
    f0 = amp * np.exp(-(X**2 + V**2) / 0.5) + 0 * X
    return KO.solve_kolmogorov(g, S, f0, np.linspace(-1, 0, N // 2 + 1), t0=-1.0)


def _cyls():
    o = KineticPoint.origin(1)
    return make_cylinder(o, 0.5, S), make_cylinder(o, 0.9, S)


@settings(max_examples=50)
@given(st.fractions(min_value=Fraction(201, 100), max_value=Fraction(8, 3) - Fraction(1, 100)))
def test_lemma_exponents_closed_form(p):
    b1, b2 = D.lemma_exponents(float(p))
    assert b1 == pytest.approx(float(2 * p / (2 * p - 2)), rel=1e-14)
    assert b2 == pytest.approx(float((p - 2) / (2 * (2 * p - 2))), rel=1e-14)
    lq = D.log2_Q(float(p))
    # 2^8 <= Q^{(p-2)/p} with equality
    assert lq * float((p - 2) / p) == pytest.approx(8, rel=1e-12)


def test_lemma_guards():
    with pytest.raises(ValueError):
        D.lemma_exponents(2.0)
    with pytest.raises(ValueError):
        D.log2_Q(1.5)
    assert D.level_cap_log(0.0, 0.4, 0.0, 2.5) == -math.inf


def test_level_function():
    vals = np.array([0.0, 0.5, 0.99, 1.0])
    assert np.array_equal(D.level_function(vals, 0.5, 0), vals)
    got = D.level_function(vals, 0.5, 1)
    assert got == pytest.approx((vals - 0.75) / 0.25)
    with pytest.raises(ValueError):
        D.level_function(vals, 1.0, 1)
    with pytest.raises(ValueError):
        D.level_function(vals, 0.5, -1)


def test_truncation_decomposition_exact():
    f = _field()
    for psi in (0.0, 0.003, 0.5):
        tr = D.truncate_levels(f, psi)
        assert np.all(tr.plus.values >= 0)
        assert np.all(tr.minus.values <= 0)
        assert np.array_equal(tr.plus.values + tr.minus.values, f.values - psi)
    inner, _ = _cyls()
    assert D.truncate_levels(f, 0.0, inner).level_set_measure >= 0


def test_cross_term_sign_and_zero_cases():
    f = _field()
    assert D.cross_term(K, f, 1.0) == 0  # f < psi everywhere: no plus part
    assert D.cross_term(K, f, f.values.min() - 1) == 0  # no minus part
    assert D.cross_term(K, f, 0.004) > 0


def test_energy_balance_refinement_stable():
    inner, outer = _cyls()
    r = [D.energy_balance(K, _field(N), None, inner, outer).ratio for N in (16, 32)]
    assert all(x > 0 for x in r)
    assert abs(r[1] / r[0] - 1) <= 0.1


def test_integrability_gain_reports():
    inner, outer = _cyls()
    g = D.integrability_gain(K, _field(), None, inner, outer, 2.5, 0.1)
    assert g.lp_ratio > 0 and g.w_sigma_ratio > 0
    assert set(g.to_dict()) >= {"lp_ratio", "w_sigma_ratio", "rhs"}


def test_first_lemma_precondition_and_nesting():
    inner, outer = _cyls()
    f = _field(amp=0.5)
    with pytest.raises(ValueError):
        D.first_lemma(K, f, None, inner, outer, 2.5, 1e-6)
    with pytest.raises(ValueError):
        D.first_lemma(K, _field(), None, inner, outer, 2.7, 1e-3)
    rep = D.first_lemma(K, _field(), None, inner, outer, 2.5, 1e-3)
    assert rep.nested
    b = rep.schedule.boxes
    assert all(box_subset(b1, b0) for b0, b1 in zip(b, b[1:]))
    # levels rise towards L
    lv = rep.schedule.levels
    assert all(a < c for a, c in zip(lv, lv[1:]))


def test_schedule_geometry():
    z0 = KineticPoint.origin(1)
    sch = D.degiorgi_schedule(2.0, 0.5, 0.9, z0, S, 5)
    R2, r2 = 0.9 ** (2 * S), 0.5 ** (2 * S)
    for k, t in enumerate(sch.times):
        assert t == pytest.approx(-r2 - 2.0**-k * (R2 - r2))
    assert sch.levels[0] == 0
    assert all(lv < 2.0 for lv in sch.levels)


def test_slab_guard():
    f = _field()
    bad = f.with_values(f.values + 2.0)
    inner, outer = _cyls()
    with pytest.raises(ValueError):
        D.energy_balance(K, bad, None, inner, outer)


@settings(max_examples=200)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=40),
       st.fractions(min_value=-2, max_value=2, max_denominator=40),
       st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
def test_barrier_ordering_property(x, v, mu):
    B = D.Barriers(Fraction(1, 4), mu, Fraction(1, 2))
    p = [D.barrier_eval(B, x, v, i) for i in range(3)]
    assert p[0] <= p[1] <= p[2]
    for i in range(3):
        assert B.F(i, v) == oracles.barrier_F(i, Fraction(1, 4), v * v)


def test_barrier_arrays_match_scalar():
    B = D.Barriers(0.2, 0.3, 0.5)
    t = np.array([0.0])
    x = np.linspace(-3, 3, 13)
    v = np.linspace(-1, 1, 21)
    f = GridField(t, (x,), (v,), np.zeros((1, 13, 21)))
    arrs = D.barrier_arrays(B, f)
    for i in range(3):
        for a, xx in enumerate(x):
            for b, vv in enumerate(v):
                assert arrs[i][0, a, b] == pytest.approx(D.barrier_eval(B, xx, vv, i), abs=1e-12)
    with pytest.raises(ValueError):
        D.barrier_eval(B, 0.0, 0.0, 3)
    with pytest.raises(ValueError):
        D.Barriers(0.2, 1.0, 0.5)


def test_ivl_logs_consistency():
    lg = D.ivl_logs(1, 0.5, 0.5, 0.1)
    assert lg["eps_log"] == pytest.approx(math.log(1 / 16) / 0.1)
    eps = math.exp(lg["eps_log"])
    den = 0.5 + 2 + eps**-3 * 2
    assert lg["mu_log"] == pytest.approx(2 * math.log((1 / 16) / den), rel=1e-12)
    # smaller densities give smaller mu
    assert D.ivl_logs(1, 0.25, 0.5, 0.1)["mu_log"] < lg["mu_log"]
    with pytest.raises(ValueError):
        D.ivl_logs(1, 0.0, 0.5, 0.1)


def test_ivl_check_guards_and_report():
    f = _field()
    with pytest.raises(ValueError):
        D.ivl_check(K, f, None, 0.34, 0.5, 0.5)
    rep = D.ivl_check(K, f, None, 0.3, 0.5, 0.5)
    # the mass is far too small for the upper level set hypothesis
    assert rep.hypotheses_hold is False
    assert rep.conclusion_holds is None
    assert rep.to_dict()["nu_log"] == rep.nu_log


def test_mtp_constants_log_forms_agree():
    for delta in (0.9, 0.99):
        m = D.mtp_constants(delta, 1)
        assert math.log(-m["theta_log"]) == pytest.approx(m["log_neg_theta_log"], rel=1e-12)
    m = D.mtp_constants(0.5, 1)
    assert m["exponent"] == 64
    assert m["log_neg_theta_log"] == pytest.approx(math.log(2 * (1 + 2.0**64) * math.log(2)), rel=1e-12)


def test_paper_constants_dimensions():
    c = D.paper_constants(2, 0.5, 2.2)
    assert c.n == 2 * 0.5 + 2 * 3
    assert tuple(c.mu_exponents) == (28, 26)
    assert c.nu_exponent == 82
    d = c.to_dict()
    assert isinstance(d["mu_exponents"], list)


def test_poincare_regions_shape():
    reg = D.poincare_regions(1, S)
    assert reg["Q1"].time_interval == (-1.0, 0.0)
    assert reg["Q1_minus"].time_interval == (-3.0, -2.0)
    assert reg["Q3"].rho_v == 3.0
