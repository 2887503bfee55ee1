"""Comb truncations, quadrature, contour shifts, regularizer bridge."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from soslab.limits import (DecayError, TrigPoly, comb_convergence,
                           complex_translation_check, dirichlet_kernel,
                           eval_trig, integer_sum, panel_integrate,
                           regularized_weight_bridge)
from soslab.potential import Extension, PotentialSpec

GAUSS_INTEGER_SUM = 1.772637204826652   # sum over Z of exp(-n^2), frozen


@pytest.fixture(scope="module")
def ext_half():
    return Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-5)


def test_trig_poly_examples():
    flat = TrigPoly(np.zeros(3))
    x = np.linspace(-2, 2, 9)
    assert np.allclose(eval_trig(flat, x), 1.0)
    comb7 = TrigPoly.truncated_comb(7)
    assert eval_trig(comb7, np.array(0.0)) == pytest.approx(15.0)
    comb1 = TrigPoly.truncated_comb(1)
    assert eval_trig(comb1, np.array(0.5)) == pytest.approx(-1.0)
    # angular convention: 1 + 2 cos(x) at x = pi
    assert eval_trig(comb1, np.array(math.pi), convention="angular") == pytest.approx(-1.0)


def test_trig_poly_evenness():
    poly = TrigPoly(np.array([0.4, -0.7, 0.1]))
    x = np.linspace(0.01, 3.0, 50)
    assert np.allclose(eval_trig(poly, x), eval_trig(poly, -x))


def test_trig_poly_coefficient_guard():
    with pytest.raises(ValueError):
        TrigPoly(np.array([1.5]))


def test_dirichlet_kernel_identity():
    # closed-form oracle for the truncated comb at non-integer arguments
    for N in (1, 3, 7, 20):
        poly = TrigPoly.truncated_comb(N)
        x = np.array([0.123, 0.4, 0.77, 1.31, -0.26, 2.501])
        assert np.max(np.abs(eval_trig(poly, x) - dirichlet_kernel(N, x))) < 1e-10


def test_panel_integrate_matches_scipy():
    f = lambda x: np.exp(-x * x) * np.cos(3.0 * x)
    mine = panel_integrate(f, -6.0, 6.0, panel=0.5)
    ref, _ = quad(lambda x: math.exp(-x * x) * math.cos(3.0 * x), -6, 6,
                  epsabs=1e-14)
    assert abs(mine - ref) < 1e-12


def test_gaussian_integer_sum_frozen():
    assert integer_sum(lambda x: np.exp(-x * x), 10) == pytest.approx(
        GAUSS_INTEGER_SUM, abs=1e-15)


def test_comb_convergence_gaussian():
    f = lambda x: np.exp(-x * x)
    rows = comb_convergence(f, [25, 50, 100, 200], R=7.0)
    assert rows[-1]["error"] < 1e-3
    for i in range(1, len(rows)):
        assert rows[i]["error"] <= rows[i - 1]["error"] + 1e-12


def test_comb_convergence_decreasing_schedule(ext_half):
    # the strip-extension integrand has visible, strictly shrinking errors
    ext1 = Extension(PotentialSpec("psos", p=1.0, beta=1.0), series_tol=1e-6)

    def f(x):
        return np.real(ext1.eval(np.asarray(x, dtype=complex))) * np.exp(-x * x)

    rows = comb_convergence(f, [1, 2, 4, 8], R=7.0)
    errs = [r["error"] for r in rows]
    assert errs[1] < errs[0] and errs[2] < errs[1] and errs[3] < errs[2]
    assert errs[3] < 1e-10


def test_quadrature_step_self_consistency():
    f = lambda x: np.exp(-x * x)
    v1 = comb_convergence(f, [200], R=7.0, panel_scale=1.0)[0]["integral"]
    v2 = comb_convergence(f, [200], R=7.0, panel_scale=0.5)[0]["integral"]
    assert abs(v1 - v2) < 1e-8


def test_translation_zero_shift_exact(ext_half):
    res = complex_translation_check(ext_half, [0.0], L=7.0, panel=1.4, order=16)
    assert res["diff"] == 0.0


def test_translation_identity_all_path_lengths(ext_half):
    shifts = [[ext_half.eps_beta / 2], [0.25, -0.2], [0.2, -0.1, 0.25]]
    for a in shifts:
        res = complex_translation_check(ext_half, a, L=7.0, panel=1.4, order=16)
        assert res["diff"] <= 1e-6 * abs(res["lhs"])


def test_translation_equal_shifts_cancel(ext_half):
    # a constant shift leaves every edge factor unchanged; only the vertex
    # damping moves, and the identity still closes to quadrature accuracy
    res = complex_translation_check(ext_half, [0.3, 0.3], L=7.0, panel=1.4,
                                    order=16)
    assert res["diff"] <= 1e-10 * abs(res["lhs"])


def test_translation_n1_matches_scipy(ext_half):
    res = complex_translation_check(ext_half, [0.2], L=7.0, panel=1.4, order=16)
    ref, _ = quad(lambda x: float(np.real(ext_half.eval(complex(x)))) * math.exp(-x * x),
                  -7, 7, epsabs=1e-12, limit=200)
    assert res["lhs"].real == pytest.approx(ref, abs=1e-9)


def test_translation_guards(ext_half):
    with pytest.raises(ValueError):
        complex_translation_check(ext_half, [0.0, ext_half.eps_beta + 0.1])
    wide = Extension(PotentialSpec("psos", p=1.0, beta=0.01), series_tol=1e-4)
    with pytest.raises(DecayError):
        complex_translation_check(wide, [2.0], L=7.0)  # Gaussian too weak


def test_bridge_one_site_monotone():
    rows = regularized_weight_bridge(PotentialSpec("psos", p=1.0, beta=1.0),
                                     [1.0, 0.1, 0.01, 0.0], observable=(0,))
    vals = [r["value"] for r in rows]
    assert all(vals[i + 1] > vals[i] for i in range(len(vals) - 1))
    ref = vals[-1]
    gaps = [abs(v - ref) for v in vals[:-1]]
    assert all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 1))


def test_bridge_huge_regulariser_keeps_central_term():
    rows = regularized_weight_bridge(PotentialSpec("psos", p=1.0, beta=1.0),
                                     [50.0], observable=(0,))
    # only n = 0 survives: the sum is the bare central weight 1
    assert rows[0]["value"] == pytest.approx(1.0, abs=1e-20)


def test_bridge_stretched_exponential_case():
    # p < 1: heavy tails need the regularizer, and removal still converges
    spec = PotentialSpec("psos", p=0.5, beta=0.5)
    eps = [0.01, 0.003, 0.001, 0.0003, 0.0]
    rows = regularized_weight_bridge(spec, eps, observable=(2, 0))
    ref = rows[-1]["value"]
    gaps = [abs(r["value"] - ref) for r in rows[:-1]]
    assert all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 1))
    assert all(r["shell"] <= 1e-12 for r in rows)


def test_bridge_with_fiber_shift():
    spec = PotentialSpec("psos", p=1.0, beta=1.0)
    rows = regularized_weight_bridge(spec, [0.0], observable=(1,),
                                     zeta=[0.5], xi=0.0)
    # heights are symmetric around 0 under n -> -1-n, so E[phi] = 0
    assert rows[0]["value"] == pytest.approx(0.0, abs=1e-12)
