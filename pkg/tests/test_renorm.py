"""Damped edge weights, activities, and the two Taylor-remainder claims."""

import math

import numpy as np
import pytest

from soslab.charges import ChargeDensity, Ensemble, random_ensemble
from soslab.lattice import Domain, SiteVector, gradient_sq_norm
from soslab.potential import (Extension, PotentialSpec, StripError, g_profile,
                              verify_assumptions)
from soslab.renorm import (RenormActivity, TaylorInstance, activity_regime_check,
                           aggregate_remainder_report, edge_derivative, iota,
                           iota_V, lnI_taylor_check, renorm_activity,
                           restricted_grad_sq, sigma_for_observable, synthetic_K,
                           taylor_check, _wave_edges, _iota_edges)
from soslab.spinwave import EnergyParams, SpinWave, assemble, energy
from conftest import make_regime_instance


@pytest.fixture(scope="module")
def moderate():
    """A moderate-temperature extension with honestly fitted constants,
    for checks that need visible damping."""
    ext = Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-6)
    rep = verify_assumptions(ext, np.arange(-10.0, 10.5, 0.5), [0.1, 0.3, 0.5])
    return {"ext": ext, "c_beta": rep.c_beta_fit, "c_beta_prime": rep.c_beta_prime_fit}


def test_iota_at_zero_shift(moderate):
    assert iota(moderate["ext"], 1.3, 0.0, moderate["c_beta"]) == 1.0 + 0.0j


def test_iota_modulus_bound(moderate, rng):
    ext, c = moderate["ext"], moderate["c_beta"]
    for a in (0.1, 0.3, 0.5):
        bound = math.exp(-2.0 * c * g_profile(a))
        for x in rng.uniform(-8, 8, 40):
            assert abs(iota(ext, float(x), a, c)) <= bound * (1 + 1e-10)


def test_iota_conjugation(moderate):
    ext, c = moderate["ext"], moderate["c_beta"]
    v1 = iota(ext, 0.7, -0.4, c)
    v2 = iota(ext, 0.7, 0.4, c)
    assert abs(v1 - np.conj(v2)) < 1e-12


def test_iota_rejects_strip_violation(moderate):
    with pytest.raises(StripError):
        iota(moderate["ext"], 0.0, moderate["ext"].eps_beta, moderate["c_beta"])


def test_iota_V_trivial_and_single_edge(moderate):
    ext, c = moderate["ext"], moderate["c_beta"]
    dom = Domain.box(3)
    phi = SiteVector(dom, np.zeros(dom.n))
    assert iota_V(ext, phi, SpinWave.from_sites({}), c) == 1.0 + 0.0j
    # one nonzero site of height gamma: V is that site plus its rim, and the
    # product reduces to factors iota(0, +-gamma) over the incident edges
    gamma = 0.3
    a = SpinWave.from_sites({(0, 0): gamma})
    val = iota_V(ext, phi, a, c)
    edges, shifts = _wave_edges(a)
    expect = np.prod([iota(ext, 0.0, float(s), c) for s in shifts])
    assert abs(val - expect) < 1e-12


def test_iota_V_modulus_bounded_by_one(moderate, rng):
    ext, c = moderate["ext"], moderate["c_beta"]
    dom = Domain.box(4)
    for _ in range(200):
        phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
        sites = {(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))):
                 float(rng.uniform(-0.25, 0.25)) for _ in range(3)}
        a = SpinWave.from_sites(sites)
        assert abs(iota_V(ext, phi, a, c)) <= 1.0 + 1e-10


def test_iota_derivative_bounds(moderate, rng):
    # the single- and double-edge derivatives of the product are bounded by
    # 1 + c and (c + 1)(c + 2) respectively
    ext, c = moderate["ext"], moderate["c_beta"]
    dom = Domain.box(4)
    h = 1e-5
    for _ in range(30):
        phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
        a = SpinWave.from_sites({(0, 0): float(rng.uniform(-0.5, 0.5))})
        edges, shifts = _wave_edges(a)
        xs = np.array([phi.values[dom.index_of(*i)] - phi.values[dom.index_of(*j)]
                       if dom.index_of(*j) >= 0 else phi.values[dom.index_of(*i)]
                       for i, j in edges])
        base = _iota_edges(ext, xs, shifts, c)
        up = _iota_edges(ext, xs + h / 2, shifts, c)
        dn = _iota_edges(ext, xs - h / 2, shifts, c)
        total = np.prod(base)
        d1 = total * (up - dn) / (h * base)
        assert np.all(np.abs(d1) <= (1.0 + c) * (1 + 1e-6))
        dd = total * (up - 2 * base + dn) / ((h / 2) ** 2 * base)
        logd = (up - dn) / (h * base)
        for e in range(len(edges)):
            for f in range(len(edges)):
                if e == f:
                    d2 = dd[e]
                else:
                    d2 = total * logd[e] * logd[f]
                assert abs(d2) <= (c + 1.0) * (c + 2.0) * (1 + 1e-6)


def test_renorm_activity_algebra():
    assert renorm_activity(0.0, 5.0).z == 0.0
    act = renorm_activity(1.0 / 16.0, 0.0)
    assert act.z == pytest.approx(0.125)
    assert act.z == pytest.approx(2.0 * act.K * math.exp(-act.E))


def test_activity_regime_on_synthetic_monopole(tiny_beta_extension):
    tb = tiny_beta_extension
    dom = Domain.box(24)
    rho = ChargeDensity({(0, 0): 2})
    ens = Ensemble([rho], M=16, alpha=1.75)
    asm = assemble(rho, ens, dom, tb["gamma"])
    e = energy(rho, asm.wave, EnergyParams(tb["c_beta"], tb["gamma"]))
    act = renorm_activity(synthetic_K(rho, asm.a_value), e)
    assert abs(act.z) < 0.125 / 100.0
    flags = activity_regime_check(act, tb["gamma"], rho.l1_norm, asm.a_value, 0.03)
    assert flags["within_eighth"] and flags["within_decay_bound"]


def test_taylor_instance_guard():
    dom = Domain.box(2)
    zero = SiteVector(dom, np.zeros(dom.n))
    with pytest.raises(ValueError):
        TaylorInstance(ChargeDensity({(0, 0): 1}), SpinWave.from_sites({}),
                       zero, zero, zero, zero, 0.2)


def test_taylor_check_trivial_cases(tiny_beta_extension, rng):
    tb = tiny_beta_extension
    dom = Domain.box(16)
    inst, asm, act = make_regime_instance(rng, dom, tb["ext"], tb["c_beta"],
                                          tb["gamma"])
    zero = SiteVector(dom, np.zeros(dom.n))
    still = TaylorInstance(inst.rho, inst.a, inst.phi, zero, zero, inst.zeta, act.z)
    res = taylor_check(still, tb["ext"], tb["c_beta"])
    assert res["lhs"] == 0.0 and res["S"] == 0.0 and res["pass"]
    frozen = TaylorInstance(inst.rho, inst.a, inst.phi, inst.sigma, inst.f,
                            inst.zeta, 0.0)
    res0 = taylor_check(frozen, tb["ext"], tb["c_beta"])
    assert res0["lhs"] == 0.0 and res0["S"] == 0.0 and res0["pass"]


def test_taylor_check_random_instances(tiny_beta_extension, rng):
    tb = tiny_beta_extension
    dom = Domain.box(16)
    max_slack_ratio = 0.0
    for _ in range(150):
        inst, _, act = make_regime_instance(rng, dom, tb["ext"], tb["c_beta"],
                                            tb["gamma"])
        assert abs(act.z) <= 0.125
        res = taylor_check(inst, tb["ext"], tb["c_beta"])
        assert res["pass"]
        if res["r_bound"] > 0:
            max_slack_ratio = max(max_slack_ratio, res["err"] / res["r_bound"])
    assert max_slack_ratio < 1.0


def test_taylor_error_vanishes_quadratically(tiny_beta_extension, rng):
    # a deterministic adjacent dipole keeps the activity non-negligible, so
    # the remainder is visible above roundoff and must scale quadratically
    tb = tiny_beta_extension
    dom = Domain.box(16)
    rho = ChargeDensity({(0, 0): 1, (1, 0): -1})
    ens = Ensemble([rho], M=16, alpha=1.75)
    asm = assemble(rho, ens, dom, tb["gamma"])
    e = energy(rho, asm.wave, EnergyParams(tb["c_beta"], tb["gamma"]))
    act = renorm_activity(synthetic_K(rho, asm.a_value), e)
    assert 1e-8 < abs(act.z) <= 0.125
    phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
    zeta = SiteVector(dom, rng.uniform(0, 1, dom.n))
    sigma0 = rng.normal(0, 0.05, dom.n)
    f0 = rng.normal(0, 0.05, dom.n)
    errs = []
    for t in (1.0, 0.5, 0.25):
        scaled = TaylorInstance(rho, asm.wave, phi,
                                SiteVector(dom, t * sigma0),
                                SiteVector(dom, t * f0), zeta, act.z)
        errs.append(taylor_check(scaled, tb["ext"], tb["c_beta"])["err"])
    assert errs[1] <= 0.3 * errs[0] and errs[2] <= 0.3 * errs[1]


def test_linear_form_antisymmetry(tiny_beta_extension, rng):
    tb = tiny_beta_extension
    dom = Domain.box(16)
    inst, _, _ = make_regime_instance(rng, dom, tb["ext"], tb["c_beta"],
                                      tb["gamma"])

    def linear_form(sign):
        flipped = TaylorInstance(inst.rho, inst.a, inst.phi,
                                 SiteVector(dom, sign * inst.sigma.values),
                                 SiteVector(dom, sign * inst.f.values),
                                 inst.zeta, inst.z)
        return taylor_check(flipped, tb["ext"], tb["c_beta"])["S"]

    assert abs(linear_form(1.0) + linear_form(-1.0)) < 1e-12


def test_positivity_of_renormalized_factors(tiny_beta_extension, rng):
    tb = tiny_beta_extension
    dom = Domain.box(16)
    for _ in range(50):
        inst, _, _ = make_regime_instance(rng, dom, tb["ext"], tb["c_beta"],
                                          tb["gamma"])
        res = taylor_check(inst, tb["ext"], tb["c_beta"])  # raises if <= 0
        assert res["pass"]


def test_lnI_trivial():
    ext = Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-6)
    dom = Domain.box(2)
    phi = SiteVector(dom, np.random.default_rng(0).uniform(-2, 2, dom.n))
    res = lnI_taylor_check(ext, phi, SiteVector(dom, np.zeros(dom.n)), 1.0)
    assert res["lhs"] == 0.0 and res["T"] == 0.0 and res["pass"]


def test_lnI_gaussian_single_edge_closed_form():
    # p = 2: ln(I(x+y)/I(x)) - (log I)'(x) y = -beta y^2 exactly, and the
    # fitted curvature constant is 2 beta, so the bound is met with equality
    beta = 0.4
    ext = Extension(PotentialSpec("psos", p=2.0, beta=beta))
    dom = Domain([(0, 0), (1, 0)])
    rng = np.random.default_rng(1)
    for _ in range(20):
        phi = SiteVector(dom, rng.uniform(-3, 3, 2))
        sig = SiteVector(dom, rng.uniform(-1, 1, 2))
        res = lnI_taylor_check(ext, phi, sig, 2.0 * beta)
        gsq = gradient_sq_norm(dom, sig)
        assert res["err"] == pytest.approx(beta * gsq, rel=1e-9)
        assert res["R_bound"] == pytest.approx(beta * gsq, rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_lnI_random_instances(p, rng):
    ext = Extension(PotentialSpec("psos", p=p, beta=0.5), series_tol=1e-6)
    rep = verify_assumptions(ext, np.arange(-10.0, 10.5, 0.5), [0.1, 0.3])
    dom = Domain.box(3)
    for _ in range(150):
        phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
        sig = SiteVector(dom, rng.normal(0, 0.2, dom.n))
        res = lnI_taylor_check(ext, phi, sig, rep.c_beta_prime_fit)
        assert res["pass"]


def test_lnI_antisymmetry(rng):
    ext = Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-6)
    dom = Domain.box(3)
    phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
    sig = SiteVector(dom, rng.normal(0, 0.2, dom.n))
    t1 = lnI_taylor_check(ext, phi, sig, 1.0)["T"]
    t2 = lnI_taylor_check(ext, phi, SiteVector(dom, -sig.values), 1.0)["T"]
    assert abs(t1 + t2) < 1e-12


def test_lnI_with_boundary_values(rng):
    # nonzero xi enters the boundary edges of the weight sum
    ext = Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-6)
    dom = Domain.box(2)
    xi = {ext_site: 0.7 for _, ext_site in dom.boundary_edges}
    phi = SiteVector(dom, rng.uniform(-2, 2, dom.n))
    sig = SiteVector(dom, rng.normal(0, 0.1, dom.n))
    res0 = lnI_taylor_check(ext, phi, sig, 3.0)
    res1 = lnI_taylor_check(ext, phi, sig, 3.0, xi=xi)
    assert res0["lhs"] != res1["lhs"]
    assert res1["pass"]


def test_aggregate_remainder_report(tiny_beta_extension, rng):
    tb = tiny_beta_extension
    dom = Domain.box(12)
    c5 = 0.03
    f = SiteVector.delta(dom, (0, 0))
    sigma = sigma_for_observable(dom, f, tb["gamma"], c5)
    ens = random_ensemble(dom, rng, M=16, alpha=1.75, size_budget=2)
    instances = []
    for rho in ens.charges:
        asm = assemble(rho, ens, dom, tb["gamma"])
        e = energy(rho, asm.wave, EnergyParams(tb["c_beta"], tb["gamma"]))
        act = renorm_activity(synthetic_K(rho, asm.a_value), e)
        zeta = SiteVector(dom, rng.uniform(0, 1, dom.n))
        phi = SiteVector(dom, rng.uniform(-5, 5, dom.n))
        instances.append(TaylorInstance(rho, asm.wave, phi, sigma, f, zeta, act.z))
    rep = aggregate_remainder_report(dom, ens, instances, tb["ext"],
                                     tb["c_beta"], tb["gamma"], c5)
    assert np.isfinite(rep["total"]) and np.isfinite(rep["allowance"])
    assert rep["pass"]   # in-regime activities are astronomically small
