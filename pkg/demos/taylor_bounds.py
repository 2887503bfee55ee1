#!/usr/bin/env python3
"""The two certified expansions behind the variance lower bound, on random
instances in the deep high-temperature regime: the observable-ratio claim
(with its remainder budget) and the edge-wise log-weight claim.

Run:  python3 demos/taylor_bounds.py
"""

import numpy as np

from soslab.charges import random_ensemble
from soslab.lattice import Domain, SiteVector
from soslab.potential import Extension, PotentialSpec, verify_assumptions
from soslab.renorm import (TaylorInstance, lnI_taylor_check, renorm_activity,
                           synthetic_K, taylor_check)
from soslab.spinwave import EnergyParams, assemble, energy

beta, gamma = 1e-80, 17.0
ext = Extension(PotentialSpec("psos", p=1.0, beta=beta),
                series_window=64, series_tol=1e-6)
rep = verify_assumptions(ext, np.arange(-15.0, 15.5, 1.0), [0.5, 2.0, gamma])
c_beta = rep.c_beta_fit
print(f"beta = {beta:g}, gamma = {gamma}: fitted growth constant {c_beta:.3e}")

dom = Domain.box(16)
rng = np.random.default_rng(1)
print("\nobservable-ratio expansion on 10 random instances:")
print(f"{'z':>11} {'|lhs - S|':>12} {'budget':>12} {'used':>7}")
for _ in range(10):
    ens = random_ensemble(dom, rng, M=16, alpha=1.75, size_budget=1)
    rho = ens.charges[0]
    asm = assemble(rho, ens, dom, gamma)
    e = energy(rho, asm.wave, EnergyParams(c_beta, gamma))
    act = renorm_activity(synthetic_K(rho, asm.a_value), e)
    inst = TaylorInstance(
        rho, asm.wave,
        SiteVector(dom, rng.uniform(-5, 5, dom.n)),
        SiteVector(dom, rng.normal(0, 0.05, dom.n)),
        SiteVector(dom, rng.normal(0, 0.05, dom.n)),
        SiteVector(dom, rng.uniform(0, 1, dom.n)), act.z)
    res = taylor_check(inst, ext, c_beta)
    used = res["err"] / res["r_bound"] if res["r_bound"] > 0 else 0.0
    print(f"{act.z:>11.3e} {res['err']:>12.3e} {res['r_bound']:>12.3e} "
          f"{100 * used:>6.2f}%")

print("\nlog-weight expansion at moderate temperature (p = 1, beta = 0.5):")
ext_m = Extension(PotentialSpec("psos", p=1.0, beta=0.5), series_tol=1e-6)
rep_m = verify_assumptions(ext_m, np.arange(-10.0, 10.5, 0.5), [0.1, 0.3])
dom3 = Domain.box(3)
worst = 0.0
for _ in range(200):
    phi = SiteVector(dom3, rng.uniform(-5, 5, dom3.n))
    sig = SiteVector(dom3, rng.normal(0, 0.2, dom3.n))
    res = lnI_taylor_check(ext_m, phi, sig, rep_m.c_beta_prime_fit)
    worst = max(worst, res["err"] / res["R_bound"])
print(f"  200 instances, worst remainder / budget = {100 * worst:.1f}%")
