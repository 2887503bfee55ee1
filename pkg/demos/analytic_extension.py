#!/usr/bin/env python3
"""The holomorphic interpolation of exp(-beta |n|^p) on its strip: integer
interpolation, strip growth, and the fitted growth/curvature constants as a
function of temperature.

Run:  python3 demos/analytic_extension.py
"""

import numpy as np

from soslab.potential import (Extension, PotentialSpec, default_grid,
                              gamma_params, verify_assumptions, weight)

spec = PotentialSpec("psos", p=1.0, beta=0.5)
ext = Extension(spec)
print(f"p = {spec.p}, beta = {spec.beta}: strip half-width {ext.eps_beta:.4f}, "
      f"lattice window {ext.series_window} (tail {ext.achieved_tail:.1e})")

n = np.arange(-6, 7)
err = np.abs(ext.eval(n.astype(complex))
             - np.array([weight(spec, int(k)) for k in n]))
print(f"integer interpolation error over |n| <= 6: {err.max():.2e}")

a = 0.9 * ext.eps_beta
x = np.array([0.0, 1.5, 4.0, 10.0])
print("\nstrip samples I(x + i a) at a = 0.9 eps:")
for xx, v in zip(x, ext.eval(x + 1j * a)):
    print(f"  x = {xx:5.1f}: {v:.6f}")

print("\nfitted constants vs beta (p = 1):")
print(f"{'beta':>8} {'c_fit':>10} {'c_prime':>10} {'c_fit/beta^(1/3)':>17}")
for beta in (0.001, 0.01, 0.1, 1.0):
    e = Extension(PotentialSpec("psos", p=1.0, beta=beta), series_tol=1e-6)
    xg = np.arange(-40.0, 40.5, 1.0)
    _, ag = default_grid(e.eps_beta)
    rep = verify_assumptions(e, xg, ag)
    print(f"{beta:>8} {rep.c_beta_fit:>10.5f} {rep.c_beta_prime_fit:>10.5f} "
          f"{rep.c_beta_fit / beta ** (1 / 3):>17.5f}")

print("\nregime test at gamma = c |ln beta| (the translation amplitude):")
for beta, c in ((1e-3, 0.2), (1e-80, 17.0 / 184.2)):
    e = Extension(PotentialSpec("psos", p=1.0, beta=beta),
                  series_window=256, series_tol=1e-6)
    rep = verify_assumptions(e, np.arange(-15.0, 15.5, 1.0),
                             [0.5, min(2.0, 0.5 * e.eps_beta)])
    gp = gamma_params(e, rep, C4=1.0, c=c)
    print(f"  beta = {beta:8.0e}, c = {c:.3f}: gamma = {gp['gamma_beta']:.2f}, "
          f"satisfied = {gp['satisfied']} (terms {gp['terms']})")
