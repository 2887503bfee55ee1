#!/usr/bin/env python3
"""Dirichlet Green functions on boxes: the logarithmic growth of the
quadratic form f . L^{-1} f for a point charge, against the classical
1/(2 pi) ln N asymptotic.

Run:  python3 demos/green_functions.py
"""

import math

import numpy as np

from soslab.lattice import Domain, SiteVector, quadratic_form, solve_green

print("point-charge quadratic form on boxes {-N..N}^2")
print(f"{'N':>4} {'(2N+1)':>7} {'f.L^-1 f':>10} {'increment/ln':>13}")
prev = None
for N in (4, 8, 16, 32, 64):
    dom = Domain.box(N)
    q = quadratic_form(dom, SiteVector.delta(dom, (0, 0)))
    slope = ""
    if prev is not None:
        slope = f"{(q - prev[1]) / math.log((2 * N + 1) / (2 * prev[0] + 1)):13.4f}"
    print(f"{N:>4} {2 * N + 1:>7} {q:>10.5f} {slope:>13}")
    prev = (N, q)
print(f"\nclassical benchmark 1/(2 pi) = {1 / (2 * math.pi):.4f}")

# a non-rectangular domain works the same way
cross = [(x, y) for x in range(-6, 7) for y in (-1, 0, 1)]
cross += [(x, y) for x in (-1, 0, 1) for y in range(-6, 7) if (x, y) not in cross]
dom = Domain(cross)
f = SiteVector.delta(dom, (0, 0))
sigma = solve_green(dom, f)
print(f"\ncross-shaped domain, {dom.n} sites: "
      f"f.L^-1 f = {f.dot(sigma):.5f}, max potential {sigma.values.max():.5f}")
