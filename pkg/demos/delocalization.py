#!/usr/bin/env python3
"""The headline experiment at desk scale: height variance at the origin of
the integer-valued solid-on-solid interface, growing logarithmically at high
temperature (with or without boundary tilt) against the Dirichlet Green
benchmark, and flat in the frozen low-temperature phase.

Takes a few minutes.  Run:  python3 demos/delocalization.py [--quick]
"""

import sys

from soslab.sampler import variance_growth_experiment

quick = "--quick" in sys.argv
sizes = [8, 16] if quick else [8, 16, 32]
sweeps, burn, chains = (2000, 400, 16) if quick else (6000, 1500, 32)


def show(label, res):
    print(f"\n{label}")
    print(f"{'N':>4} {'Var(phi_0)':>11} {'+-':>7} {'benchmark':>10} {'tau':>6}")
    for r in res["rows"]:
        print(f"{r['N']:>4} {r['var']:>11.3f} {r['se']:>7.3f} "
              f"{r['green']:>10.4f} {r['tau_int']:>6.1f}")
    print(f"  fitted slope vs ln(2N+1): {res['var_slope']:.2f} "
          f"+- {res['var_slope_se']:.2f}")
    import math
    if res["beta_eff_fit"] and 0 < res["beta_eff_fit"] < math.inf:
        print(f"  benchmark slope {res['green_slope']:.4f}  ->  "
              f"1/beta_eff^fit = {1 / res['beta_eff_fit']:.1f}")


show("p = 1, beta = 0.1, zero tilt (rough phase)",
     variance_growth_experiment(1.0, 0.1, None, sizes, sweeps=sweeps,
                                burn_in=burn, n_chains=chains, seed=42))
show("p = 1, beta = 0.1, tilt u = (0.3, 0)",
     variance_growth_experiment(1.0, 0.1, (0.3, 0.0), sizes, sweeps=sweeps,
                                burn_in=burn, n_chains=chains, seed=43))
show("p = 1, beta = 3.0, zero tilt (frozen phase)",
     variance_growth_experiment(1.0, 3.0, None, sizes, sweeps=max(800, sweeps // 4),
                                burn_in=burn // 2, n_chains=chains // 2, seed=44))

# exploratory (logged only, never a gate): low temperature WITH tilt, where
# the degenerate staircase ground states are expected to free the interface
# even though the untilted model is frozen
show("p = 1, beta = 1.5, tilt u = (0.5, 0) (exploratory)",
     variance_growth_experiment(1.0, 1.5, (0.5, 0.0), sizes,
                                sweeps=max(1500, sweeps // 2),
                                burn_in=burn // 2, n_chains=chains // 2, seed=45))
