"""Shared fixtures: dense solver oracles, random domains, in-regime setups."""

import numpy as np
import pytest
import scipy.linalg as sla

from soslab.lattice import Domain, SiteVector
from soslab.potential import Extension, PotentialSpec, verify_assumptions


def dense_green(domain: Domain, f: np.ndarray) -> np.ndarray:
    """Direct dense-LU solve of the Dirichlet system (|domain| <= 4096)."""
    if domain.n > 4096:
        raise ValueError("dense oracle capped at 4096 sites")
    A = domain.laplacian_matrix().toarray()
    return sla.lu_solve(sla.lu_factor(A), f)


def random_blob(rng: np.random.Generator, n_sites: int) -> Domain:
    """A random connected lattice animal grown from the origin."""
    sites = {(0, 0)}
    while len(sites) < n_sites:
        x, y = list(sites)[int(rng.integers(0, len(sites)))]
        dx, dy = [(1, 0), (-1, 0), (0, 1), (0, -1)][int(rng.integers(0, 4))]
        sites.add((x + dx, y + dy))
    return Domain(sorted(sites))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(scope="session")
def tiny_beta_extension():
    """Deep high-temperature regime used by the renormalization layer: the
    fitted growth constants are minuscule, so translation amplitudes of
    order 10 stay inside every bound with a wide margin.  A short lattice
    window suffices at this beta (the correction coefficients are ~1e-20)."""
    ext = Extension(PotentialSpec("psos", p=1.0, beta=1e-80),
                    series_window=64, series_tol=1e-6)
    gamma = 17.0
    rep = verify_assumptions(ext, np.arange(-15.0, 15.5, 1.0), [0.5, 2.0, gamma])
    return {"ext": ext, "gamma": gamma, "c_beta": rep.c_beta_fit,
            "c_beta_prime": rep.c_beta_prime_fit}


def make_regime_instance(rng, dom, ext, c_beta, gamma, amp=0.05, M=16):
    """One in-regime Taylor instance: a random separated charge, its spin
    wave, the worst-case activity, and small random shift data."""
    from soslab import charges, renorm, spinwave

    ens = charges.random_ensemble(dom, rng, M=M, alpha=1.75, size_budget=1)
    rho = ens.charges[0]
    asm = spinwave.assemble(rho, ens, dom, gamma)
    energy = spinwave.energy(rho, asm.wave,
                             spinwave.EnergyParams(c_beta=c_beta, gamma_beta=gamma))
    act = renorm.renorm_activity(renorm.synthetic_K(rho, asm.a_value), energy)
    inst = renorm.TaylorInstance(
        rho, asm.wave,
        SiteVector(dom, rng.uniform(-5.0, 5.0, dom.n)),
        SiteVector(dom, rng.normal(0.0, amp, dom.n)),
        SiteVector(dom, rng.normal(0.0, amp, dom.n)),
        SiteVector(dom, rng.uniform(0.0, 1.0, dom.n)),
        act.z)
    return inst, asm, act
