"""Renormalized edge weights, activities, and Taylor-remainder certification.

The translated-to-untranslated weight ratio of a single edge is damped into

    iota(x, a) = I(x + i a) / I(x) * exp(-3 c_beta g(a)),

whose modulus is <= exp(-2 c_beta g(a)) <= 1 when the strip-growth constant
c_beta is honest.  Products of edge factors over the gradient support V of a
spin wave build iota_V, the per-charge cost of a contour shift.  An activity
renormalizes as z = 2 K exp(-E) with E the spin-wave energy; in the accepted
regime |z| <= 1/8.

The two first-order expansions that drive the variance lower bound are
certified numerically on random instances:

* ``taylor_check``: the log-ratio of shifted to unshifted cosine observables
  equals an explicit linear form S plus a remainder bounded by
  6 |z| (sigma.rho + f.a)^2 + 24 (c_beta + 2)^2 |z| |V| ||grad sigma|_V||^2;
* ``lnI_taylor_check``: edge-wise log-weight increments equal
  (log I)'(x) sigma_edge plus a remainder bounded by (c'/2) ||grad sigma||^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Domain, SiteVector, gradient_sq_norm, solve_green
from .potential import Extension, StripError, g_profile
from .charges import ChargeDensity, Ensemble
from .spinwave import SpinWave, edge_set


def iota(extension: Extension, x: float, a: float, c_beta: float) -> complex:
    """Damped weight ratio at a single edge value x and shift a."""
    if abs(a) >= extension.eps_beta:
        raise StripError(f"|a| = {abs(a):g} outside the strip")
    lr = extension.log_eval(complex(x, a)) - extension.log_eval(complex(x, 0.0))
    return complex(np.exp(lr - 3.0 * c_beta * g_profile(a)))


def _iota_edges(extension: Extension, xs: np.ndarray, shifts: np.ndarray,
                c_beta: float) -> np.ndarray:
    """Per-edge iota factors, vectorized over edges."""
    if np.any(np.abs(shifts) >= extension.eps_beta):
        raise StripError("an edge shift leaves the strip")
    lr = (extension.log_eval(xs + 1j * shifts)
          - extension.log_eval(xs.astype(complex)))
    return np.exp(lr - 3.0 * c_beta * g_profile(shifts))


def _wave_edges(a: SpinWave):
    """E_V for V = supp grad a, as oriented site pairs plus shift values."""
    V = a.gradient_support()
    edges = sorted(edge_set(V))
    shifts = np.array([a.value(*i) - a.value(*j) for i, j in edges])
    return edges, shifts


def _phi_on(domain: Domain, phi: SiteVector, site) -> float:
    idx = domain.index_of(*site)
    return float(phi.values[idx]) if idx >= 0 else 0.0


def iota_V(extension: Extension, phi: SiteVector, a: SpinWave,
           c_beta: float) -> complex:
    """Product of iota factors over the edges incident to supp grad a."""
    edges, shifts = _wave_edges(a)
    if not edges:
        return 1.0 + 0.0j
    dom = phi.domain
    xs = np.array([_phi_on(dom, phi, i) - _phi_on(dom, phi, j) for i, j in edges])
    return complex(np.prod(_iota_edges(extension, xs, shifts, c_beta)))


@dataclass(frozen=True)
class RenormActivity:
    z: float
    K: float
    E: float


def renorm_activity(K: float, E: float) -> RenormActivity:
    """z = 2 K exp(-E)."""
    return RenormActivity(z=2.0 * K * math.exp(-E), K=K, E=E)


def synthetic_K(rho: ChargeDensity, A: int, C3: float = 1.0) -> float:
    """Worst-case coefficient permitted by the expansion bound with the
    Fourier weights saturated at 1: 2K = exp(C3 A) prod_v 2 exp(|rho_v|)."""
    logk = C3 * A + sum(abs(q) + math.log(2.0) for q in rho.entries.values())
    return 0.5 * math.exp(logk)


def activity_regime_check(act: RenormActivity, gamma: float, l1_norm: int,
                          A: int, c5: float) -> dict:
    """Flags (not failures) for the regime bounds on |z|."""
    bound = math.exp(-c5 * gamma * l1_norm / 2.0 - c5 * gamma * A)
    return {
        "within_decay_bound": abs(act.z) <= bound * (1 + 1e-12),
        "decay_bound": bound,
        "within_eighth": abs(act.z) <= 0.125,
    }


@dataclass
class TaylorInstance:
    """One sampled configuration for the observable-ratio expansion check."""

    rho: ChargeDensity
    a: SpinWave
    phi: SiteVector
    sigma: SiteVector
    f: SiteVector
    zeta: SiteVector
    z: float

    def __post_init__(self):
        if abs(self.z) > 0.125 + 1e-15:
            raise ValueError("activity must satisfy |z| <= 1/8")


def _theta(inst: TaylorInstance, with_sigma: bool, with_f: bool) -> float:
    dom = inst.phi.domain
    th = 0.0
    for site, q in inst.rho.entries.items():
        idx = dom.index_of(*site)
        val = inst.phi.values[idx] - inst.zeta.values[idx]
        if with_sigma:
            val += inst.sigma.values[idx]
        th += q * val
    if with_f:
        th += _f_dot_wave(inst.f, inst.a)
    return th


def _f_dot_wave(f: SiteVector, a: SpinWave) -> float:
    dom = f.domain
    return sum(float(f.values[dom.index_of(*s)]) * a.value(*s)
               for s in a.nonzero_sites() if dom.index_of(*s) >= 0)


def _fg(inst: TaylorInstance, extension: Extension, c_beta: float,
        with_sigma: bool, with_f: bool):
    dom = inst.phi.domain
    if with_sigma:
        shifted = SiteVector(dom, inst.phi.values + inst.sigma.values)
    else:
        shifted = inst.phi
    ival = iota_V(extension, shifted, inst.a, c_beta)
    th = _theta(inst, with_sigma, with_f)
    return ival.real * math.cos(th), ival.imag * math.sin(th)


def edge_derivative(extension: Extension, phi: SiteVector, a: SpinWave,
                    sigma: SiteVector, c_beta: float, h: float = 1e-5) -> complex:
    """grad sigma . d/d(grad phi) of iota_V at phi: symmetric perturbation of
    each edge variable inside its own factor only."""
    edges, shifts = _wave_edges(a)
    if not edges:
        return 0.0 + 0.0j
    dom = phi.domain
    xs = np.array([_phi_on(dom, phi, i) - _phi_on(dom, phi, j) for i, j in edges])
    sig = np.array([_phi_on(dom, sigma, i) - _phi_on(dom, sigma, j) for i, j in edges])
    base = _iota_edges(extension, xs, shifts, c_beta)
    up = _iota_edges(extension, xs + h / 2.0, shifts, c_beta)
    dn = _iota_edges(extension, xs - h / 2.0, shifts, c_beta)
    total = np.prod(base)
    return complex(total * np.sum(sig * (up - dn) / (h * base)))


def restricted_grad_sq(sigma: SiteVector, V: set) -> float:
    """||(grad sigma)|_V||^2: edges with both endpoints in V."""
    dom = sigma.domain
    total = 0.0
    for (i, j) in edge_set(V):
        if i in V and j in V:
            ii, jj = dom.index_of(*i), dom.index_of(*j)
            if ii >= 0 or jj >= 0:
                vi = sigma.values[ii] if ii >= 0 else 0.0
                vj = sigma.values[jj] if jj >= 0 else 0.0
                total += (vi - vj) ** 2
    return total


def taylor_check(inst: TaylorInstance, extension: Extension, c_beta: float,
                 h: float = 1e-5) -> dict:
    """Certify the first-order expansion of the shifted observable ratio.

    Returns lhs, the linear form S, the remainder bound, and pass/fail.
    Rejects configurations where a denominator is not strictly positive
    (impossible under |z| <= 1/8 and honest |F|, |G| <= 1).
    """
    z = inst.z
    F0, G0 = _fg(inst, extension, c_beta, with_sigma=False, with_f=False)
    F1, G1 = _fg(inst, extension, c_beta, with_sigma=True, with_f=True)
    den0 = 1.0 + z * F0 - z * G0
    den1 = 1.0 + z * F1 - z * G1
    if den0 <= 0.0 or den1 <= 0.0:
        raise ValueError("nonpositive denominator: activity out of regime")
    lhs = math.log(den1 / den0)

    dom = inst.phi.domain
    th0 = _theta(inst, with_sigma=False, with_f=False)
    iv0 = iota_V(extension, inst.phi, inst.a, c_beta)
    deriv = edge_derivative(extension, inst.phi, inst.a, inst.sigma, c_beta, h)
    pairing = (inst.rho.dot_sites(
        {s: inst.sigma.values[dom.index_of(*s)] for s in inst.rho.support})
        + _f_dot_wave(inst.f, inst.a))
    linear = (math.cos(th0) * deriv.real - math.sin(th0) * deriv.imag
              - pairing * (math.sin(th0) * iv0.real + math.cos(th0) * iv0.imag))
    S = z * linear / den0

    V = inst.a.gradient_support()
    r_bound = (6.0 * abs(z) * pairing ** 2
               + 24.0 * (c_beta + 2.0) ** 2 * abs(z) * len(V)
               * restricted_grad_sq(inst.sigma, V))
    return {
        "lhs": lhs, "S": S, "r_bound": r_bound,
        "err": abs(lhs - S), "pass": abs(lhs - S) <= r_bound,
        "pairing": pairing, "V_size": len(V),
    }


def lnI_taylor_check(extension: Extension, phi: SiteVector, sigma: SiteVector,
                     c_beta_prime: float, xi: dict | None = None) -> dict:
    """Certify the edge-wise first-order expansion of the log weight sum.

    lhs sums log I(x + sigma_edge) - log I(x) over interior and boundary
    edges (boundary with exterior values from xi, default 0); T is the linear
    form with the closed-form (log I)'.
    """
    dom = phi.domain
    xi = xi or {}
    xs, ss = [], []
    for d in (0, 2):
        m = dom.nbrs[:, d] >= 0
        idx = np.nonzero(m)[0]
        nb = dom.nbrs[idx, d]
        xs.extend(phi.values[idx] - phi.values[nb])
        ss.extend(sigma.values[idx] - sigma.values[nb])
    for s_idx, ext_site in dom.boundary_edges:
        xs.append(phi.values[s_idx] - xi.get(ext_site, 0.0))
        ss.append(sigma.values[s_idx])
    xs = np.asarray(xs)
    ss = np.asarray(ss)
    lhs = float(np.sum(np.real(extension.log_eval(xs + ss) - extension.log_eval(xs))))
    T = float(np.sum(np.real(extension.dlog_eval(xs)) * ss))
    bound = 0.5 * c_beta_prime * gradient_sq_norm(dom, sigma)
    return {"lhs": lhs, "T": T, "R_bound": bound,
            "err": abs(lhs - T), "pass": abs(lhs - T) <= bound}


def aggregate_remainder_report(domain: Domain, ensemble: Ensemble,
                               instances: list[TaylorInstance],
                               extension: Extension, c_beta: float,
                               gamma: float, c5: float) -> dict:
    """Summed per-charge remainder bounds against 2 exp(-c5 gamma / 2)
    ||grad sigma||^2 for sigma = exp(c5 gamma / 4) L^{-1} f (reported, not
    asserted: the constants are fitted)."""
    if not instances:
        return {"pass": True, "total": 0.0, "allowance": 0.0}
    sigma = instances[0].sigma
    total = 0.0
    for inst in instances:
        chk = taylor_check(inst, extension, c_beta)
        total += chk["r_bound"]
    allowance = 2.0 * math.exp(-c5 * gamma / 2.0) * gradient_sq_norm(domain, sigma)
    return {"pass": total <= allowance, "total": total, "allowance": allowance}


def sigma_for_observable(domain: Domain, f: SiteVector, gamma: float,
                         c5: float) -> SiteVector:
    """The canonical shift sigma = exp(c5 gamma / 4) L^{-1} f."""
    base = solve_green(domain, f)
    return SiteVector(domain, math.exp(c5 * gamma / 4.0) * base.values)
