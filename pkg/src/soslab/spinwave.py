"""Spin-wave construction and the translation energy functional.

For a charge density rho inside an ensemble, the translation profile is
assembled from

* a bipartite-class indicator b_0 equal to sign(rho) on the class carrying
  at least half of ||rho||_1 (support inside supp rho, unit gradients), and
* per separated cover square s at level k, a bump b_k^s: for k < 10 the
  constant sign(rho . 1_s) 2^{-k} on the l1 1-neighbourhood of s; for k >= 10
  a plateau of 1/4 on {dist(., s) <= 2^{k-3}} ramping linearly (in l1
  distance) to zero at 2^{k-1}, flattened to a single value on each connected
  cluster of nearby-charge envelopes it meets.

The assembled wave is gamma (b_0 + sum b_k^s).  Every constructed component
is checked post hoc against its contract (support, constancy, gradient
bounds, charge pairing) and violations raise :class:`SpinWaveError`; these
checks are oracles, not recoverable states.

The energy gain of translating along a wave ``a`` is

    E(rho, a) = rho . a - c2_factor * c_beta * sum_edges g(a_i - a_j)

with the fixed profile g(a) = a^2 (1 + e^{2 pi |a|}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lattice import Domain
from .potential import g_profile
from .charges import (ChargeDensity, Ensemble, centre, d_lambda, sc_lambda,
                      a_lambda, sep_squares, envelope, l1)


class SpinWaveError(AssertionError):
    """A constructed spin wave violated one of its contract properties."""


class SpinWave:
    """A finitely supported real profile on Z^2, stored as a dense patch.

    ``origin`` is the coordinate of patch[0, 0]; values outside the patch are
    zero.  Dense storage keeps gradient/energy sums vectorized even for the
    large-scale ramp profiles (k >= 10 spans ~10^6 sites).
    """

    def __init__(self, origin: tuple[int, int], patch: np.ndarray):
        self.origin = (int(origin[0]), int(origin[1]))
        self.patch = np.asarray(patch, dtype=float)

    @classmethod
    def from_sites(cls, values: dict) -> "SpinWave":
        if not values:
            return cls((0, 0), np.zeros((1, 1)))
        xs = [s[0] for s in values]
        ys = [s[1] for s in values]
        patch = np.zeros((max(xs) - min(xs) + 1, max(ys) - min(ys) + 1))
        for (x, y), v in values.items():
            patch[x - min(xs), y - min(ys)] = v
        return cls((min(xs), min(ys)), patch)

    def value(self, x: int, y: int) -> float:
        gx, gy = x - self.origin[0], y - self.origin[1]
        if 0 <= gx < self.patch.shape[0] and 0 <= gy < self.patch.shape[1]:
            return float(self.patch[gx, gy])
        return 0.0

    def nonzero_sites(self):
        idx = np.argwhere(self.patch != 0.0)
        return [(int(i + self.origin[0]), int(j + self.origin[1])) for i, j in idx]

    def support_size(self) -> int:
        return int(np.count_nonzero(self.patch))

    def scaled(self, t: float) -> "SpinWave":
        return SpinWave(self.origin, t * self.patch)

    def dot_charge(self, rho: ChargeDensity) -> float:
        return sum(q * self.value(*s) for s, q in rho.entries.items())

    def _padded(self) -> np.ndarray:
        return np.pad(self.patch, 1)

    def edge_diffs(self):
        """Arrays of differences along +x and +y over the zero-padded patch;
        every lattice edge with a nonzero difference appears exactly once."""
        p = self._padded()
        return p[1:, :] - p[:-1, :], p[:, 1:] - p[:, :-1]

    def max_edge_gradient(self) -> float:
        dx, dy = self.edge_diffs()
        return max(float(np.max(np.abs(dx))), float(np.max(np.abs(dy))))

    def grad_sq_norm(self) -> float:
        dx, dy = self.edge_diffs()
        return float(np.sum(dx * dx) + np.sum(dy * dy))

    def edge_cost(self, g: Callable = g_profile) -> float:
        """sum over all edges of g(difference); zero-difference edges cost 0."""
        dx, dy = self.edge_diffs()
        total = 0.0
        for d in (dx, dy):
            nz = d[d != 0.0]
            if len(nz):
                total += float(np.sum(g(nz)))
        return total

    def gradient_support(self) -> set:
        """Sites with at least one incident edge of nonzero difference."""
        p = self._padded()
        dx = p[1:, :] != p[:-1, :]
        dy = p[:, 1:] != p[:, :-1]
        mask = np.zeros_like(p, dtype=bool)
        mask[1:, :] |= dx
        mask[:-1, :] |= dx
        mask[:, 1:] |= dy
        mask[:, :-1] |= dy
        ox, oy = self.origin[0] - 1, self.origin[1] - 1
        return {(int(i) + ox, int(j) + oy) for i, j in np.argwhere(mask)}

    def is_constant_on(self, sites) -> bool:
        vals = {self.value(*s) for s in sites}
        return len(vals) <= 1


def edge_set(sites: set) -> set:
    """E_V: unordered edges with at least one endpoint in the site set."""
    out = set()
    for (x, y) in sites:
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            out.add(((x, y), nb) if (x, y) < nb else (nb, (x, y)))
    return out


def merge_waves(waves: list[SpinWave]) -> SpinWave:
    """Sum of waves on the union bounding box."""
    xs0 = [w.origin[0] for w in waves]
    ys0 = [w.origin[1] for w in waves]
    xs1 = [w.origin[0] + w.patch.shape[0] for w in waves]
    ys1 = [w.origin[1] + w.patch.shape[1] for w in waves]
    ox, oy = min(xs0), min(ys0)
    patch = np.zeros((max(xs1) - ox, max(ys1) - oy))
    for w in waves:
        sx, sy = w.origin[0] - ox, w.origin[1] - oy
        patch[sx:sx + w.patch.shape[0], sy:sy + w.patch.shape[1]] += w.patch
    return SpinWave((ox, oy), patch)


def _neighbourhood(rho: ChargeDensity, context: Ensemble, domain: Domain):
    """Other ensemble charges at comparable or smaller scale, with their
    enlarged envelopes."""
    d = d_lambda(domain, rho)
    out = []
    for other in context.charges:
        if other is rho or other.entries == rho.entries:
            continue
        if d_lambda(domain, other) <= 2 * d:
            out.append((other, envelope(domain, other)))
    return out


def _clusters(near) -> list[set]:
    """Connected components of the union of enlarged envelopes."""
    union = set()
    for _, env in near:
        union |= env["Dplus"]
    comps = []
    todo = set(union)
    while todo:
        seed = todo.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            x, y = stack.pop()
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in todo:
                    todo.remove(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(comp)
    return comps


def build_b0(rho: ChargeDensity, context: Ensemble, domain: Domain) -> SpinWave:
    """Bipartite-class component: sign(rho) on the class holding at least half
    of ||rho||_1 (prefer the centre's class when d = 1, then even parity)."""
    w = {0: 0, 1: 0}
    for (x, y), q in rho.entries.items():
        w[(x + y) & 1] += abs(q)
    half = rho.l1_norm / 2.0
    cands = [c for c in (0, 1) if w[c] >= half]
    ctr = centre(domain, rho)
    ctr_par = (ctr[0] + ctr[1]) & 1
    if d_lambda(domain, rho) == 1 and ctr_par in cands:
        cls = ctr_par
    else:
        cls = cands[0] if len(cands) == 1 else 0
    vals = {s: float(np.sign(q)) for s, q in rho.entries.items()
            if (s[0] + s[1]) & 1 == cls}
    wave = SpinWave.from_sites(vals) if vals else SpinWave((0, 0), np.zeros((1, 1)))

    if not set(wave.nonzero_sites()) <= set(rho.support):
        raise SpinWaveError("b0 support escapes supp rho")
    if wave.max_edge_gradient() > 1.0 + 1e-12:
        raise SpinWaveError("b0 edge gradient exceeds 1")
    if wave.dot_charge(rho) < half - 1e-12:
        raise SpinWaveError("b0 pairing below half of ||rho||_1")
    for _, env in _neighbourhood(rho, context, domain):
        if not wave.is_constant_on(env["Dplus"]):
            raise SpinWaveError("b0 not constant on a nearby envelope")
    return wave


def _square_dist_grid(corner, side, ox, oy, nx, ny):
    """l1 distance to the square on an (nx, ny) patch with given origin."""
    x = np.arange(ox, ox + nx)[:, None]
    y = np.arange(oy, oy + ny)[None, :]
    dx = np.maximum(np.maximum(corner[0] - x, x - (corner[0] + side - 1)), 0)
    dy = np.maximum(np.maximum(corner[1] - y, y - (corner[1] + side - 1)), 0)
    return dx + dy


def build_bks(rho: ChargeDensity, k: int, s: tuple, context: Ensemble,
              domain: Domain) -> SpinWave:
    """Square component for a separated level-k cover square s (clipped to the
    domain).  All contract properties are asserted post hoc."""
    chi = sum(q for site, q in rho.entries.items()
              if s[0] <= site[0] < s[0] + (1 << k) and s[1] <= site[1] < s[1] + (1 << k))
    if chi == 0:
        raise SpinWaveError("separated square carries zero charge")
    sign = 1.0 if chi > 0 else -1.0
    side = 1 << k
    near = _neighbourhood(rho, context, domain)

    if k < 10:
        reach = 1
        amp = sign * 2.0 ** (-k)
        plateau_r = 1
    else:
        reach = 2 ** (k - 1) - 1          # support radius (value 0 at 2^{k-1})
        amp = sign * 0.25
        plateau_r = 2 ** (k - 3)

    ox, oy = s[0] - reach, s[1] - reach
    nx = ny = side + 2 * reach
    dist = _square_dist_grid(s, side, ox, oy, nx, ny)
    if k < 10:
        patch = np.where(dist <= 1, amp, 0.0)
    else:
        r0, r1 = plateau_r, 2 ** (k - 1)
        patch = amp * np.clip((r1 - dist) / (r1 - r0), 0.0, 1.0)

    wave = SpinWave((ox, oy), patch)

    # clip to the domain
    xs = np.arange(ox, ox + nx)[:, None]
    ys = np.arange(oy, oy + ny)[None, :]
    member = domain.contains_mask(np.broadcast_to(xs, (nx, ny)),
                                  np.broadcast_to(ys, (nx, ny)))
    wave.patch[~member] = 0.0

    if k >= 10:
        # flatten over each nearby-envelope cluster the wave meets
        for comp in _clusters(near):
            vals = {wave.value(*site) for site in comp}
            if len(vals) <= 1:
                continue
            rep = min(comp, key=lambda site: (_sq_dist(site, s, side), site))
            rv = wave.value(*rep)
            for site in comp:
                px, py = site[0] - ox, site[1] - oy
                if 0 <= px < nx and 0 <= py < ny:
                    wave.patch[px, py] = rv
                elif rv != 0.0:
                    raise SpinWaveError("cluster flattening escapes the patch")

    _assert_bks(wave, rho, k, s, side, plateau_r, near, domain, dist, member)
    return wave


def _sq_dist(site, corner, side):
    dx = max(corner[0] - site[0], site[0] - (corner[0] + side - 1), 0)
    dy = max(corner[1] - site[1], site[1] - (corner[1] + side - 1), 0)
    return dx + dy


def _assert_bks(wave, rho, k, s, side, plateau_r, near, domain, dist, member):
    tol = 1e-12
    nz = wave.patch != 0.0
    # support radius and domain membership
    if np.any(dist[nz] > 2 ** max(k - 1, 0)):
        raise SpinWaveError("support outside radius 2^(k-1)")
    if np.any(~member[nz]):
        raise SpinWaveError("support escapes the domain")
    # constancy on the plateau intersected with the domain (min-convention at
    # k < 10, where the profile is constant on the full l1 1-neighbourhood)
    rad = plateau_r if k >= 10 else min(plateau_r, 1)
    plat_vals = wave.patch[(dist <= rad) & member]
    if len(plat_vals) and np.ptp(plat_vals) > tol:
        raise SpinWaveError("not constant on the plateau")
    # constancy on nearby envelopes
    for _, env in near:
        if not wave.is_constant_on(env["Dplus"]):
            raise SpinWaveError("not constant on a nearby envelope")
    # two-zone gradient bound: vectorized away from clusters, local at them
    comps = _clusters(near)
    p = wave._padded()
    in_cluster = np.zeros(p.shape, dtype=bool)
    ox, oy = wave.origin[0] - 1, wave.origin[1] - 1
    for comp in comps:
        for (x, y) in comp:
            px, py = x - ox, y - oy
            if 0 <= px < p.shape[0] and 0 <= py < p.shape[1]:
                in_cluster[px, py] = True
    base = 2.0 ** (-k)
    for axis in (0, 1):
        d = np.diff(p, axis=axis)
        touched = (np.take(in_cluster, range(0, in_cluster.shape[axis] - 1), axis=axis)
                   | np.take(in_cluster, range(1, in_cluster.shape[axis]), axis=axis))
        away = np.abs(d[~touched])
        if len(away) and np.max(away) > base + tol:
            raise SpinWaveError("gradient exceeds 2^-k away from clusters")
    comp_of = {}
    diam_of = []
    for ci, comp in enumerate(comps):
        diam_of.append(max((l1(a, b) for a in comp for b in comp), default=0))
        for site in comp:
            comp_of[site] = ci
    for site, ci in comp_of.items():
        x, y = site
        va = wave.value(x, y)
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            da = abs(va - wave.value(*nb))
            if nb in comp_of:
                if comp_of[nb] == ci and da > tol:
                    raise SpinWaveError("nonconstant inside a cluster")
            elif da > diam_of[ci] * base + tol:
                raise SpinWaveError("gradient exceeds diam(E)/2^k at a cluster boundary")
    # charge pairing
    if wave.dot_charge(rho) < 2.0 ** (-9) - tol:
        raise SpinWaveError("charge pairing below 2^-9")


@dataclass
class EnergyParams:
    """Inputs of the energy functional: fitted growth constant, translation
    amplitude, cost profile, and the loss multiplier (3 by convention)."""

    c_beta: float
    gamma_beta: float
    g: Callable = g_profile
    c2_factor: float = 3.0


def energy(rho: ChargeDensity, a: SpinWave, params: EnergyParams) -> float:
    """E(rho, a) = rho . a - c2_factor * c_beta * sum_edges g(a_i - a_j)."""
    return a.dot_charge(rho) - params.c2_factor * params.c_beta * a.edge_cost(params.g)


@dataclass
class AssembledWave:
    wave: SpinWave
    components: list
    sep_count: int
    norm_ratio: float          # ||grad a||^2 / (gamma^2 (A + |supp|))
    a_value: int               # A_Lambda(rho)
    pairing: float             # a . rho


def assemble(rho: ChargeDensity, context: Ensemble, domain: Domain,
             gamma_beta: float, norm_constant_cap: float = 64.0) -> AssembledWave:
    """gamma (b_0 + sum over separated squares b_k^s), with the contract
    assertions: support inside the envelope and the domain, per-edge single
    gradient contributor, edge gradients <= gamma, pairing lower bound, and
    the gradient-norm bound with fitted constant (capped loosely)."""
    comps = [build_b0(rho, context, domain)]
    sc = sc_lambda(domain, rho, context.M, context.alpha)
    n_sep = 0
    for k in range(1, sc + 1):
        for s in sep_squares(domain, rho, k, context.M, context.alpha):
            comps.append(build_bks(rho, k, s, context, domain))
            n_sep += 1
    total = merge_waves(comps).scaled(gamma_beta)

    if gamma_beta != 0.0:
        env = envelope(domain, rho)["envelope"]
        nz = total.patch != 0.0
        xs = np.arange(total.origin[0], total.origin[0] + total.patch.shape[0])[:, None]
        ys = np.arange(total.origin[1], total.origin[1] + total.patch.shape[1])[None, :]
        ball = (np.abs(xs - env.center[0]) + np.abs(ys - env.center[1])) <= env.radius - 1
        member = domain.contains_mask(np.broadcast_to(xs, nz.shape),
                                      np.broadcast_to(ys, nz.shape))
        if np.any(nz & ~(ball & member)):
            raise SpinWaveError("assembled support escapes the envelope or domain")
        _assert_single_contributor(comps)
        if total.max_edge_gradient() > gamma_beta + 1e-12:
            raise SpinWaveError("assembled edge gradient exceeds gamma")

    A = a_lambda(domain, rho, context.M, context.alpha)
    denom = gamma_beta ** 2 * (A + len(rho.support))
    ratio = total.grad_sq_norm() / denom if denom > 0 else 0.0
    if ratio > norm_constant_cap:
        raise SpinWaveError(f"gradient norm ratio {ratio:.3g} exceeds cap")
    pairing = total.dot_charge(rho)
    if gamma_beta > 0 and pairing < gamma_beta * (rho.l1_norm / 2.0
                                                  + n_sep * 2.0 ** (-9)) - 1e-9:
        raise SpinWaveError("assembled pairing below the component lower bounds")
    return AssembledWave(total, comps, n_sep, ratio, A, pairing)


def _assert_single_contributor(comps: list[SpinWave]) -> None:
    """No lattice edge carries a nonzero gradient of more than one component."""
    merged = merge_waves(comps)
    ox, oy = merged.origin
    nx, ny = merged.patch.shape
    cx = np.zeros((nx + 1, ny + 2), dtype=np.uint8)
    cy = np.zeros((nx + 2, ny + 1), dtype=np.uint8)
    for w in comps:
        p = w._padded()
        sx, sy = w.origin[0] - 1 - (ox - 1), w.origin[1] - 1 - (oy - 1)
        dx = np.diff(p, axis=0) != 0.0
        dy = np.diff(p, axis=1) != 0.0
        cx[sx:sx + dx.shape[0], sy:sy + dx.shape[1]] += dx
        cy[sx:sx + dy.shape[0], sy:sy + dy.shape[1]] += dy
    if cx.max(initial=0) > 1 or cy.max(initial=0) > 1:
        raise SpinWaveError("an edge has two gradient contributors")


def energy_bound_check(ensemble: Ensemble, domain: Domain,
                       params: EnergyParams) -> dict:
    """Per-charge energy ratios E / (gamma (||rho||_1 + A)); flags any <= 0."""
    rows = []
    for rho in ensemble.charges:
        asm = assemble(rho, ensemble, domain, params.gamma_beta)
        e = energy(rho, asm.wave, params)
        denom = params.gamma_beta * (rho.l1_norm + asm.a_value)
        rows.append({
            "l1": rho.l1_norm, "A": asm.a_value, "energy": e,
            "ratio": e / denom if denom > 0 else math.inf,
            "norm_ratio": asm.norm_ratio, "sep_count": asm.sep_count,
        })
    ratios = [r["ratio"] for r in rows]
    return {
        "rows": rows,
        "min_ratio": min(ratios) if ratios else math.inf,
        "max_norm_ratio": max((r["norm_ratio"] for r in rows), default=0.0),
        "violation": any(r <= 0 for r in ratios),
    }
