"""Charge-density combinatorics: diameters, square covers, separation, envelopes.

A charge density is a nonzero finitely supported integer-valued function on
Z^2.  The multiscale bookkeeping attached to it relative to a domain:

* the domain-modified diameter ``d_lambda`` (diameter for neutral densities,
  else also the distance to the domain complement),
* minimum-cardinality covers by 2^k x 2^k axis-aligned squares (exact
  branch-and-bound set cover, deterministic lexicographic tie-break),
* the dyadic scale ``sc_lambda`` = ceil(log2(M d^alpha)) and the total square
  count ``a_lambda`` summed over k = 0..sc,
* the well-separated squares of each cover level,
* the envelope: an l1 ball of radius < 2 d around a canonical centre site.

All distances are l1 (nearest-neighbour graph) distances; square-to-square
distance is the min over site pairs.  M defaults to 2^16 and alpha to 7/4;
desk-scale ensemble generators shrink M and recompute every threshold from
the instance values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .lattice import Domain

DEFAULT_M = 2 ** 16
DEFAULT_ALPHA = 7.0 / 4.0


@dataclass(frozen=True)
class ChargeDensity:
    """Sparse integer map with finite nonempty support (no stored zeros)."""

    entries: dict

    def __post_init__(self):
        ent = {(int(x), int(y)): int(q) for (x, y), q in self.entries.items() if q != 0}
        if not ent:
            raise ValueError("charge density must be nonzero")
        object.__setattr__(self, "entries", ent)

    @cached_property
    def support(self) -> tuple:
        return tuple(sorted(self.entries))

    @cached_property
    def l1_norm(self) -> int:
        return sum(abs(q) for q in self.entries.values())

    @cached_property
    def total_charge(self) -> int:
        return sum(self.entries.values())

    @cached_property
    def diameter(self) -> int:
        pts = self.support
        return max((l1(a, b) for a in pts for b in pts), default=0)

    def is_neutral(self) -> bool:
        return self.total_charge == 0

    def dot_sites(self, values: dict) -> float:
        """sum_i rho_i v_i for a sparse real map v."""
        return sum(q * values.get(s, 0.0) for s, q in self.entries.items())

    def translate(self, dx: int, dy: int) -> "ChargeDensity":
        return ChargeDensity({(x + dx, y + dy): q for (x, y), q in self.entries.items()})

    def reflect(self) -> "ChargeDensity":
        """rho^rfl with rho^rfl_i = rho_{-i}."""
        return ChargeDensity({(-x, -y): q for (x, y), q in self.entries.items()})


def l1(a, b) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def support_distance(rho: ChargeDensity, other: ChargeDensity) -> int:
    return min(l1(a, b) for a in rho.support for b in other.support)


def dist_to_complement(domain: Domain, rho: ChargeDensity) -> int:
    dt = domain.dist_to_complement()
    d = None
    for s in rho.support:
        i = domain.index_of(*s)
        if i < 0:
            raise ValueError(f"support site {s} escapes the domain")
        d = int(dt[i]) if d is None else min(d, int(dt[i]))
    return d


def d_lambda(domain: Domain, rho: ChargeDensity) -> int:
    """Domain-modified diameter: diam for neutral rho, else
    max(diam, dist(supp, complement))."""
    if rho.is_neutral():
        return rho.diameter
    return max(rho.diameter, dist_to_complement(domain, rho))


def sc_lambda(domain: Domain, rho: ChargeDensity, M: int = DEFAULT_M,
              alpha: float = DEFAULT_ALPHA) -> int:
    """Dyadic scale ceil(log2(M d^alpha))."""
    d = d_lambda(domain, rho)
    return int(math.ceil(math.log2(M * d ** alpha)))


@dataclass(frozen=True)
class CoverResult:
    k: int
    squares: tuple            # lower-left corners of 2^k x 2^k squares
    minimal: bool             # exact-solver flag (greedy fallback sets False)

    def __len__(self):
        return len(self.squares)


def _covers(corner, side, pt):
    return corner[0] <= pt[0] < corner[0] + side and corner[1] <= pt[1] < corner[1] + side


def _candidate_corners(points, side):
    """Anchored candidate family: any cover can be normalized so each square's
    corner is (min x, min y) of the points it covers, hence corners range over
    support-x times support-y values."""
    xs = sorted({p[0] for p in points})
    ys = sorted({p[1] for p in points})
    out = []
    for ax in xs:
        for ay in ys:
            mask = 0
            for i, p in enumerate(points):
                if ax <= p[0] < ax + side and ay <= p[1] < ay + side:
                    mask |= 1 << i
            if mask:
                out.append(((ax, ay), mask))
    return out


def _greedy_cover(points, side):
    cands = _candidate_corners(points, side)
    full = (1 << len(points)) - 1
    covered = 0
    chosen = []
    while covered != full:
        best = max(cands, key=lambda cm: (bin(cm[1] & ~covered).count("1"), cm[0]))
        chosen.append(best[0])
        covered |= best[1]
    return tuple(sorted(chosen))


def _recenter(corners, points, side):
    """Centre each chosen square on the points assigned to it (first cover in
    lex corner order wins).  Keeps the cover property and the minimal count,
    and prevents rim collisions between nested squares of different scales.
    """
    corners = sorted(corners)
    assigned = {c: [] for c in corners}
    for p in points:
        for c in corners:
            if _covers(c, side, p):
                assigned[c].append(p)
                break
    out = []
    for c, pts in assigned.items():
        if not pts:
            out.append(c)
            continue
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        out.append(((min(xs) + max(xs) + 1 - side) // 2,
                    (min(ys) + max(ys) + 1 - side) // 2))
    return tuple(sorted(out))


def square_cover(rho: ChargeDensity, k: int, exact_cap: int = 24) -> CoverResult:
    """Minimum-cardinality cover of supp rho by 2^k x 2^k squares.

    Exact branch-and-bound over the anchored candidate family with a
    lexicographic tie-break, after which each square is re-centered on its
    covered points (deterministic; count unchanged).  Supports larger than
    ``exact_cap`` points fall back to greedy (flagged minimal=False).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    side = 1 << k
    points = list(rho.support)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    if max(xs) - min(xs) < side and max(ys) - min(ys) < side:
        return CoverResult(k, _recenter([(min(xs), min(ys))], points, side), True)
    if len(points) > exact_cap:
        return CoverResult(k, _recenter(_greedy_cover(points, side), points, side), False)

    cands = _candidate_corners(points, side)
    full = (1 << len(points)) - 1
    greedy = _greedy_cover(points, side)
    best = {"count": len(greedy), "corners": tuple(sorted(greedy))}
    by_point = [[cm for cm in cands if cm[1] >> i & 1] for i in range(len(points))]

    def recurse(covered, chosen):
        if covered == full:
            cand = tuple(sorted(chosen))
            if len(cand) < best["count"] or (len(cand) == best["count"]
                                             and cand < best["corners"]):
                best["count"] = len(cand)
                best["corners"] = cand
            return
        if len(chosen) + 1 > best["count"]:
            return
        i = (~covered & full).bit_length() - 1  # highest uncovered bit
        for corner, mask in by_point[i]:
            chosen.append(corner)
            recurse(covered | mask, chosen)
            chosen.pop()

    recurse(0, [])
    return CoverResult(k, _recenter(best["corners"], points, side), True)


def a_lambda(domain: Domain, rho: ChargeDensity, M: int = DEFAULT_M,
             alpha: float = DEFAULT_ALPHA, exact_cap: int = 24) -> int:
    """Total square count sum_{k=0}^{sc} |cover_k(rho)|."""
    sc = sc_lambda(domain, rho, M, alpha)
    return sum(len(square_cover(rho, k, exact_cap)) for k in range(sc + 1))


def square_distance(c1, c2, side: int) -> int:
    """l1 distance between two side x side squares given lower-left corners."""
    gx = max(c1[0] - (c2[0] + side - 1), c2[0] - (c1[0] + side - 1), 0)
    gy = max(c1[1] - (c2[1] + side - 1), c2[1] - (c1[1] + side - 1), 0)
    return gx + gy


def sep_squares(domain: Domain, rho: ChargeDensity, k: int, M: int = DEFAULT_M,
                alpha: float = DEFAULT_ALPHA, exact_cap: int = 24) -> tuple:
    """Well-separated squares of the level-k cover.

    Multi-square covers keep squares at distance >= 2 M 2^{alpha(k+1)} from
    every other square; a single-square cover qualifies only when rho is
    charged and sits at distance >= 2^{k+1} from the domain complement.
    """
    if k < 1:
        raise ValueError("separation is defined for k >= 1")
    cover = square_cover(rho, k, exact_cap)
    side = 1 << k
    if len(cover) > 1:
        thr = 2 * M * 2 ** (alpha * (k + 1))
        out = []
        for s in cover.squares:
            md = min(square_distance(s, s2, side) for s2 in cover.squares if s2 != s)
            if md >= thr:
                out.append(s)
        return tuple(out)
    if not rho.is_neutral() and dist_to_complement(domain, rho) >= 2 ** (k + 1):
        return cover.squares
    return ()


def centre(domain: Domain, rho: ChargeDensity) -> tuple:
    """Canonical centre site: a support site realizing the diameter when
    d = diam, else a support site realizing the distance to the complement;
    lexicographic smallest in either case."""
    d = d_lambda(domain, rho)
    if d == rho.diameter:
        cand = [a for a in rho.support
                if any(l1(a, b) == rho.diameter for b in rho.support)]
    else:
        dt = domain.dist_to_complement()
        cand = [a for a in rho.support if int(dt[domain.index_of(*a)]) == d]
    return min(cand)


@dataclass(frozen=True)
class Envelope:
    center: tuple
    radius: int               # sites strictly closer than 2 d_lambda

    def ball(self, extra: int = 0) -> set:
        """Explicit l1 ball {i : dist(center, i) <= radius - 1 + extra}."""
        r = self.radius - 1 + extra
        cx, cy = self.center
        return {(cx + dx, cy + dy) for dx in range(-r, r + 1)
                for dy in range(-r + abs(dx), r - abs(dx) + 1)}

    def contains(self, site, extra: int = 0) -> bool:
        return l1(self.center, site) <= self.radius - 1 + extra


def envelope(domain: Domain, rho: ChargeDensity):
    """Centre plus the envelope D (dist < 2 d) and enlarged D+ (dist from D
    <= 1, i.e. dist from the centre <= 2 d)."""
    ctr = centre(domain, rho)
    d = d_lambda(domain, rho)
    env = Envelope(ctr, 2 * d)
    return {"center": ctr, "envelope": env, "D": env.ball(0), "Dplus": env.ball(1)}


@dataclass
class Ensemble:
    """Charge densities with disjoint supports satisfying the pairwise
    separation dist(rho, rho') >= M min(d(rho), d(rho'))^alpha."""

    charges: list
    M: int = DEFAULT_M
    alpha: float = DEFAULT_ALPHA

    def validate(self, domain: Domain) -> None:
        seen = set()
        dvals = [d_lambda(domain, r) for r in self.charges]
        for r in self.charges:
            if seen & set(r.support):
                raise ValueError("supports are not disjoint")
            seen |= set(r.support)
        for i in range(len(self.charges)):
            for j in range(i + 1, len(self.charges)):
                need = self.M * min(dvals[i], dvals[j]) ** self.alpha
                got = support_distance(self.charges[i], self.charges[j])
                if got < need:
                    raise ValueError(
                        f"separation violated: dist = {got} < {need:g}")


def _random_cluster(rng: np.random.Generator) -> ChargeDensity:
    """A small same-sign cluster or a +/-1 dipole near the origin."""
    if rng.random() < 0.3:
        gap = int(rng.integers(1, 3))
        return ChargeDensity({(0, 0): 1, (gap, 0): -1})
    sign = 1 if rng.random() < 0.5 else -1
    n_pts = int(rng.integers(1, 5))
    pts = {(0, 0)}
    while len(pts) < n_pts:
        x, y = list(pts)[int(rng.integers(0, len(pts)))]
        dx, dy = [(1, 0), (-1, 0), (0, 1), (0, -1)][int(rng.integers(0, 4))]
        pts.add((x + dx, y + dy))
    return ChargeDensity({p: sign * int(rng.integers(1, 6)) for p in pts})


def random_ensemble(domain: Domain, rng: np.random.Generator, M: int,
                    alpha: float, size_budget: int,
                    max_attempts: int | None = None) -> Ensemble:
    """Rejection-sample an ensemble satisfying the separation invariant.

    Successive charges are placed uniformly in the domain and kept when the
    pairwise distance constraint against every accepted charge holds.  On
    budget exhaustion the partial (still valid) ensemble is returned.
    """
    if M < 2 or not (1.5 < alpha < 2.0):
        raise ValueError("require M >= 2 and 3/2 < alpha < 2")
    accepted: list[ChargeDensity] = []
    dvals: list[int] = []
    attempts = max_attempts if max_attempts is not None else 200 * size_budget
    sites = domain.sites
    for _ in range(attempts):
        if len(accepted) >= size_budget:
            break
        base = _random_cluster(rng)
        anchor = sites[int(rng.integers(0, len(sites)))]
        cand = base.translate(int(anchor[0]), int(anchor[1]))
        if any(domain.index_of(*s) < 0 for s in cand.support):
            continue
        d_new = d_lambda(domain, cand)
        ok = True
        for old, d_old in zip(accepted, dvals):
            if support_distance(cand, old) < M * min(d_new, d_old) ** alpha:
                ok = False
                break
        if ok:
            accepted.append(cand)
            dvals.append(d_new)
    return Ensemble(accepted, M=M, alpha=alpha)
