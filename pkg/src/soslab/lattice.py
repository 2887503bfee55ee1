"""Finite sub-lattices of Z^2, the Dirichlet Laplacian, and Green solves.

A :class:`Domain` is a finite set of integer sites with the nearest-neighbour
(l1) adjacency inherited from Z^2.  The Dirichlet Laplacian acts on functions
supported on the domain, with zero values outside:

    (L f)(i) = 4 f_i - sum_{j ~ i, j in domain} f_j

which is symmetric positive definite, so ``L^{-1} f`` is well defined and the
quadratic form ``f . L^{-1} f`` equals the squared gradient norm of the
solution (boundary edges counted with exterior value 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.ndimage import distance_transform_cdt

# neighbour offsets, fixed order: +x, -x, +y, -y
_OFFSETS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)


class SolveError(RuntimeError):
    """Conjugate-gradient failure; carries the final residual."""


class Domain:
    """A finite subset of Z^2 with adjacency and boundary bookkeeping.

    Sites are stored in construction order; a bounding-box index grid gives
    O(1) membership tests, so non-rectangular simply connected regions are
    supported.  Coordinates are 64-bit signed integers.  Instances are
    immutable after construction and safe to share across threads.
    """

    def __init__(self, sites: Iterable[tuple[int, int]] | np.ndarray):
        pts = np.asarray(list(sites) if not isinstance(sites, np.ndarray) else sites,
                         dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ValueError("sites must be a nonempty list of integer pairs")
        self.sites = pts
        self.n = len(pts)
        xmin, ymin = pts.min(axis=0)
        xmax, ymax = pts.max(axis=0)
        self._origin = (int(xmin) - 1, int(ymin) - 1)
        shape = (int(xmax - xmin) + 3, int(ymax - ymin) + 3)
        grid = np.full(shape, -1, dtype=np.int32)
        ix = pts[:, 0] - self._origin[0]
        iy = pts[:, 1] - self._origin[1]
        if len(np.unique(ix * shape[1] + iy)) != self.n:
            raise ValueError("duplicate site")
        grid[ix, iy] = np.arange(self.n, dtype=np.int32)
        self._grid = grid
        # nbrs[s, d] = index of neighbour in direction d, or -1 if exterior
        nx = pts[:, None, 0] + _OFFSETS[None, :, 0] - self._origin[0]
        ny = pts[:, None, 1] + _OFFSETS[None, :, 1] - self._origin[1]
        inside = (nx >= 0) & (nx < shape[0]) & (ny >= 0) & (ny < shape[1])
        nbrs = np.full((self.n, 4), -1, dtype=np.int32)
        nbrs[inside] = grid[nx[inside], ny[inside]]
        self.nbrs = nbrs
        self._dist_c: np.ndarray | None = None
        self._lap: sp.csr_matrix | None = None

    @classmethod
    def box(cls, N: int) -> "Domain":
        """The box {-N..N}^2, (2N+1)^2 sites."""
        r = np.arange(-N, N + 1, dtype=np.int64)
        xx, yy = np.meshgrid(r, r, indexing="ij")
        return cls(np.column_stack([xx.ravel(), yy.ravel()]))

    def index_of(self, x: int, y: int) -> int:
        """Index of site (x, y), or -1 if outside the domain."""
        gx = x - self._origin[0]
        gy = y - self._origin[1]
        if 0 <= gx < self._grid.shape[0] and 0 <= gy < self._grid.shape[1]:
            return int(self._grid[gx, gy])
        return -1

    def __contains__(self, site) -> bool:
        return self.index_of(int(site[0]), int(site[1])) >= 0

    def contains_mask(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized membership test for broadcastable coordinate arrays."""
        gx = np.asarray(xs) - self._origin[0]
        gy = np.asarray(ys) - self._origin[1]
        inside = ((gx >= 0) & (gx < self._grid.shape[0])
                  & (gy >= 0) & (gy < self._grid.shape[1]))
        gxc = np.clip(gx, 0, self._grid.shape[0] - 1)
        gyc = np.clip(gy, 0, self._grid.shape[1] - 1)
        return inside & (self._grid[gxc, gyc] >= 0)

    def __len__(self) -> int:
        return self.n

    @property
    def boundary_edges(self) -> list[tuple[int, tuple[int, int]]]:
        """(interior site index, exterior coordinate) per boundary edge."""
        out = []
        for s in range(self.n):
            for d in range(4):
                if self.nbrs[s, d] < 0:
                    ext = self.sites[s] + _OFFSETS[d]
                    out.append((s, (int(ext[0]), int(ext[1]))))
        return out

    def dist_to_complement(self) -> np.ndarray:
        """l1 (graph) distance from each site to the nearest exterior site."""
        if self._dist_c is None:
            mask = (self._grid >= 0).astype(np.uint8)
            dt = distance_transform_cdt(mask, metric="taxicab")
            ix = self.sites[:, 0] - self._origin[0]
            iy = self.sites[:, 1] - self._origin[1]
            self._dist_c = dt[ix, iy].astype(np.int64)
        return self._dist_c

    def reflect(self) -> "Domain":
        """The reflected domain {-x : x in domain} (site order follows)."""
        return Domain(-self.sites)

    def laplacian_matrix(self) -> sp.csr_matrix:
        """The Dirichlet Laplacian as a sparse CSR matrix."""
        if self._lap is None:
            rows = [np.arange(self.n)]
            cols = [np.arange(self.n)]
            vals = [np.full(self.n, 4.0)]
            for d in range(4):
                m = self.nbrs[:, d] >= 0
                rows.append(np.nonzero(m)[0])
                cols.append(self.nbrs[m, d])
                vals.append(np.full(m.sum(), -1.0))
            self._lap = sp.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.n, self.n))
        return self._lap


@dataclass(frozen=True)
class SiteVector:
    """A real value per site of a domain (implicitly zero outside)."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.domain.n,):
            raise ValueError(f"length {v.shape} does not match |domain| = {self.domain.n}")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, domain: Domain) -> "SiteVector":
        return cls(domain, np.zeros(domain.n))

    @classmethod
    def delta(cls, domain: Domain, site: tuple[int, int]) -> "SiteVector":
        i = domain.index_of(*site)
        if i < 0:
            raise ValueError(f"site {site} not in domain")
        v = np.zeros(domain.n)
        v[i] = 1.0
        return cls(domain, v)

    def dot(self, other: "SiteVector") -> float:
        return float(self.values @ other.values)

    def reflect(self) -> "SiteVector":
        """f^rfl with f^rfl_i = f_{-i}, on the reflected domain."""
        dom = self.domain.reflect()
        # Domain.reflect preserves site order, so values carry over directly.
        return SiteVector(dom, self.values.copy())


def laplacian_apply(domain: Domain, f: SiteVector) -> SiteVector:
    """Apply the Dirichlet Laplacian: (L f)(i) = 4 f_i - sum of interior neighbours."""
    if f.domain is not domain and f.domain.n != domain.n:
        raise ValueError("dimension mismatch between domain and site vector")
    out = 4.0 * f.values
    for d in range(4):
        m = domain.nbrs[:, d] >= 0
        out[m] -= f.values[domain.nbrs[m, d]]
    return SiteVector(domain, out)


def gradient_sq_norm(domain: Domain, f: SiteVector) -> float:
    """sum over edges (f_i - f_j)^2, boundary edges with exterior value 0.

    Each unordered edge counted once; directions +x and +y enumerate interior
    edges exactly once, all four directions enumerate boundary edges.
    """
    v = f.values
    total = 0.0
    for d in (0, 2):  # +x, +y cover each interior edge once
        m = domain.nbrs[:, d] >= 0
        diff = v[m] - v[domain.nbrs[m, d]]
        total += float(diff @ diff)
    for d in range(4):
        m = domain.nbrs[:, d] < 0
        total += float(v[m] @ v[m])
    return total


def solve_green(domain: Domain, f: SiteVector, tol: float = 1e-10) -> SiteVector:
    """Solve L sigma = f by Jacobi-preconditioned CG on the SPD Dirichlet Laplacian.

    Guarantees ||L sigma - f||_2 <= tol * ||f||_2; raises :class:`SolveError`
    with the residual if the iteration cap (20 |domain|) is hit.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if f.domain.n != domain.n:
        raise ValueError("dimension mismatch")
    b = f.values
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return SiteVector.zeros(domain)
    A = domain.laplacian_matrix()
    M = spla.LinearOperator(A.shape, matvec=lambda x: 0.25 * x)
    maxiter = 20 * domain.n
    x, info = spla.cg(A, b, rtol=tol, atol=0.0, maxiter=maxiter, M=M)
    res = np.linalg.norm(A @ x - b)
    if info != 0 or res > tol * nb * (1 + 1e-6):
        raise SolveError(
            f"CG did not reach tol={tol:g} within {maxiter} iterations; "
            f"relative residual {res / nb:.3e}")
    return SiteVector(domain, x)


def quadratic_form(domain: Domain, f: SiteVector, tol: float = 1e-10) -> float:
    """f . L^{-1} f  (nonnegative; the Gaussian benchmark for variance bounds)."""
    sigma = solve_green(domain, f, tol)
    return f.dot(sigma)


def harmonic_extension(domain: Domain, xi: dict[tuple[int, int], float],
                       tol: float = 1e-10) -> SiteVector:
    """Solve L h = (boundary load of xi); h is harmonic in the domain with
    exterior values xi on the adjacent exterior sites."""
    load = np.zeros(domain.n)
    for s, ext in domain.boundary_edges:
        load[s] += xi.get(ext, 0.0)
    return solve_green(domain, SiteVector(domain, load), tol)
