"""Trigonometric approximation of integer constraints and contour-shift checks.

Truncated combs: lambda^{<=N}(x) = sum_{q=-N}^{N} e^{2 pi i q x}, represented
as normalized even trigonometric polynomials.  Two frequency conventions are
exposed (the constraint literature writes cos(q x), the comb limit needs
cos(2 pi q x)); every caller states which one it uses.

Integrals against rapidly decaying functions converge to the integer sum
sum_n f(n) as N grows; :func:`comb_convergence` tabulates the error on a
doubling schedule using a composite Gauss-Legendre panel rule with panels
sized to the oscillation wavelength.  :func:`complex_translation_check`
verifies the contour-shift identity int F(x) dx = int F(x + i a) dx for
products of strip-extension edge factors with Gaussian vertex damping on a
path of up to three vertices (tensor quadrature by matrix contraction).
:func:`regularized_weight_bridge` tracks the Gaussian-regularized weight sums
as the regularizer is removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import Extension, PotentialSpec, log_weight_real


@dataclass(frozen=True)
class TrigPoly:
    """Real, even, normalized trig polynomial: 1 + 2 sum_q c_q cos(q omega x)
    with |c_q| <= 1 (omega fixed by the evaluation convention)."""

    coeffs: np.ndarray  # c_q for q = 1..N

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if np.any(np.abs(c) > 1.0 + 1e-15):
            raise ValueError("coefficients must satisfy |c_q| <= 1")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def truncated_comb(cls, N: int) -> "TrigPoly":
        return cls(np.ones(N))

    @property
    def degree(self) -> int:
        return len(self.coeffs)


def eval_trig(poly: TrigPoly, x, convention: str = "unit_period"):
    """Evaluate 1 + 2 sum c_q cos(q omega x): omega = 2 pi for the
    "unit_period" convention (comb truncations), omega = 1 for "angular"."""
    if convention == "unit_period":
        omega = 2.0 * math.pi
    elif convention == "angular":
        omega = 1.0
    else:
        raise ValueError(f"unknown convention {convention!r}")
    x = np.asarray(x)
    q = np.arange(1, poly.degree + 1)
    out = 1.0 + 2.0 * np.sum(poly.coeffs[:, None] * np.cos(omega * q[:, None]
                                                           * x.ravel()[None, :]), axis=0)
    return out.reshape(x.shape) if x.shape else out[0]


def dirichlet_kernel(N: int, x):
    """Closed form sin((2N+1) pi x) / sin(pi x) for the unit-period comb
    truncation at non-integer x (independent oracle)."""
    x = np.asarray(x, dtype=float)
    return np.sin((2 * N + 1) * math.pi * x) / np.sin(math.pi * x)


_GL_CACHE: dict = {}


def _gl_nodes(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def panel_integrate(f, a: float, b: float, panel: float, order: int = 16) -> float:
    """Composite Gauss-Legendre quadrature with fixed panel width (the step
    that halving-consistency checks refine)."""
    n_panels = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, n_panels + 1)
    xg, wg = _gl_nodes(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * xg[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half[:, None] * wg[None, :] * vals))


def integer_sum(f, n_max: int = 30) -> float:
    """sum_{|n| <= n_max} f(n) (direct summation oracle)."""
    n = np.arange(-n_max, n_max + 1, dtype=float)
    return float(np.sum(f(n)))


def comb_convergence(f, N_list, R: float = 8.0, panel_scale: float = 1.0,
                     order: int = 16, n_max: int = 30) -> list[dict]:
    """|integral of f * comb-truncation - integer sum| per truncation order.

    Panels are sized to a fixed fraction of the fastest oscillation
    wavelength 1/N; ``panel_scale`` < 1 refines the step (self-consistency).
    The decay of f must make both the [-R, R] truncation and the integer-sum
    window negligible; callers certify that for their integrand.
    """
    target = integer_sum(f, n_max)
    rows = []
    for N in N_list:
        poly = TrigPoly.truncated_comb(N)
        panel = panel_scale * min(0.5, 1.0 / N)
        val = panel_integrate(lambda x: f(x) * eval_trig(poly, x), -R, R,
                              panel=panel, order=order)
        rows.append({"N": int(N), "integral": val, "target": target,
                     "error": abs(val - target)})
    return rows


class DecayError(ValueError):
    """The integrand fails the uniform-decay hypothesis at the chosen box."""


def _path_integrand_factors(extension: Extension, n: int, a, L: float,
                            panel: float, order: int, shift: bool):
    """Node values of vertex and edge factors for the path-graph integrand
    F(x) = prod_j exp(-(x_j + i a_j)^2) prod_j ext(x_j - x_{j+1} + i(a_j - a_{j+1}))."""
    n_panels = max(1, int(math.ceil(2 * L / panel)))
    edges = np.linspace(-L, L, n_panels + 1)
    xg, wg = _gl_nodes(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    a = np.asarray(a, dtype=float)
    verts = []
    for j in range(n):
        zj = t + (1j * a[j] if shift else 0.0)
        verts.append(np.exp(-zj ** 2))
    if n == 1:
        # single vertex: a dangling weight factor against exterior value 0
        z0 = t + (1j * a[0] if shift else 0.0)
        verts[0] = verts[0] * extension.eval(z0.astype(complex))
    mats = []
    for j in range(n - 1):
        da = (a[j] - a[j + 1]) if shift else 0.0
        diff = t[:, None] - t[None, :] + 1j * da
        mats.append(extension.eval(diff.ravel()).reshape(diff.shape))
    return t, w, verts, mats


def complex_translation_check(extension: Extension, a, L: float = 8.0,
                              panel: float = 1.0, order: int = 20,
                              decay_tol: float = 1e-12) -> dict:
    """Contour-shift identity for a path-graph product integrand.

    ``a`` is the vector of imaginary shifts (length n <= 3); pairwise
    differences must stay inside the extension strip.  Returns both integrals
    and their difference.  Rejects when the integrand fails to decay below
    ``decay_tol`` (relative) at the integration box faces.
    """
    a = np.asarray(a, dtype=float)
    n = len(a)
    if not 1 <= n <= 3:
        raise ValueError("path length must be 1..3")
    if n == 1 and abs(a[0]) >= extension.eps_beta:
        raise ValueError("shift leaves the strip")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(a[i] - a[j]) >= extension.eps_beta:
                raise ValueError("pairwise shift leaves the strip")
    if np.any(np.abs(a) ** 2 >= L * 0.5):
        raise DecayError("Gaussian damping too weak for the box: enlarge L")

    out = {}
    for label, shift in (("lhs", False), ("rhs", True)):
        t, w, verts, mats = _path_integrand_factors(extension, n, a, L, panel,
                                                    order, shift)
        # boundary decay check on the box faces
        face = np.argmax(np.abs(t))
        scale = max(np.max(np.abs(v)) for v in verts)
        for j in range(n):
            fv = np.abs(verts[j][face])
            if fv > decay_tol * max(scale, 1.0):
                raise DecayError(f"vertex factor {j} not decayed at |x| = L")
        acc = w * verts[0]
        for j, E in enumerate(mats):
            acc = (acc @ E) * (w * verts[j + 1])
        out[label] = complex(np.sum(acc))
    out["diff"] = abs(out["lhs"] - out["rhs"])
    return out


def _bridge_sum(spec: PotentialSpec, eps: float, observable, zeta, xi,
                window: int):
    """(value, relative boundary-shell contribution) for one regularizer."""
    espec = PotentialSpec(spec.family, spec.p, spec.beta, gauss_reg=eps)
    heights = np.arange(-window, window + 1, dtype=float)
    if len(observable) == 1:
        phi = heights + zeta[0]
        terms = np.exp(4.0 * log_weight_real(espec, phi - xi)) * phi ** observable[0]
        val = float(np.sum(terms))
        shell = abs(terms[0]) + abs(terms[-1])
        return val, shell / max(abs(val), 1e-300)
    p1 = heights + zeta[1]
    lw1 = 3.0 * log_weight_real(espec, p1 - xi)
    val = 0.0
    shell = 0.0
    for lo in range(0, len(heights), 512):
        hi = min(lo + 512, len(heights))
        p0 = (heights[lo:hi] + zeta[0])[:, None]
        terms = (np.exp(3.0 * log_weight_real(espec, p0 - xi) + lw1[None, :]
                        + log_weight_real(espec, p0 - p1[None, :]))
                 * p0 ** observable[0] * p1[None, :] ** observable[1])
        val += float(np.sum(terms))
        shell += float(np.sum(np.abs(terms[:, 0])) + np.sum(np.abs(terms[:, -1])))
        if lo == 0:
            shell += float(np.sum(np.abs(terms[0, :])))
        if hi == len(heights):
            shell += float(np.sum(np.abs(terms[-1, :])))
    return val, shell / max(abs(val), 1e-300)


def regularized_weight_bridge(spec: PotentialSpec, epsilon_list,
                              observable=(0,), zeta=None, xi=0.0,
                              height_window: int = 64, shell_tol: float = 1e-12,
                              max_window: int = 8192) -> list[dict]:
    """Exact weight sums sum_phi I^{eps,xi}(phi) phi^a on 1- or 2-site chains
    as the Gaussian regularizer eps decreases (Cauchy behaviour expected).

    Each site couples to ``xi`` through its missing neighbours (4 - degree
    boundary edges) and adjacent sites to each other; heights run over
    zeta_i + [-window, window] with the window doubled until the boundary
    shell contributes less than ``shell_tol`` relatively.
    """
    n_sites = len(observable)
    if n_sites not in (1, 2):
        raise ValueError("bridge domains are 1 or 2 sites")
    zeta = np.zeros(n_sites) if zeta is None else np.asarray(zeta, dtype=float)
    rows = []
    for eps in epsilon_list:
        window = height_window
        while True:
            val, rel_shell = _bridge_sum(spec, eps, observable, zeta, xi, window)
            if rel_shell <= shell_tol or window >= max_window:
                break
            window *= 2
        if rel_shell > shell_tol:
            raise ValueError(f"height window cap reached (shell {rel_shell:.2e})")
        rows.append({"eps": float(eps), "value": val, "window": window,
                     "shell": rel_shell})
    for i in range(1, len(rows)):
        rows[i]["delta"] = abs(rows[i]["value"] - rows[i - 1]["value"])
    return rows
