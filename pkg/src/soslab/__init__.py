"""Desk-scale numerics for integer-valued lattice interface models.

Subpackages cover the full pipeline: Dirichlet Green solves (:mod:`lattice`),
analytic weight extensions (:mod:`potential`), charge-density combinatorics
(:mod:`charges`), spin waves and energies (:mod:`spinwave`), renormalized
activities and Taylor-remainder certification (:mod:`renorm`), trigonometric
approximation and contour-shift checks (:mod:`limits`), and heat-bath Monte
Carlo for the height field (:mod:`sampler`).
"""

from . import lattice, potential, charges, spinwave, renorm, limits, sampler

__all__ = ["lattice", "potential", "charges", "spinwave", "renorm", "limits", "sampler"]
__version__ = "0.1.0"
