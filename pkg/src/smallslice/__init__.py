"""smallslice: extremal convex body / density pairs with small sections.

The library builds, at desk scale, an origin-symmetric convex polytope K
paired with an even Gaussian-mixture probability density f such that every
codimension-k planar section of f through the origin carries small mass,
and it certifies each supporting inequality numerically along the way.
Submodules:

  specialfn     gamma-family special functions and 1-d quadrature
  geometry      subspaces, Grassmannian metrics, sphere sampling, delta-nets
  density       Gaussian mixtures, exact section integrals, mass estimates
  polytope      V-polytopes, LP membership, hit-or-miss volume
  construction  the end-to-end pipeline and its report
  cli           command line front end
"""

__version__ = "0.1.0"

from .errors import (
    MassContractError,
    MembershipSolverError,
    NetConstructionError,
    PointSearchError,
    UndersampledError,
)

__all__ = [
    "__version__",
    "MassContractError",
    "MembershipSolverError",
    "NetConstructionError",
    "PointSearchError",
    "UndersampledError",
]
