"""Origin-symmetric V-polytopes: LP membership and hit-or-miss volume.

Membership x in conv(v_1..v_m) is decided as a nonnegative least squares
feasibility problem over the convex-combination coefficients,

    min_{lam >= 0} || [V^T; 1^T] lam - [x; 1] ||_2,

solved by a self-contained Lawson-Hanson active-set iteration (fixed,
deterministic pivoting). The residual threshold is 1e-8 on the row-normalized
system, and points within the threshold of the boundary count as inside.
An H-representation is never formed: vertex counts stay desk-scale while
facet counts of the constructed bodies would explode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from . import specialfn
from .errors import MembershipSolverError, UndersampledError
from .geometry import sample_sphere_batch

MEMBERSHIP_TOL = 1e-8


@njit(cache=True)
def _nnls_feasibility(A, b, dual_tol, stop_resid, max_iter):  # pragma: no cover
    """Lawson-Hanson NNLS on min ||A x - b||, x >= 0.

    Returns (resid_norm, status); status 0 = optimal, 1 = early stop at
    stop_resid (residual can only shrink further), 2 = iteration cap hit.
    Entering-variable selection scans indices in order, so the path is
    deterministic for identical inputs.
    """
    r_dim, m = A.shape
    x = np.zeros(m)
    in_set = np.zeros(m, np.bool_)
    resid = b.copy()
    resid_norm = math.sqrt(np.dot(resid, resid))
    if resid_norm <= stop_resid:
        return resid_norm, 1
    for _ in range(max_iter):
        w = A.T @ resid
        jbest = -1
        wbest = dual_tol
        for j in range(m):
            if (not in_set[j]) and w[j] > wbest:
                wbest = w[j]
                jbest = j
        if jbest < 0:
            return resid_norm, 0
        in_set[jbest] = True
        while True:
            idx = np.where(in_set)[0]
            p = idx.size
            Aact = np.empty((r_dim, p))
            for t in range(p):
                Aact[:, t] = A[:, idx[t]]
            gram = Aact.T @ Aact
            for t in range(p):
                gram[t, t] += 1e-13
            z = np.linalg.solve(gram, Aact.T @ b)
            all_pos = True
            for t in range(p):
                if z[t] <= 0.0:
                    all_pos = False
                    break
            if all_pos:
                x[:] = 0.0
                for t in range(p):
                    x[idx[t]] = z[t]
                break
            alpha = np.inf
            for t in range(p):
                if z[t] <= 0.0:
                    denom = x[idx[t]] - z[t]
                    if denom > 0.0 and x[idx[t]] / denom < alpha:
                        alpha = x[idx[t]] / denom
            if not np.isfinite(alpha):
                # degenerate entering step: drop the variable and move on
                in_set[jbest] = False
                break
            for t in range(p):
                j = idx[t]
                x[j] = x[j] + alpha * (z[t] - x[j])
                if x[j] <= 1e-13:
                    x[j] = 0.0
                    in_set[j] = False
        resid = b - A @ x
        resid_norm = math.sqrt(np.dot(resid, resid))
        if resid_norm <= stop_resid:
            return resid_norm, 1
    return resid_norm, 2


@dataclass
class VolumeEstimate:
    estimate: float
    std_error: float
    trials: int
    hits: int

    def to_dict(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "std_error": float(self.std_error),
            "trials": self.trials,
            "hits": self.hits,
        }


@dataclass(eq=False)
class VPolytope:
    """Convex hull of an origin-symmetric vertex list in R^n.

    The vertex set must be closed under negation and contain at least 2n
    points. circumradius defaults to the largest vertex norm; treat
    instances as immutable.
    """

    vertices: np.ndarray
    circumradius: float = 0.0

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2:
            raise ValueError("vertices must be a 2-d array (m, n)")
        m, n = verts.shape
        if m < 2 * n:
            raise ValueError(f"need at least 2n = {2 * n} vertices, got {m}")
        order = np.lexsort(verts.T[::-1])
        neg_order = np.lexsort((-verts).T[::-1])
        if not np.array_equal(verts[order], -verts[neg_order]):
            raise ValueError("vertex set must be closed under negation")
        max_norm = float(np.linalg.norm(verts, axis=1).max())
        if self.circumradius == 0.0:
            self.circumradius = max_norm
        elif self.circumradius < max_norm - 1e-12:
            raise ValueError(
                f"circumradius {self.circumradius} is below the largest "
                f"vertex norm {max_norm}"
            )
        verts.flags.writeable = False
        self.vertices = verts

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @cached_property
    def _feasibility_matrix(self) -> np.ndarray:
        # rows scaled by the circumradius so residuals are dimensionless
        a = np.vstack([self.vertices.T / self.circumradius,
                       np.ones(self.n_vertices)])
        return np.ascontiguousarray(a)

    def scaled(self, factor: float) -> "VPolytope":
        return VPolytope(vertices=self.vertices * float(factor),
                         circumradius=self.circumradius * float(factor))

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "circumradius": float(self.circumradius),
            "vertices": [float(v) for v in self.vertices.ravel()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VPolytope":
        verts = np.array(d["vertices"], dtype=float).reshape(-1, int(d["ambient_dim"]))
        return cls(vertices=verts, circumradius=float(d["circumradius"]))


def contains(polytope: VPolytope, x: np.ndarray, scale: float = 1.0) -> bool:
    """Whether x lies in scale * P, by convex-combination feasibility."""
    x = np.asarray(x, dtype=float)
    if x.shape != (polytope.ambient_dim,):
        raise ValueError(f"x has shape {x.shape}, expected ({polytope.ambient_dim},)")
    if not (scale > 0.0):
        raise ValueError(f"scale must be positive, got {scale}")
    a = polytope._feasibility_matrix
    b = np.empty(polytope.ambient_dim + 1)
    b[:-1] = x / (scale * polytope.circumradius)
    b[-1] = 1.0
    resid, status = _nnls_feasibility(
        a, b, 1e-11, MEMBERSHIP_TOL, 60 * (polytope.ambient_dim + 2)
    )
    if status == 2:
        raise MembershipSolverError(
            f"feasibility solver hit the iteration cap (residual {resid:.3e})"
        )
    return bool(resid <= MEMBERSHIP_TOL)


def contains_batch(polytope: VPolytope, points: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Vectorized membership for rows of points (each decided independently)."""
    points = np.asarray(points, dtype=float)
    out = np.empty(points.shape[0], dtype=bool)
    a = polytope._feasibility_matrix
    r = scale * polytope.circumradius
    b = np.empty(polytope.ambient_dim + 1)
    b[-1] = 1.0
    cap = 60 * (polytope.ambient_dim + 2)
    for i in range(points.shape[0]):
        b[:-1] = points[i] / r
        resid, status = _nnls_feasibility(a, b, 1e-11, MEMBERSHIP_TOL, cap)
        if status == 2:
            raise MembershipSolverError(
                f"feasibility solver hit the iteration cap (residual {resid:.3e})"
            )
        out[i] = resid <= MEMBERSHIP_TOL
    return out


def contains_ball_check(polytope: VPolytope, r: float, probes: int,
                        rng: np.random.Generator) -> bool:
    """One-sided probe that r * B_n is inside P: false on the first miss."""
    if r < 0.0:
        raise ValueError("radius must be nonnegative")
    if r == 0.0:
        return True
    for _ in range(int(probes)):
        theta = sample_sphere_batch(polytope.ambient_dim, 1, rng)[0]
        if not contains(polytope, r * theta):
            return False
    return True


def _ball_volume(n: int, radius: float) -> float:
    return math.exp(
        math.log(specialfn.sphere_surface(n)) - math.log(n) + n * math.log(radius)
    )


def volume_estimate(polytope: VPolytope, rng: np.random.Generator, trials: int,
                    pilot: int = 2048, min_hit_rate: float = 1e-4) -> VolumeEstimate:
    """Hit-or-miss volume over the circumscribed ball.

    A pilot run guards against silent undersampling: if the pilot hit rate
    falls below min_hit_rate the run aborts with an explicit error instead
    of returning a meaningless estimate.
    """
    if trials < 10_000:
        raise ValueError(f"trials must be at least 10^4, got {trials}")
    n = polytope.ambient_dim
    radius = polytope.circumradius
    ball_vol = _ball_volume(n, radius)

    def sample_points(count):
        theta = sample_sphere_batch(n, count, rng)
        radii = radius * rng.random(count) ** (1.0 / n)
        return theta * radii[:, None]

    pilot_hits = int(np.count_nonzero(contains_batch(polytope, sample_points(pilot))))
    if pilot_hits < min_hit_rate * pilot:
        raise UndersampledError(
            f"pilot hit rate {pilot_hits}/{pilot} is below {min_hit_rate}; "
            f"hit-or-miss is hopeless here, reduce the dimension"
        )

    hits = 0
    remaining = int(trials)
    chunk = 65_536
    while remaining > 0:
        count = min(chunk, remaining)
        hits += int(np.count_nonzero(contains_batch(polytope, sample_points(count))))
        remaining -= count
    rate = hits / trials
    std_error = ball_vol * math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)
    return VolumeEstimate(estimate=ball_vol * rate, std_error=std_error,
                          trials=int(trials), hits=hits)


def gluskin_ratio(n: int, m: int, vol_estimate: float) -> float:
    """vol^{1/n} / sqrt(log(m/n)) for an m-vertex polytope in R^n.

    For hulls of points on a sphere of radius n this ratio stays bounded by
    a single constant as (n, m) vary, which is what the sweep checks.
    """
    if not (m > n >= 2):
        raise ValueError(f"need m > n >= 2, got n={n}, m={m}")
    if not (vol_estimate > 0.0):
        raise ValueError(f"volume estimate must be positive, got {vol_estimate}")
    return vol_estimate ** (1.0 / n) / math.sqrt(math.log(m / n))


def cross_polytope(n: int, scale: float = 1.0) -> VPolytope:
    """conv(+-scale*e_1, ..., +-scale*e_n), the standard test body."""
    eye = np.eye(n) * float(scale)
    return VPolytope(vertices=np.vstack([eye, -eye]))


def hypercube(n: int, half_width: float = 1.0) -> VPolytope:
    """conv({+-half_width}^n); vertex count 2^n, so keep n small."""
    corners = np.array(
        [[half_width * (1.0 if (i >> j) & 1 else -1.0) for j in range(n)]
         for i in range(1 << n)]
    )
    return VPolytope(vertices=corners)
