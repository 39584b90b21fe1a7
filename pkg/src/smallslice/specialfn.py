"""Gamma-family special functions and the sphere-average integral.

Everything here is a pure function of its arguments. The central quantity is
``expectation_integral``, the exact average of exp(-beta * d^2) where d is the
distance from a scaled uniform sphere point to a fixed codimension-k subspace:

    E = (kappa_k * kappa_{n-k} / kappa_n)
        * int_0^{pi/2} exp(-beta n^2 cos^2 a) cos^{k-1}(a) sin^{n-k-1}(a) da

with kappa_m = 2 pi^{m/2} / Gamma(m/2) the surface measure of S^{m-1}.
The integrand is smooth in the angle variable for every k in [1, n-1], so the
integral is evaluated there; the equivalent t = cos(a) form has an endpoint
singularity when n - k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Lanczos approximation, g = 7, 9 coefficients (Godfrey's table, the same set
# used by Boost and the GNU Scientific Library). Relative error below 1e-13
# over the positive reals in double precision.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for real x > 0.

    Relative error is below 1e-12 on [0.5, 200] (checked in the test suite
    against an independent implementation).
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"log_gamma requires finite x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument away from the pole
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)


def sphere_surface(m: int) -> float:
    """Surface measure kappa_m of the unit sphere S^{m-1} in R^m.

    kappa_1 = 2 (counting measure on the two-point sphere), kappa_2 = 2 pi,
    kappa_3 = 4 pi, and in general 2 pi^{m/2} / Gamma(m/2).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"sphere_surface requires an integer m >= 1, got {m!r}")
    m = int(m)
    return 2.0 * math.exp(0.5 * m * math.log(math.pi) - log_gamma(0.5 * m))


def gamma_inequality_margin(lam: float, mu: float) -> float:
    """Log-scale slack of the inequality lam^mu * Gamma(lam - mu) >= Gamma(lam).

    Returns mu*ln(lam) + lnGamma(lam - mu) - lnGamma(lam), which is >= 0 for
    all 0 <= mu < lam (equality at mu = 0).
    """
    lam = float(lam)
    mu = float(mu)
    if not (math.isfinite(lam) and math.isfinite(mu)):
        raise ValueError("gamma_inequality_margin requires finite arguments")
    if mu < 0.0 or mu >= lam:
        raise ValueError(f"need 0 <= mu < lam, got lam={lam}, mu={mu}")
    return mu * math.log(lam) + log_gamma(lam - mu) - log_gamma(lam)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on the canonical interval [0, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if self.order < 1 or nodes.shape != (self.order,) or weights.shape != (self.order,):
            raise ValueError("rule arrays must both have length equal to the order")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("nodes must be strictly increasing")
        if nodes[0] <= 0.0 or nodes[-1] >= 1.0:
            raise ValueError("nodes must lie strictly inside (0, 1)")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to the interval length 1")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def map_to(self, a: float, b: float):
        """Nodes and weights transported to the interval [a, b]."""
        h = b - a
        return a + h * self.nodes, h * self.weights


def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule of the given order on [0, 1]."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    x, w = np.polynomial.legendre.leggauss(int(order))
    return QuadratureRule(nodes=0.5 * (x + 1.0), weights=0.5 * w, order=int(order))


_DEFAULT_RULE = gauss_legendre(24)


def integrate_adaptive(f, a: float, b: float, abs_tol: float = 1e-13,
                       rule: QuadratureRule | None = None, max_depth: int = 40) -> float:
    """Adaptive panel-bisection quadrature of a vectorized integrand on [a, b].

    A panel is accepted when its one-shot value and its two-half value agree
    to abs_tol (scaled by panel count); otherwise it is bisected.
    """
    rule = rule or _DEFAULT_RULE

    def panel(lo, hi):
        x, w = rule.map_to(lo, hi)
        return float(np.dot(w, f(x)))

    total = 0.0
    stack = [(float(a), float(b), panel(a, b), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        if abs(left + right - whole) < abs_tol or depth >= max_depth:
            total += left + right
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def expectation_integral(n: int, k: int, beta: float) -> float:
    """Exact sphere average of exp(-beta * d(F, n*theta)^2).

    Here theta is uniform on S^{n-1} and F is any fixed subspace of
    codimension k, 1 <= k <= n-1 (the value does not depend on F). For
    beta = 1 the average is bounded by n^{-k/2} with no leading constant;
    that bound is part of this function's tested contract. The k = n case is
    outside the angular decomposition used here and is rejected.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if int(k) != k or k < 1 or k > n - 1:
        raise ValueError(f"k must be an integer in [1, n-1], got k={k!r} for n={n}")
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    n = int(n)
    k = int(k)
    m = n - k

    log_ratio = (
        math.log(sphere_surface(k)) + math.log(sphere_surface(m)) - math.log(sphere_surface(n))
    )
    scale = beta * float(n) * float(n)

    def integrand(alpha):
        c = np.cos(alpha)
        s = np.sin(alpha)
        out = np.exp(-scale * c * c)
        if k > 1:
            out = out * c ** (k - 1)
        if m > 1:
            out = out * s ** (m - 1)
        return out

    value = integrate_adaptive(integrand, 0.0, 0.5 * math.pi, abs_tol=1e-13)
    return math.exp(log_ratio) * value
