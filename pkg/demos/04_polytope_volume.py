"""Hit-or-miss volume of V-polytopes, with exact bodies as calibration.

Membership is an exact nonnegative-least-squares feasibility test over the
convex-combination coefficients, so no facet enumeration is ever needed.
The estimator is honest about its limits: when the hit rate over the
circumscribed ball collapses, it raises instead of guessing.
"""

import math

import numpy as np

from smallslice.errors import UndersampledError
from smallslice.polytope import cross_polytope, gluskin_ratio, hypercube, volume_estimate, VPolytope

rng = np.random.default_rng(11)

print("bodies with known volumes:")
for n in (3, 4):
    est = volume_estimate(cross_polytope(n), rng, 200_000)
    true = 2.0 ** n / math.factorial(n)
    print(f"  cross-polytope R^{n}: {est.estimate:.4f} +- {est.std_error:.4f}"
          f"  (true {true:.4f})")
    est = volume_estimate(hypercube(n), rng, 200_000)
    print(f"  cube  [-1,1]^{n}:    {est.estimate:.3f} +- {est.std_error:.3f}"
          f"  (true {2.0 ** n:.0f})")

print("\nnormalized volume of hulls of m = 4n sphere points at radius n:")
print("(the root-volume over sqrt(log(m/n)) stays in a narrow band)")
for n in (4, 5, 6, 7, 8):
    m = 4 * n
    half = rng.standard_normal((m // 2, n))
    half *= n / np.linalg.norm(half, axis=1, keepdims=True)
    body = VPolytope(vertices=np.concatenate([half, -half]), circumradius=float(n))
    est = volume_estimate(body, rng, 150_000)
    print(f"  n={n}: vol^(1/n)={est.estimate ** (1 / n):.3f} "
          f"ratio={gluskin_ratio(n, m, est.estimate):.3f}")

print("\nthe undersampling guard in action (a thin needle in R^6):")
eye = np.eye(6) * 1e-3
eye[0, 0] = 10.0
needle = VPolytope(vertices=np.concatenate([eye, -eye]))
try:
    volume_estimate(needle, rng, 20_000)
except UndersampledError as exc:
    print(f"  UndersampledError: {exc}")
