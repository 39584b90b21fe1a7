"""How small is the averaged Gaussian weight of a scaled sphere point?

For theta uniform on S^{n-1} and any codimension-k subspace F, the average
of exp(-d(F, n*theta)^2) is at most n^(-k/2), with no leading constant.
This script evaluates the exact average by quadrature, confirms the bound
on a grid, and cross-checks one cell against a brute-force Monte Carlo
average.
"""

import math

import numpy as np

from smallslice import specialfn as sf
from smallslice.geometry import sample_grassmannian, sample_sphere_batch

print("exact average vs the n^(-k/2) bound")
print(f"{'n':>3} {'k':>3} {'average':>12} {'bound':>12} {'ratio':>7}")
for n in (2, 4, 8, 16):
    for k in (1, 2, 3):
        if k > n - 1:
            continue
        avg = sf.expectation_integral(n, k, 1.0)
        bound = n ** (-k / 2)
        print(f"{n:>3} {k:>3} {avg:>12.6g} {bound:>12.6g} {avg / bound:>7.3f}")

n, k, draws = 6, 2, 200_000
rng = np.random.default_rng(1)
subspace = sample_grassmannian(n, k, rng)
theta = sample_sphere_batch(n, draws, rng)
d = np.linalg.norm(theta @ subspace.normal_frame.T, axis=1)
vals = np.exp(-((n * d) ** 2))
mc = vals.mean()
se = vals.std(ddof=1) / math.sqrt(draws)

print(f"\nMonte Carlo cross-check at n={n}, k={k} ({draws} draws):")
print(f"  quadrature {sf.expectation_integral(n, k, 1.0):.6f}")
print(f"  sampling   {mc:.6f} +- {se:.6f}")

print("\nthe average is monotone in the exponent scale beta:")
for beta in (0.25, 0.5, 1.0, 2.0):
    print(f"  beta={beta:<5} average={sf.expectation_integral(6, 2, beta):.6f}")
