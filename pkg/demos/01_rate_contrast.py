"""Uniform weights versus the theta0 direction: how fast does the distance shrink?

For Rademacher summands the uniform direction puts an atom of mass about
(pi n / 2)^(-1/2) at 0, so the Kolmogorov distance decays like n^(-1/2).
The direction (1, sqrt2, -1, -sqrt2, ...) spreads the atoms out and the
distance falls roughly like 1/n.
"""

import math

from belab import arithmetic, kolmogorov, laws
from belab.harness import fit_rate

rad = laws.rademacher()
ns = (8, 12, 16, 20, 24)

print(f"{'n':>4} {'uniform':>10} {'theta0':>10} {'BE bound':>10}")
uni, zero = [], []
for n in ns:
    d_uni = kolmogorov.exact_distance(arithmetic.uniform_theta(n), rad).value
    d_zero = kolmogorov.exact_distance(arithmetic.theta_zero(n), rad).value
    be = kolmogorov.classical_be_bound(laws.moments(rad), n)
    uni.append((n, d_uni))
    zero.append((n, d_zero))
    print(f"{n:>4} {d_uni:10.5f} {d_zero:10.5f} {be:10.5f}")

print(f"\nslope, uniform: {fit_rate(uni).slope:.3f}")
print(f"slope, theta0:  {fit_rate(zero).slope:.3f}")

# The uniform distance is half the central binomial atom.
n = 24
print(f"\nn={n}: half central atom {0.5 * math.comb(n, n // 2) / 2**n:.6f}, "
      f"asymptotic {0.5 * (math.pi * n / 2) ** -0.5:.6f}")
