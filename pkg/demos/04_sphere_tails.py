"""Random directions: the Bessel transform and the tails of the deviation statistics."""

import numpy as np

from belab import laws, sphere

grid = np.linspace(-5, 5, 201)
for n in (8, 16, 32, 64):
    gap = np.max(np.abs(sphere.bessel_transform(n, np.sqrt(n) * grid) - np.exp(-grid**2 / 2)))
    c = sphere.bessel_decay_fit(n, np.linspace(n / 40, 10 * n, 400))
    print(f"n={n:>2}: sup |J_n(sqrt(n) x) - exp(-x^2/2)| = {gap:.4f}, fitted c = {c:.4f}")

prof = laws.moments(laws.standardize(laws.bernoulli(0.25)))
tc = sphere.deviation_tail_curves(prof, 32, samples=10**5, seed=0)
print("\nt     P(skew > t)  P(quartic > t)")
for t in (1, 2, 5, 10, 20, 30):
    i = int(np.argmin(np.abs(tc.t - t)))
    print(f"{t:<5} {tc.survival_skew[i]:.5f}      {tc.survival_quartic[i]:.5f}")
for name, fit in (("skew vs t^(2/3)", tc.skew_fit), ("quartic vs t^(1/2)", tc.quartic_fit)):
    print(f"-ln survival, {name}: slope {fit.slope:.3f}, r^2 {fit.r_squared:.4f}, "
          f"{fit.points} points")
