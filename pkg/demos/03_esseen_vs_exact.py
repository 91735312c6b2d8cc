"""How loose is the smoothing-inequality bound compared with the exact distance?"""

import math

from belab import arithmetic, fourier, kolmogorov, laws

law = laws.standardize(laws.bernoulli(0.25))
Ts = (2, 5, 10, 20, 40)
print(f"{'n':>3} {'exact':>9} {'smoothing':>10} {'best T':>7} {'BE':>8} {'eps':>7} {'R1':>7}")
for n in (1, 2, 4, 8, 12):
    theta = arithmetic.theta_zero(n) if n % 4 == 0 else arithmetic.uniform_theta(n)
    exact = kolmogorov.exact_distance(theta, law).value
    bound, T = fourier.esseen_bound_sweep(theta, law, Ts)
    be = kolmogorov.classical_be_bound(laws.moments(law), n)
    rep = fourier.regime_report(theta, law)
    print(f"{n:>3} {exact:9.5f} {bound:10.5f} {T:>7} {be:8.4f} {rep.epsilon:7.4f} {rep.r1:7.4f}")

theta = arithmetic.theta_zero(12)
rep = fourier.regime_report(theta, law)
print("\nregime breakpoints:", ", ".join(f"{b:.3f}" for b in rep.breakpoints))
print("segment integrals: ", ", ".join(f"{s:.2e}" for s in rep.segment_integrals))
print(f"minimal R2 {rep.r2_min:.4f}, reference {rep.r2_reference:.3f}, "
      f"sqrt(n) R2 = {math.sqrt(12) * rep.r2_min:.3f}")
