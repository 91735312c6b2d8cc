"""The arithmetic tail integral along theta0 at the natural cutoff T = n / (R delta^4).

The upper bound for this integral decays like 1/T, but at these n the
lower end T^(1/6) is still small and its contribution dominates, so the
product T * integral keeps growing slowly.
"""

from belab import arithmetic, laws

Y = laws.symmetrize(laws.rademacher())
for n in (8, 16, 32, 64, 128):
    theta = arithmetic.theta_zero(n)
    R, _ = arithmetic.minimal_certified_R(theta)
    T = n / R
    value = arithmetic.tail_integral_check(theta, Y, T)
    print(f"n={n:>3}  T={T:7.2f}  integral={value:.5f}  T*integral={T * value:.3f}")
