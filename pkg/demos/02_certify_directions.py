"""Certify or refute the lattice-avoidance condition for a few directions.

A direction passes when the line xi * theta stays at least
0.1 min(|xi|, (n/R)/|xi|) away from Z^n for |xi| <= n. The grid check is
made rigorous by a Lipschitz margin; a failing grid point is a genuine
counterexample.
"""

from belab import arithmetic

for n in (8, 16, 32, 64):
    theta = arithmetic.theta_zero(n)
    upper, lower = arithmetic.minimal_certified_R(theta)
    cert = arithmetic.certify_condition_iii(theta, upper)
    print(f"theta0 n={n:>2}: smallest certified R = {upper:.4f}  ({cert.outcome.value}, "
          f"margin {cert.margin:.2e})")

for n in (4, 16, 64):
    cert = arithmetic.certify_condition_iii(arithmetic.uniform_theta(n), 1e6)
    print(f"uniform n={n:>2}: {cert.outcome.value} at xi = {cert.counterexample_xi}")

c = arithmetic.sqrt2_diophantine_check(1000.0)
print(f"\nmin of xi^2 (d(xi)^2 + d(sqrt2 xi)^2) on [1/2, 1000]: {c:.5f}")
