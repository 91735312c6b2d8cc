"""Randomized checks of inequalities that must hold for every valid input.

Each check draws its inputs from ``stream(seed, k)`` and returns a
:class:`CheckResult`; a failure means a bug (or a false statement), not bad
luck, except for the Monte Carlo checks which carry a 3-sigma allowance.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import arithmetic, fourier, laws, sphere
from .rng import stream


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    passed: bool
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


def random_law(rng, max_atoms=6, nonneg=False):
    k = int(rng.integers(2, max_atoms + 1))
    values = rng.uniform(0 if nonneg else -3, 3, size=k)
    weights = rng.dirichlet(np.ones(k))
    return laws.DiscreteLaw.from_atoms(values, weights)


def random_standard_law(rng, max_atoms=6):
    while True:
        law = random_law(rng, max_atoms)
        if law.variance > 1e-3:
            return laws.standardize(law)


def random_theta(rng, n):
    return arithmetic.CoefficientVector.normalized(rng.standard_normal(n))


def moment_chain(seed, cases=300):
    bad = 0
    for k in range(cases):
        law = random_standard_law(stream(seed, 1, k))
        bad += not laws.moments(law).chain_holds(tol=1e-10)
    return CheckResult("moment chain |g| <= g_bar <= delta^(2/3), g_bar >= 1, delta >= 1",
                       cases, bad == 0, f"{bad} violations")


def r1_below_eps_squared(seed, cases=200):
    bad = 0
    worst = -math.inf
    for k in range(cases):
        rng = stream(seed, 2, k)
        n = int(rng.integers(1, 13))
        pool = [random_standard_law(rng) for _ in range(3)]
        ls = [pool[i] for i in rng.integers(0, 3, size=n)]
        eps, r1, *_ = fourier.regime_quantities(random_theta(rng, n), ls)
        worst = max(worst, r1 - eps * eps)
        bad += r1 > eps * eps + 1e-12
    return CheckResult("R1 <= epsilon^2", cases, bad == 0, f"max(R1 - eps^2) = {worst:.3g}")


def s_subadditive(seed, cases=300):
    bad = 0
    for k in range(cases):
        rng = stream(seed, 3, k)
        n = int(rng.integers(1, 9))
        theta = random_theta(rng, n)
        Y = laws.symmetrize(random_law(rng, 4))
        x1, x2 = rng.uniform(-30, 30, size=2)
        s = arithmetic.s_function(theta, Y, np.array([x1 + x2, x1, x2]))
        bad += s[0] > s[1] + s[2] + 1e-12
    return CheckResult("S(x1 + x2) <= S(x1) + S(x2)", cases, bad == 0, f"{bad} violations")


def paley_zygmund(seed, cases=300):
    bad = 0
    for k in range(cases):
        rng = stream(seed, 4, k)
        law = random_law(rng, 6, nonneg=True)
        if law.mean <= 1e-6:
            law = laws.DiscreteLaw.from_atoms(law.values + 1, law.weights)
        law = laws.DiscreteLaw.from_atoms(law.values / law.mean, law.weights)
        # Tiny correction so the mean is 1 to within the checker's tolerance.
        law = laws.DiscreteLaw.from_atoms(law.values / law.mean, law.weights)
        M = max(1.0, law.moment(2)) * (1 + rng.uniform(0, 2))
        part_i, part_ii = laws.paley_zygmund_check(law, M)
        bad += not (part_i and part_ii)
    return CheckResult("Paley-Zygmund parts (i) and (ii)", cases, bad == 0, f"{bad} violations")


def cll_inequality(seed, n_values=(1, 2, 5, 16), m=20000):
    results = []
    rad = laws.rademacher()
    for idx, n in enumerate(n_values):
        rng = stream(seed, 5, idx)
        xi = float(rng.uniform(1, 3 * math.sqrt(n)))
        a = rng.uniform(0.5, 6, size=n)

        def phi_abs(t, xi=xi):
            return np.abs(laws.charfun(rad, xi * t))

        fs_cos = [lambda t, a=ai: 1 + np.cos(a * t) for ai in a]
        for label, fs, bound in (("|phi(xi t)|", phi_abs, 1.0), ("1 + cos(a_j t)", fs_cos, 2.0)):
            res = sphere.cll_check(fs, n, m, seed=int(rng.integers(0, 2**63)), bound=bound)
            results.append((n, label, res))
    bad = [r for r in results if not r[2].holds]
    detail = "; ".join(f"n={n} {lab}: {r.lhs:.4f} vs {r.rhs:.4f}" for n, lab, r in results[:4])
    return CheckResult("E prod f_j(Theta_j) <= prod (E f_j^2)^(1/2) (3-sigma)", len(results),
                       not bad, detail)


def bessel_decay(seed, n_values=(4, 8, 16, 32, 64)):
    fits = {}
    for n in n_values:
        grid = np.linspace(10 * n / 400, 10 * n, 400)
        fits[n] = sphere.bessel_decay_fit(n, grid)
    ok = all(c > 0 for c in fits.values())
    return CheckResult("J_n(xi) <= 1 - c min(xi^2/n, 1), fitted c > 0", len(fits), ok,
                       ", ".join(f"n={n}: c={c:.4f}" for n, c in fits.items()))


def charfun_decay(seed, n_values=(8, 16, 32)):
    fits = {}
    for name, law in (("rademacher", laws.rademacher()),
                      ("threepoint", laws.parse_law("threepoint(sqrt(2),0.25)"))):
        for n in n_values:
            grid = np.linspace(10 * math.sqrt(n) / 200, 10 * math.sqrt(n), 200)
            fits[(name, n)] = sphere.charfun_decay_fit(law, n, grid)
    ok = all(c > 0 for c in fits.values())
    return CheckResult("E|phi(tau Theta)|^2 <= 1 - c min(tau^2/n, delta^-4), fitted c > 0",
                       len(fits), ok,
                       ", ".join(f"{k[0]} n={k[1]}: c={c:.4f}" for k, c in fits.items()))


def lattice_triangle(seed, cases=2000):
    rng = stream(seed, 6)
    n = 7
    x = rng.uniform(-5, 5, size=(cases, n))
    y = rng.uniform(-5, 5, size=(cases, n))
    lhs = arithmetic.dist_to_lattice(x + y)
    rhs = arithmetic.dist_to_lattice(x) + arithmetic.dist_to_lattice(y)
    bad = int(np.sum(lhs > rhs + 1e-12))
    return CheckResult("d(x + y, Z^n) <= d(x, Z^n) + d(y, Z^n)", cases, bad == 0, f"{bad} violations")


def lattice_lipschitz(seed, cases=2000):
    rng = stream(seed, 7)
    bad = 0
    for k in range(20):
        theta = random_theta(rng, int(rng.integers(1, 10)))
        x1 = rng.uniform(-50, 50, size=cases // 20)
        x2 = x1 + rng.normal(0, 0.3, size=x1.shape)
        d1 = arithmetic.line_distance(theta, x1)
        d2 = arithmetic.line_distance(theta, x2)
        bad += int(np.sum(np.abs(d1 - d2) > np.abs(x1 - x2) + 1e-12))
    return CheckResult("|d(x1 theta) - d(x2 theta)| <= |x1 - x2|", cases, bad == 0, f"{bad} violations")


def symmetrization_identity(seed, cases=100):
    worst = 0.0
    for k in range(cases):
        rng = stream(seed, 8, k)
        law = random_law(rng)
        xi = rng.uniform(-20, 20, size=16)
        lhs = laws.charfun(laws.symmetrize(law), xi)
        rhs = np.abs(laws.charfun(law, xi)) ** 2
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("CF of X - X' equals |phi|^2", cases, worst <= 1e-12, f"max error {worst:.3g}")


def direction_cauchy_schwarz(seed, samples=5000):
    prof = laws.moments(laws.standardize(laws.bernoulli(0.2)))
    dirs = sphere.sample_directions(24, samples, seed)
    skew = np.abs(dirs ** 3 @ np.full(24, prof.gamma3))
    quart = dirs ** 4 @ np.full(24, prof.delta4)
    bad = int(np.sum(skew > np.sqrt(quart) + 1e-12))
    return CheckResult("|sum gamma3 Theta^3| <= sqrt(sum delta4 Theta^4)", samples, bad == 0,
                       f"{bad} violations")


def r2_reference(seed, n=32, samples=2000):
    frac = sphere.r2_coverage(laws.standardize(laws.bernoulli(0.25)), n, samples, seed)
    return CheckResult("minimal R2 <= 200 delta^2 / sqrt(n) for >= 99% of directions", samples,
                       frac >= 0.99, f"fraction {frac:.4f}")


ALL_CHECKS = (moment_chain, r1_below_eps_squared, s_subadditive, paley_zygmund,
              cll_inequality, bessel_decay, charfun_decay, lattice_triangle, lattice_lipschitz,
              symmetrization_identity, direction_cauchy_schwarz, r2_reference)


def run_all(seed=0, map_fn=map):
    return list(map_fn(lambda check: check(seed), ALL_CHECKS))
