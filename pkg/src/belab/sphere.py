"""Random directions on the unit sphere and properties of their coordinates."""

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

from .arithmetic import CoefficientVector
from .fourier import regime_quantities
from .laws import MomentProfile, charfun, moments
from .quadrature import integrate
from .rng import stream

QUAD_TOL = 1e-12
DEFAULT_T_GRID = tuple(float(t) for t in np.arange(1, 161) / 4)
TAIL_FIT_START = 5.0


def sample_direction(n, seed):
    """Uniform point on S^(n-1), deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return CoefficientVector.normalized(stream(seed).standard_normal(n))


def sample_directions(n, count, seed, chunk=4096):
    """``count`` uniform directions as rows; chunk c uses stream (seed, c)."""
    rows = []
    for index, start in enumerate(range(0, count, chunk)):
        g = stream(seed, index).standard_normal((min(chunk, count - start), n))
        rows.append(g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.concatenate(rows) if rows else np.empty((0, n))


def _log_norm(n):
    return -betaln(0.5, 0.5 * (n - 1))


def marginal_density(n, t):
    """Density of one coordinate of a uniform point on S^(n-1)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(_log_norm(n) + 0.5 * (n - 3) * np.log1p(-t * t))
    return np.where(inside, val, 0.0)


def integrate_marginal(n, g, abs_tol=QUAD_TOL, max_width=None):
    """E g(Theta_1) by quadrature in u with t = sin u, which removes the endpoint singularity.

    ``g`` maps an array of t to an array (optionally with a trailing axis).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    log_c = _log_norm(n)

    def f(u):
        w = np.exp(log_c + (n - 2) * np.log(np.cos(u)))
        y = np.asarray(g(np.sin(u)))
        return y * (w if y.ndim == 1 else w[:, None])

    value, _ = integrate(f, -0.5 * math.pi, 0.5 * math.pi, abs_tol=abs_tol, max_width=max_width)
    return value


def bessel_transform(n, xi):
    """E exp(-i xi Theta_1), a real even function; vectorized over ``xi``."""
    xi_arr = np.atleast_1d(np.abs(np.asarray(xi, dtype=float)))
    width = None
    if xi_arr.max() > 0:
        width = min(0.25, 0.5 * math.pi / xi_arr.max())
    value = integrate_marginal(n, lambda t: np.cos(np.multiply.outer(t, xi_arr)),
                               max_width=width)
    value = np.asarray(value, dtype=float).reshape(xi_arr.shape)
    return float(value[0]) if np.ndim(xi) == 0 else value


def bessel_decay_fit(n, xi_grid):
    """Largest c with J_n(xi) <= 1 - c min(xi^2 / n, 1) at every grid point."""
    xi = np.asarray(xi_grid, dtype=float)
    if len(xi) == 0 or np.any(xi == 0):
        raise ValueError("grid must be nonempty and exclude 0")
    J = bessel_transform(n, xi)
    return float(np.min((1 - J) / np.minimum(xi * xi / n, 1.0)))


def mean_sq_charfun(law, n, tau):
    """E |phi(tau Theta_1)|^2 by quadrature against the marginal density."""
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    spread = float(np.max(np.abs(law.values)) - np.min(law.values))
    top = float(np.max(np.abs(tau_arr))) * max(spread, 1e-300)
    width = min(0.25, 0.5 * math.pi / top) if top > 0 else None

    def g(t):
        phi = charfun(law, np.multiply.outer(t, tau_arr))
        return (phi * phi.conj()).real

    value = np.asarray(integrate_marginal(n, g, max_width=width), dtype=float)
    return float(value[0]) if np.ndim(tau) == 0 else value


def charfun_decay_fit(law, n, tau_grid):
    """Largest c with E|phi(tau Theta_1)|^2 <= 1 - c min(tau^2 / n, delta^-4) on the grid."""
    tau = np.asarray(tau_grid, dtype=float)
    if len(tau) == 0 or np.any(tau == 0):
        raise ValueError("grid must be nonempty and exclude 0")
    inv_delta4 = 1.0 / moments(law).delta4
    E = mean_sq_charfun(law, n, tau)
    return float(np.min((1 - E) / np.minimum(tau * tau / n, inv_delta4)))


@dataclass(frozen=True)
class CLLResult:
    lhs: float
    rhs: float
    radius: float

    @property
    def holds(self):
        return self.lhs <= self.rhs + 3 * self.radius + 1e-12


def cll_check(fs, n, m=10**4, seed=0, bound=None):
    """Monte Carlo E prod f_j(Theta_j) against prod (E f_j(Theta_j)^2)^(1/2).

    ``fs`` is one vectorized function (used for every coordinate) or a list
    of ``n`` of them. ``bound``, if given, is checked against every sample.
    """
    if m < 10**4:
        raise ValueError("m must be >= 1e4")
    fs = list(fs) if isinstance(fs, (list, tuple)) else [fs] * n
    if len(fs) != n:
        raise ValueError(f"expected {n} functions")
    dirs = sample_directions(n, m, seed)
    prod = np.ones(m)
    for j, f in enumerate(fs):
        vals = np.asarray(f(dirs[:, j]), dtype=float)
        if np.any(vals < 0) or (bound is not None and np.any(vals > bound)):
            raise ValueError("functions must be nonnegative and bounded")
        prod *= vals
    lhs = float(prod.mean())
    radius = float(prod.std(ddof=1) / math.sqrt(m))
    if n == 1:
        # n = 1: Theta_1 = +-1 with equal probability; no density exists.
        second = [0.5 * (float(fs[0](np.array([1.0]))[0]) ** 2
                         + float(fs[0](np.array([-1.0]))[0]) ** 2)]
    else:
        cache = {}
        second = []
        for f in fs:
            if id(f) not in cache:
                cache[id(f)] = float(integrate_marginal(n, lambda t, f=f: np.asarray(f(t)) ** 2,
                                                        abs_tol=1e-10))
            second.append(cache[id(f)])
    rhs = math.prod(math.sqrt(s) for s in second)
    return CLLResult(lhs, rhs, radius)


@dataclass(frozen=True)
class DirectionStats:
    skew_term: float
    quartic_term: float
    n: int
    delta4_mean: float


def direction_stats(theta, profiles):
    c = np.asarray(theta.coords if isinstance(theta, CoefficientVector) else theta)
    n = len(c)
    profiles = _broadcast_profiles(profiles, n)
    g3 = np.array([p.gamma3 for p in profiles])
    d4 = np.array([p.delta4 for p in profiles])
    return DirectionStats(float(np.dot(g3, c ** 3)), float(np.dot(d4, c ** 4)), n, float(d4.mean()))


def _broadcast_profiles(profiles, n):
    if isinstance(profiles, MomentProfile):
        return [profiles] * n
    profiles = list(profiles)
    if len(profiles) == 1:
        return profiles * n
    if len(profiles) != n:
        raise ValueError(f"expected 1 or {n} moment profiles")
    return profiles


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    points: int


def _line_fit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.ptp(x) == 0:
        return LineFit(math.nan, math.nan, math.nan, len(x))
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return LineFit(float(slope), float(intercept), r2, len(x))


@dataclass(frozen=True)
class TailCurves:
    t: np.ndarray
    survival_skew: np.ndarray
    survival_quartic: np.ndarray
    skew_fit: LineFit
    quartic_fit: LineFit
    samples: int

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,survival_skew,survival_quartic\n")
        for row in zip(self.t.tolist(), self.survival_skew.tolist(), self.survival_quartic.tolist()):
            buf.write(",".join(repr(v) for v in row) + "\n")
        for name, fit in (("skew", self.skew_fit), ("quartic", self.quartic_fit)):
            buf.write(f"# fit_{name}: slope={fit.slope!r} intercept={fit.intercept!r} "
                      f"r_squared={fit.r_squared!r} points={fit.points}\n")
        return buf.getvalue()


def deviation_statistics(profiles, n, samples, seed):
    """Normalized statistics n |sum gamma3_j Theta_j^3| / delta^4 and n sum delta4_j Theta_j^4 / delta^4."""
    profiles = _broadcast_profiles(profiles, n)
    g3 = np.array([p.gamma3 for p in profiles])
    d4 = np.array([p.delta4 for p in profiles])
    mean_d4 = float(d4.mean())
    dirs = sample_directions(n, samples, seed)
    skew = n * np.abs(dirs ** 3 @ g3) / mean_d4
    quartic = n * (dirs ** 4 @ d4) / mean_d4
    return skew, quartic


def _survival(stat, t):
    s = np.sort(stat)
    return 1.0 - np.searchsorted(s, t, side="left") / len(s)


def deviation_tail_curves(profiles, n, samples=10**5, seed=0, t_grid=DEFAULT_T_GRID,
                          t_min=TAIL_FIT_START):
    """Empirical survival curves of the two deviation statistics with tail-shape fits.

    ``-ln survival`` is regressed on ``t^(2/3)`` (skew) and ``t^(1/2)``
    (quartic) over ``t >= t_min`` where the survival is at least ``10 / samples``.
    """
    if samples < 10**4:
        raise ValueError("samples must be >= 1e4")
    skew, quartic = deviation_statistics(profiles, n, samples, seed)
    t = np.asarray(t_grid, dtype=float)
    s_skew = _survival(skew, t)
    s_quart = _survival(quartic, t)
    floor = 10.0 / samples

    def fit(surv, power):
        use = (t >= t_min) & (surv >= floor)
        return _line_fit(t[use] ** power, -np.log(surv[use]))

    return TailCurves(t, s_skew, s_quart, fit(s_skew, 2 / 3), fit(s_quart, 0.5), samples)


def r2_coverage(laws, n, samples, seed):
    """Fraction of sampled directions whose minimal R2 is at most 200 delta^2 / sqrt(n)."""
    dirs = sample_directions(n, samples, seed)
    hits = 0
    for row in dirs:
        theta = CoefficientVector.normalized(row)
        _, _, r2, ref, _ = regime_quantities(theta, laws)
        hits += r2 <= ref
    return hits / samples
