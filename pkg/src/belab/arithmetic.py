"""Distances to the integer lattice and the arithmetic functional of a direction.

The functional is the least ``R >= 1`` for which a unit vector ``theta``
satisfies three conditions: ``n |sum theta^3| <= R``, ``n sum theta^4 <= R``
and, for every ``|xi| <= n``::

    d(xi theta, Z^n) >= min(|xi|, (n / R) / |xi|) / 10

The third condition is certified on a grid using the fact that
``xi -> d(xi theta, Z^n)`` is 1-Lipschitz for unit ``theta``.
"""

import enum
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension
from .quadrature import DEFAULT_BUDGET, integrate

RHS_FACTOR = 0.1
LIPSCHITZ_MARGIN = 1.1
DEFAULT_GRID_STEP = 1e-4
DEFAULT_R_TOL = 0.01
_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """A unit vector in R^n."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).ravel().copy()
        if len(c) == 0:
            raise BadDimension("coefficient vector needs n >= 1")
        norm2 = math.fsum((c * c).tolist())
        if abs(norm2 - 1) > 1e-12:
            raise ValueError(f"sum of squares is {norm2!r}, expected 1")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def normalized(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x / math.sqrt(math.fsum((x * x).tolist())))

    @property
    def n(self):
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __eq__(self, other):
        return isinstance(other, CoefficientVector) and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def digest(self):
        return hashlib.sha256(np.ascontiguousarray(self.coords, dtype="<f8").tobytes()).hexdigest()


def as_theta(theta):
    return theta if isinstance(theta, CoefficientVector) else CoefficientVector(theta)


def uniform_theta(n):
    return CoefficientVector(np.full(n, 1 / math.sqrt(n)))


def unit_theta(n, j=0):
    e = np.zeros(n)
    e[j] = 1.0
    return CoefficientVector(e)


def dist_to_lattice(x):
    """Euclidean distance from ``x`` to Z^n (rows of a 2-D array are separate points)."""
    x = np.asarray(x, dtype=float)
    r = x - np.rint(x)
    return np.sqrt(np.sum(r * r, axis=-1))


def theta_zero(n):
    """(1, sqrt2, -1, -sqrt2, 1, sqrt2, ...) / sqrt(3n/2) for n divisible by 4."""
    if n < 4 or n % 4:
        raise BadDimension(f"n must be a positive multiple of 4, got {n}")
    block = np.array([1.0, math.sqrt(2), -1.0, -math.sqrt(2)])
    return CoefficientVector(np.tile(block, n // 4) / math.sqrt(1.5 * n))


def check_conditions_i_ii(theta):
    """Smallest R satisfying the cubic-sum and quartic-sum conditions."""
    c = as_theta(theta).coords
    n = len(c)
    return n * abs(math.fsum((c ** 3).tolist())), n * math.fsum((c ** 4).tolist())


class _LineDistance:
    """Evaluates d(xi theta, Z^n) with coordinates grouped by |theta_j|."""

    def __init__(self, theta):
        mags, counts = np.unique(np.abs(as_theta(theta).coords), return_counts=True)
        keep = mags > 0
        self.mags = mags[keep]
        self.counts = counts[keep].astype(float)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape)
        flat = xi.ravel()
        res = out.ravel()
        for start in range(0, len(flat), _CHUNK):
            x = np.multiply.outer(flat[start:start + _CHUNK], self.mags)
            r = x - np.rint(x)
            res[start:start + _CHUNK] = np.sqrt((r * r) @ self.counts)
        return out


def line_distance(theta, xi):
    """d(xi theta, Z^n), vectorized over ``xi``."""
    return _LineDistance(theta)(xi)


def condition_rhs(xi, n, R):
    xi = np.abs(np.asarray(xi, dtype=float))
    with np.errstate(divide="ignore"):
        return RHS_FACTOR * np.minimum(xi, (n / R) / xi)


class Outcome(str, enum.Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ArithmeticCertificate:
    outcome: Outcome
    R: float
    grid_step: float
    margin: float
    n: int
    theta_digest: str
    counterexample_xi: float | None = None

    @property
    def certified(self):
        return self.outcome is Outcome.CERTIFIED

    @property
    def refuted(self):
        return self.outcome is Outcome.REFUTED

    def to_dict(self):
        d = {
            "outcome": self.outcome.value,
            "R": self.R,
            "grid_step": self.grid_step,
            "margin": self.margin,
            "n": self.n,
            "theta_digest": self.theta_digest,
        }
        if self.counterexample_xi is not None:
            d["counterexample_xi"] = self.counterexample_xi
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _grid_denominator(grid_step):
    """Integer m with 1/m <= grid_step; grid points are k/m, exact at integers."""
    inv = 1.0 / grid_step
    m = round(inv)
    return m if abs(inv - m) <= 1e-9 * inv else math.ceil(inv)


class ConditionGrid:
    """Grid values of d(xi theta, Z^n) on [analytic boundary, n], reusable across R."""

    def __init__(self, theta, grid_step=DEFAULT_GRID_STEP):
        if grid_step > 1e-2:
            raise ValueError("grid_step must be <= 1e-2")
        self.theta = as_theta(theta)
        self.n = self.theta.n
        self.denominator = _grid_denominator(grid_step)
        self.step = 1.0 / self.denominator
        # Below this point every |xi theta_j| <= 1/2, so d = |xi| exactly.
        self.boundary = 1.0 / (2.0 * np.max(np.abs(self.theta.coords)))
        k0 = math.floor(self.boundary * self.denominator)
        k1 = math.ceil(self.n * self.denominator)
        self.xi = np.arange(k0, k1 + 1, dtype=float) / self.denominator
        self.dist = line_distance(self.theta, self.xi)

    def certify(self, R):
        n, h = self.n, self.step
        rhs = condition_rhs(self.xi, n, R)
        slack = self.dist - rhs
        margin = float(np.min(slack - LIPSCHITZ_MARGIN * h)) if len(slack) else math.inf
        common = dict(R=float(R), grid_step=h, n=n, theta_digest=self.theta.digest())
        bad = np.flatnonzero(slack < 0)
        if len(bad):
            # Deepest violation within the first (lowest-xi) run of violations.
            first = bad[0]
            gaps = np.flatnonzero(np.diff(bad) > 1)
            last = bad[gaps[0]] if len(gaps) else bad[-1]
            run = slice(first, last + 1)
            k = first + int(np.argmin(slack[run]))
            return ArithmeticCertificate(Outcome.REFUTED, margin=margin,
                                         counterexample_xi=float(self.xi[k]), **common)
        if margin >= 0:
            return ArithmeticCertificate(Outcome.CERTIFIED, margin=margin, **common)
        return ArithmeticCertificate(Outcome.INCONCLUSIVE, margin=margin, **common)


def certify_condition_iii(theta, R, grid_step=DEFAULT_GRID_STEP):
    """Certify or refute the lattice-distance condition for all |xi| <= n."""
    if R < 1:
        raise ValueError("R must be >= 1")
    return ConditionGrid(theta, grid_step).certify(R)


def minimal_certified_R(theta, grid_step=DEFAULT_GRID_STEP, R_tol=DEFAULT_R_TOL):
    """Bracket the arithmetic functional.

    Returns ``(R_upper, R_lower)``: ``R_upper`` is the smallest R found by
    multiplicative bisection on ``[max(R_i, R_ii, 1), n^2]`` for which all
    three conditions are certified (``inf`` if none), and ``R_lower`` is the
    largest R refuted by a counterexample (0 if none was met).
    """
    if R_tol < 1e-3:
        raise ValueError("R_tol must be >= 1e-3")
    theta = as_theta(theta)
    n = theta.n
    grid = ConditionGrid(theta, grid_step)
    floor = max(*check_conditions_i_ii(theta), 1.0)
    top = float(n * n)
    refuted = 0.0

    def test(R):
        nonlocal refuted
        cert = grid.certify(R)
        if cert.refuted:
            refuted = max(refuted, R)
        return cert.certified

    if floor > top:
        return math.inf, refuted
    if test(floor):
        return floor, refuted
    if not test(top):
        return math.inf, refuted
    lo, hi = floor, top
    while hi / lo > 1 + R_tol:
        mid = math.sqrt(lo * hi)
        if test(mid):
            hi = mid
        else:
            lo = mid
    return hi, refuted


def s_function(theta, lawY, xi):
    """sqrt(E d^2((xi Y / 2 pi) theta, Z^n)), vectorized over ``xi``."""
    dist = _LineDistance(theta)
    xi = np.asarray(xi, dtype=float)
    total = np.zeros(xi.shape)
    for y, w in zip(lawY.values, lawY.weights):
        if y != 0:
            total = total + w * dist(xi * (y / (2 * math.pi))) ** 2
    return np.sqrt(total)


def tail_integral_check(theta, lawY, T, abs_tol=1e-10, budget=DEFAULT_BUDGET):
    """Integral of exp(-4 S(xi)^2) / xi over [T^(1/6), T]."""
    if T < 1:
        raise ValueError("T must be >= 1")
    dist = _LineDistance(theta)
    pairs = [(y / (2 * math.pi), w) for y, w in zip(lawY.values, lawY.weights) if y != 0]

    def integrand(x):
        s2 = np.zeros(x.shape)
        for scale, w in pairs:
            s2 += w * dist(x * scale) ** 2
        return np.exp(-4 * s2) / x

    # d(. theta, Z^n) has kinks spaced at least 1/(2 max|y theta_j|) apart.
    ymax = max((abs(s) for s, _ in pairs), default=0.0)
    width = 0.25 / (ymax * np.max(np.abs(as_theta(theta).coords))) if ymax else None
    value, _ = integrate(integrand, T ** (1 / 6), T, abs_tol=abs_tol, budget=budget,
                         max_width=width)
    return float(value)


def sqrt2_diophantine_check(xi_max, grid_step=1e-4):
    """Largest c with d^2(xi) + d^2(xi sqrt2) >= min(3 xi^2, c / xi^2) on a grid of [1/2, xi_max].

    Returns ``inf`` if the quadratic branch is binding at every grid point.
    """
    if xi_max < 1 or grid_step > 1e-3:
        raise ValueError("need xi_max >= 1 and grid_step <= 1e-3")
    m = _grid_denominator(grid_step)
    k0, k1 = math.ceil(0.5 * m), math.floor(xi_max * m)
    best = math.inf
    root2 = math.sqrt(2)
    for start in range(k0, k1 + 1, 1 << 20):
        xi = np.arange(start, min(start + (1 << 20), k1 + 1), dtype=float) / m
        a = xi - np.rint(xi)
        b = xi * root2 - np.rint(xi * root2)
        s = a * a + b * b
        bound = xi * xi * s
        active = s < 3 * xi * xi
        if active.any():
            best = min(best, float(bound[active].min()))
    return best
