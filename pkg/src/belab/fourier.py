"""Characteristic functions of weighted sums and the Esseen smoothing bound."""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .arithmetic import as_theta
from .laws import DiscreteLaw, moments
from .quadrature import DEFAULT_BUDGET, integrate

ESSEEN_LEAD = 1 / math.pi
ESSEEN_REMAINDER = 24 / (math.pi * math.sqrt(2 * math.pi))
QUAD_TOL = 1e-10


def broadcast_laws(laws, n):
    if isinstance(laws, DiscreteLaw):
        return [laws] * n
    laws = list(laws)
    if len(laws) == 1:
        return laws * n
    if len(laws) != n:
        raise ValueError(f"expected 1 or {n} laws, got {len(laws)}")
    return laws


def _grouped(theta, laws):
    """Merge identical (law, |theta_j|) factors; symmetric laws make the sign irrelevant."""
    groups = {}
    for t, law in zip(theta.coords, laws):
        if t == 0:
            continue
        key = (id(law), abs(t) if law.is_symmetric else t)
        if key in groups:
            groups[key][2] += 1
        else:
            groups[key] = [law, key[1], 1]
    return list(groups.values())


def product_charfun(theta, laws, xi):
    """prod_j phi_j(theta_j xi), vectorized over ``xi``."""
    theta = as_theta(theta)
    laws = broadcast_laws(laws, theta.n)
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape, dtype=complex)
    for law, t, count in _grouped(theta, laws):
        factor = np.exp(-1j * np.multiply.outer(xi * t, law.values)) @ law.weights
        out = out * factor ** count
    return out


def _difference_integrand(theta, laws):
    theta = as_theta(theta)
    laws = broadcast_laws(laws, theta.n)

    def f(xi):
        return np.abs(product_charfun(theta, laws, xi) - np.exp(-0.5 * xi * xi)) / xi
    return f


def _oscillation_width(theta, laws):
    """A quarter of the shortest period present in the integrand."""
    theta = as_theta(theta)
    laws = broadcast_laws(laws, theta.n)
    fastest = max(abs(t) * np.max(np.abs(law.values)) for t, law in zip(theta.coords, laws))
    return 0.25 * 2 * math.pi / fastest if fastest > 0 else None


def difference_integral(theta, laws, lo, hi, abs_tol=QUAD_TOL, budget=DEFAULT_BUDGET):
    """Integral of |phi_theta(xi) - exp(-xi^2/2)| / xi over [lo, hi], 0 <= lo <= hi.

    The Kronrod nodes are interior, so xi = 0 is never evaluated; the
    integrand extends continuously by 0 there.
    """
    if hi <= lo:
        return 0.0
    f = _difference_integrand(theta, laws)
    value, _ = integrate(f, lo, hi, abs_tol=abs_tol, budget=budget,
                         max_width=_oscillation_width(theta, laws))
    return float(value)


def esseen_bound(theta, laws, T, lead=ESSEEN_LEAD, remainder=ESSEEN_REMAINDER,
                 abs_tol=QUAD_TOL, budget=DEFAULT_BUDGET):
    """Smoothing-inequality upper bound on sup_t |F_theta(t) - Phi(t)|.

    lead * integral over [-T, T] of |phi_theta - exp(-xi^2/2)| / |xi|, plus
    remainder / T. The default constants are the classical ones.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    one_side = difference_integral(theta, laws, 0.0, T, abs_tol=abs_tol / 2, budget=budget)
    return lead * 2 * one_side + remainder / T


def esseen_bound_sweep(theta, laws, Ts, **kw):
    """Minimum of :func:`esseen_bound` over the cutoffs ``Ts``; returns (bound, T)."""
    best = min((esseen_bound(theta, laws, T, **kw), T) for T in Ts)
    return best


@dataclass(frozen=True)
class RegimeReport:
    epsilon: float
    r1: float
    r2_min: float
    r2_reference: float
    segment_integrals: tuple
    breakpoints: tuple

    def to_dict(self):
        d = asdict(self)
        d["segment_integrals"] = list(self.segment_integrals)
        d["breakpoints"] = list(self.breakpoints)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def regime_quantities(theta, laws):
    """(epsilon, R1, minimal R2, reference R2, delta^4) without any quadrature."""
    theta = as_theta(theta)
    laws = broadcast_laws(laws, theta.n)
    profs = {}
    for law in laws:
        if id(law) not in profs:
            profs[id(law)] = moments(law)
    ps = [profs[id(law)] for law in laws]
    c = theta.coords
    d4 = np.array([p.delta4 for p in ps])
    g3 = np.array([p.gamma3 for p in ps])
    gb3 = np.array([p.gamma_bar3 for p in ps])
    eps = math.fsum((c ** 4 * d4).tolist()) ** 0.25
    r1 = abs(math.fsum((g3 * c ** 3).tolist()))
    key = np.abs(c) * gb3
    order = np.argsort(key, kind="stable")
    cum = np.cumsum(c[order] ** 2)
    r2 = float(key[order][np.searchsorted(cum, 0.125 - 1e-15)])
    delta4 = float(np.mean(d4))
    r2_ref = 200 * math.sqrt(delta4) / math.sqrt(theta.n)
    return eps, r1, r2, r2_ref, delta4


def regime_report(theta, laws, c=1.0, abs_tol=QUAD_TOL, budget=DEFAULT_BUDGET):
    """Three-regime diagnostics for the Fourier integral.

    Segments (on xi > 0) are [0, eps^(-2/3)], [eps^(-2/3), c / R2] and
    [c / R2, n / delta^4], each clipped to lie inside [0, n / delta^4].
    """
    theta = as_theta(theta)
    eps, r1, r2, r2_ref, delta4 = regime_quantities(theta, laws)
    top = theta.n / delta4
    b1 = min(eps ** (-2 / 3), top)
    b2 = min(max(c / r2, b1), top) if r2 > 0 else top
    segs = tuple(difference_integral(theta, laws, lo, hi, abs_tol=abs_tol, budget=budget)
                 for lo, hi in ((0.0, b1), (b1, b2), (b2, top)))
    return RegimeReport(epsilon=eps, r1=r1, r2_min=r2, r2_reference=r2_ref,
                        segment_integrals=segs, breakpoints=(b1, b2, top))
