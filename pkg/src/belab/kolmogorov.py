"""Kolmogorov distance between a weighted sum and the standard Gaussian."""

import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .arithmetic import as_theta
from .errors import BudgetExceeded
from .laws import DiscreteLaw, merge_atoms
from .rng import stream

DEFAULT_ATOM_BUDGET = 1 << 26
DEFAULT_BE_CONSTANT = 0.56
MC_CHUNK = 1 << 14


class Method(str, enum.Enum):
    EXACT = "Exact"
    MONTE_CARLO = "MonteCarlo"


@dataclass(frozen=True)
class KolmogorovEstimate:
    value: float
    method: Method
    confidence_radius: float = 0.0
    sample_count: int = 0
    seed: int | None = None

    @property
    def interval_form_bound(self):
        """Upper bound for the sup over intervals [a, b]; it is at most twice the one-sided sup."""
        return min(1.0, 2 * self.value)

    def to_dict(self):
        d = {"value": self.value, "method": self.method.value,
             "confidence_radius": self.confidence_radius, "sample_count": self.sample_count}
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def normal_cdf(t):
    """Standard normal CDF."""
    return ndtr(t)


def worst_case_atoms(theta, law):
    """Atom count of the weighted sum before any merging, k^(number of nonzero coordinates)."""
    m = int(np.count_nonzero(as_theta(theta).coords))
    return len(law) ** m


def weighted_sum_law(theta, law, atom_budget=DEFAULT_ATOM_BUDGET):
    """Exact law of sum_j theta_j X_j with X_j iid ``law``.

    Convolves one coordinate at a time and merges atoms closer than 1e-12,
    so structured directions stay far below the worst-case k^n atoms. The
    budget applies to the largest intermediate (pre-merge) support.
    """
    theta = as_theta(theta)
    values = np.zeros(1)
    weights = np.ones(1)
    k = len(law)
    for t in theta.coords:
        if t == 0:
            continue
        size = len(values) * k
        if size > atom_budget:
            raise BudgetExceeded(worst_case_atoms(theta, law), atom_budget)
        values = np.add.outer(values, t * law.values).ravel()
        weights = np.multiply.outer(weights, law.weights).ravel()
        values, weights = merge_atoms(values, weights)
    return DiscreteLaw(values, weights)


def _cdf_columns(law):
    """(t, F(t), F(t-), Phi(t)) for every atom, accumulated in extended precision."""
    cum = np.cumsum(law.weights.astype(np.longdouble))
    F = np.minimum(cum.astype(float), 1.0)
    F_left = np.concatenate([[0.0], F[:-1]])
    # Sorted atoms: enforce monotone Phi so the scan never sees a spurious dip.
    return law.values, F, F_left, np.maximum.accumulate(normal_cdf(law.values))


def law_distance(law):
    """sup_t |F(t) - Phi(t)| for a discrete law, by one scan over its atoms."""
    _, F, F_left, Phi = _cdf_columns(law)
    return float(max(np.max(np.abs(F - Phi)), np.max(np.abs(F_left - Phi))))


def exact_distance(theta, law, atom_budget=DEFAULT_ATOM_BUDGET):
    return KolmogorovEstimate(law_distance(weighted_sum_law(theta, law, atom_budget)), Method.EXACT)


def dkw_radius(m, alpha):
    return math.sqrt(math.log(2 / alpha) / (2 * m))


def sample_weighted_sums(theta, law, m, seed, threads=1):
    """m iid draws of sum_j theta_j X_j; chunk c uses stream (seed, c)."""
    c = as_theta(theta).coords
    cum = np.cumsum(law.weights)
    cum[-1] = 1.0
    chunks = [(start, min(MC_CHUNK, m - start)) for start in range(0, m, MC_CHUNK)]

    def draw(index):
        start, size = chunks[index]
        u = stream(seed, index).random((size, len(c)))
        atoms = law.values[np.searchsorted(cum, u, side="right").clip(max=len(cum) - 1)]
        return atoms @ c

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(draw, range(len(chunks))))
    else:
        parts = [draw(i) for i in range(len(chunks))]
    return np.concatenate(parts)


def empirical_distance(samples):
    """sup_t |F_m(t) - Phi(t)| for the empirical CDF of ``samples``."""
    x = np.sort(samples)
    m = len(x)
    Phi = normal_cdf(x)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - Phi), np.max(Phi - (i - 1) / m)))


def mc_distance(theta, law, m=10**5, alpha=0.05, seed=0, threads=1):
    """Monte Carlo estimate with DKW confidence radius sqrt(ln(2/alpha) / (2m))."""
    if m < 1000:
        raise ValueError("m must be >= 1000")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    samples = sample_weighted_sums(theta, law, m, seed, threads)
    return KolmogorovEstimate(empirical_distance(samples), Method.MONTE_CARLO,
                              dkw_radius(m, alpha), m, int(seed))


def classical_be_bound(moment, n, constant=DEFAULT_BE_CONSTANT):
    """constant * E|X|^3 / sqrt(n)."""
    if n < 1 or constant <= 0:
        raise ValueError("need n >= 1 and constant > 0")
    return constant * moment.gamma_bar3 / math.sqrt(n)


def cdf_table_csv(law):
    """CSV with columns t, F(t), Phi(t), gap for every atom of ``law``."""
    t, F, F_left, Phi = _cdf_columns(law)
    gap = np.maximum(np.abs(F - Phi), np.abs(F_left - Phi))
    buf = io.StringIO()
    buf.write("t,F(t),Phi(t),gap\n")
    for row in zip(t.tolist(), F.tolist(), Phi.tolist(), gap.tolist()):
        buf.write(",".join(repr(v) for v in row) + "\n")
    return buf.getvalue()
