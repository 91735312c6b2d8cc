"""Finitely supported laws, their moments and characteristic functions."""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLaw, PreconditionViolated

MERGE_TOL = 1e-12
STANDARD_TOL = 1e-12


def merge_atoms(values, weights, tol=MERGE_TOL):
    """Sort atoms and merge runs whose consecutive gaps are ``<= tol``.

    A merged atom keeps the value of the smallest member of its run.
    """
    values = np.asarray(values, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    order = np.argsort(values, kind="stable")
    values = values[order]
    weights = weights[order]
    if len(values) == 0:
        return values, weights
    starts = np.flatnonzero(np.r_[True, np.diff(values) > tol])
    return values[starts], np.add.reduceat(weights, starts)


def fsum_dot(weights, values):
    """Compensated ``sum(weights * values)``."""
    return math.fsum((np.asarray(weights) * np.asarray(values)).tolist())


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    """A probability law with finitely many atoms.

    Construct through :meth:`from_atoms` to get the canonical form: values
    strictly increasing, near-duplicates merged, zero-weight atoms dropped.
    The arrays are read-only.
    """

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def from_atoms(cls, values, weights, tol=MERGE_TOL):
        values, weights = merge_atoms(values, weights, tol)
        if np.any(weights < 0):
            raise ValueError("negative weight")
        keep = weights > 0
        values, weights = values[keep], weights[keep]
        if len(values) == 0:
            raise ValueError("law has no atoms")
        total = math.fsum(weights.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, not 1")
        return cls(values.copy(), weights.copy())

    @classmethod
    def point_mass(cls, value=0.0):
        return cls.from_atoms([value], [1.0])

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, DiscreteLaw):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.values.tobytes(), self.weights.tobytes()))

    def __repr__(self):
        atoms = ", ".join(f"{v:.6g}: {w:.6g}" for v, w in zip(self.values, self.weights))
        return f"DiscreteLaw({{{atoms}}})"

    @property
    def mean(self):
        return fsum_dot(self.weights, self.values)

    @property
    def variance(self):
        mu = self.mean
        return fsum_dot(self.weights, (self.values - mu) ** 2)

    def moment(self, k, absolute=False):
        x = np.abs(self.values) if absolute else self.values
        return fsum_dot(self.weights, x ** k)

    @property
    def is_standardized(self):
        return abs(self.mean) <= STANDARD_TOL and abs(self.variance - 1) <= STANDARD_TOL

    @property
    def is_symmetric(self):
        return (np.allclose(self.values, -self.values[::-1], rtol=0, atol=1e-12)
                and np.allclose(self.weights, self.weights[::-1], rtol=0, atol=1e-15))

    def cdf(self, t):
        """P(X <= t), vectorized over ``t``."""
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.values, t, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def scaled(self, factor):
        return DiscreteLaw.from_atoms(self.values * factor, self.weights)

    def to_dict(self):
        return {"values": self.values.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True)
class MomentProfile:
    gamma3: float      # E X^3
    gamma_bar3: float  # E |X|^3
    delta4: float      # E X^4

    @property
    def gamma(self):
        return math.copysign(abs(self.gamma3) ** (1 / 3), self.gamma3)

    @property
    def gamma_bar(self):
        return self.gamma_bar3 ** (1 / 3)

    @property
    def delta(self):
        return self.delta4 ** 0.25

    def chain_holds(self, tol=1e-12):
        """|gamma| <= gamma_bar <= delta^(2/3), gamma_bar >= 1, delta >= 1."""
        g, gb, d = abs(self.gamma), self.gamma_bar, self.delta
        return (g <= gb + tol and gb <= d ** (2 / 3) + tol
                and gb >= 1 - tol and d >= 1 - tol)


def standardize(law):
    """Return the law of (X - mean) / sd."""
    var = law.variance
    if len(law) < 2 or var <= 1e-14:
        raise DegenerateLaw(f"variance {var!r} is too small to standardize")
    mu = law.mean
    sd = math.sqrt(var)
    out = DiscreteLaw.from_atoms((law.values - mu) / sd, law.weights)
    # One polishing pass removes the rounding left by the first affine map.
    mu2, var2 = out.mean, out.variance
    if abs(mu2) > 0 or var2 != 1:
        out = DiscreteLaw.from_atoms((out.values - mu2) / math.sqrt(var2), out.weights)
    return out


def moments(law):
    if not law.is_standardized:
        raise PreconditionViolated("moments() expects a standardized law")
    return MomentProfile(
        gamma3=law.moment(3),
        gamma_bar3=law.moment(3, absolute=True),
        delta4=law.moment(4),
    )


def charfun(law, xi):
    """E exp(-i xi X), vectorized over ``xi``."""
    xi = np.asarray(xi, dtype=float)
    phase = np.multiply.outer(xi, law.values)
    return np.exp(-1j * phase) @ law.weights


def symmetrize(law):
    """Law of X - X' for an independent copy X'."""
    diffs = np.subtract.outer(law.values, law.values)
    probs = np.multiply.outer(law.weights, law.weights)
    values, weights = merge_atoms(diffs, probs)
    # Force exact symmetry so that the merged representative does not drift.
    values = 0.5 * (values - values[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return DiscreteLaw.from_atoms(values, weights)


def paley_zygmund_check(law, M):
    """Evaluate both Paley-Zygmund type inequalities for a nonnegative law.

    Returns ``(P(Y >= 1/2) >= 1/(4M), E[Y; Y <= 5M] >= 4/5)``.
    """
    if np.any(law.values < 0):
        raise PreconditionViolated("law must be nonnegative")
    if M < 1:
        raise PreconditionViolated("M must be >= 1")
    if abs(law.mean - 1) > 1e-12:
        raise PreconditionViolated(f"mean is {law.mean!r}, expected 1")
    second = law.moment(2)
    if second > M + 1e-12:
        raise PreconditionViolated(f"E Y^2 = {second!r} exceeds M = {M!r}")
    upper = law.values >= 0.5
    part_i = math.fsum(law.weights[upper].tolist()) >= 1 / (4 * M)
    low = law.values <= 5 * M
    part_ii = fsum_dot(law.weights[low], law.values[low]) >= 0.8
    return part_i, part_ii


# Presets -----------------------------------------------------------------

def rademacher():
    return DiscreteLaw.from_atoms([-1.0, 1.0], [0.5, 0.5])


def bernoulli(p):
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return DiscreteLaw.from_atoms([0.0, 1.0], [1 - p, p])


def threepoint(a, p):
    """{-a: p, 0: 1 - 2p, a: p}."""
    if not (a > 0 and 0 < p <= 0.5):
        raise ValueError("threepoint needs a > 0 and 0 < p <= 1/2")
    return DiscreteLaw.from_atoms([-a, 0.0, a], [p, 1 - 2 * p, p])


_PRESET = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$")


def parse_law(spec):
    """Build a standardized law from a preset string or an explicit atom list.

    Accepted forms: ``"rademacher"``, ``"bernoulli(p)"``, ``"threepoint(a,p)"``,
    ``{"values": [...], "weights": [...]}`` or ``[[value, weight], ...]``.
    Numeric arguments may use ``sqrt(x)``.
    """
    if isinstance(spec, DiscreteLaw):
        law = spec
    elif isinstance(spec, str):
        m = _PRESET.match(spec)
        if not m:
            raise ValueError(f"cannot parse law {spec!r}")
        name = m.group(1).lower()
        args = [_number(s) for s in m.group(2).split(",")] if m.group(2) else []
        makers = {"rademacher": (rademacher, 0), "bernoulli": (bernoulli, 1),
                  "threepoint": (threepoint, 2)}
        if name not in makers or makers[name][1] != len(args):
            raise ValueError(f"unknown law preset {spec!r}")
        law = makers[name][0](*args)
    elif isinstance(spec, dict):
        law = DiscreteLaw.from_atoms(spec["values"], spec["weights"])
    else:
        pairs = np.asarray(spec, dtype=float)
        law = DiscreteLaw.from_atoms(pairs[:, 0], pairs[:, 1])
    return law if law.is_standardized else standardize(law)


def _number(text):
    text = text.strip()
    m = re.fullmatch(r"sqrt\(([^)]*)\)", text)
    if m:
        return math.sqrt(float(m.group(1)))
    return float(text)
