import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belab import laws
from belab.errors import DegenerateLaw, PreconditionViolated


def atoms(law):
    return dict(zip(law.values.tolist(), law.weights.tolist()))


def test_standardize_bernoulli_quarter():
    law = laws.standardize(laws.bernoulli(0.25))
    np.testing.assert_allclose(law.values, [-1 / math.sqrt(3), math.sqrt(3)], atol=1e-14)
    np.testing.assert_allclose(law.weights, [0.75, 0.25], atol=1e-15)
    assert law.is_standardized


def test_standardize_rademacher_unchanged():
    rad = laws.rademacher()
    assert laws.standardize(rad) == rad


def test_standardize_point_mass_is_degenerate():
    with pytest.raises(DegenerateLaw):
        laws.standardize(laws.DiscreteLaw.point_mass(0.0))


def test_moments_presets():
    p = laws.moments(laws.rademacher())
    assert (p.gamma3, p.gamma_bar3, p.delta4) == (0.0, 1.0, 1.0)

    p = laws.moments(laws.threepoint(math.sqrt(2), 0.25))
    assert p.gamma3 == pytest.approx(0, abs=1e-15)
    assert p.gamma_bar3 == pytest.approx(math.sqrt(2), abs=1e-14)
    assert p.delta4 == pytest.approx(2, abs=1e-14)

    p = laws.moments(laws.standardize(laws.bernoulli(0.25)))
    assert p.gamma3 == pytest.approx(2 / math.sqrt(3), abs=1e-13)
    assert p.delta4 == pytest.approx(7 / 3, abs=1e-13)


def test_moments_exact_rational_oracle():
    # Bernoulli(p) standardized: gamma3 = (1-2p)/sqrt(pq), delta4 = (1-3pq)/(pq).
    for p in (Fraction(1, 5), Fraction(1, 3), Fraction(2, 7)):
        q = 1 - p
        prof = laws.moments(laws.standardize(laws.bernoulli(float(p))))
        assert prof.gamma3 == pytest.approx(float((1 - 2 * p)) / math.sqrt(p * q), rel=1e-12)
        assert prof.delta4 == pytest.approx(float((1 - 3 * p * q) / (p * q)), rel=1e-12)


def test_moments_requires_standardized():
    with pytest.raises(PreconditionViolated):
        laws.moments(laws.bernoulli(0.5))


def test_charfun_values():
    xi = np.linspace(-7, 7, 41)
    np.testing.assert_allclose(laws.charfun(laws.rademacher(), xi), np.cos(xi), atol=1e-15)
    tp = laws.threepoint(math.sqrt(2), 0.25)
    np.testing.assert_allclose(laws.charfun(tp, xi), 0.5 + 0.5 * np.cos(math.sqrt(2) * xi),
                               atol=1e-15)
    law = laws.standardize(laws.bernoulli(0.3))
    assert laws.charfun(law, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_symmetrize_examples():
    assert atoms(laws.symmetrize(laws.rademacher())) == {-2.0: 0.25, 0.0: 0.5, 2.0: 0.25}
    assert atoms(laws.symmetrize(laws.DiscreteLaw.point_mass(3.0))) == {0.0: 1.0}
    s = laws.symmetrize(laws.standardize(laws.bernoulli(0.25)))
    gap = math.sqrt(3) + 1 / math.sqrt(3)
    np.testing.assert_allclose(s.values, [-gap, 0, gap], atol=1e-14)
    np.testing.assert_allclose(s.weights, [3 / 16, 10 / 16, 3 / 16], atol=1e-15)
    assert s.is_symmetric


def test_paley_zygmund_examples():
    assert laws.paley_zygmund_check(laws.DiscreteLaw.point_mass(1.0), 1) == (True, True)
    law = laws.DiscreteLaw.from_atoms([0.5, 2.0], [2 / 3, 1 / 3])
    assert laws.paley_zygmund_check(law, 2) == (True, True)
    law = laws.DiscreteLaw.from_atoms([0.0, 2.0], [0.5, 0.5])
    assert laws.paley_zygmund_check(law, 2) == (True, True)


def test_paley_zygmund_preconditions():
    with pytest.raises(PreconditionViolated):
        laws.paley_zygmund_check(laws.rademacher(), 2)
    with pytest.raises(PreconditionViolated):
        laws.paley_zygmund_check(laws.DiscreteLaw.from_atoms([0.0, 2.0], [0.5, 0.5]), 1.5)


def test_parse_law_forms():
    assert laws.parse_law("rademacher") == laws.rademacher()
    tp = laws.parse_law("threepoint(sqrt(2), 0.25)")
    assert laws.moments(tp).delta4 == pytest.approx(2)
    b = laws.parse_law({"values": [0, 1], "weights": [0.75, 0.25]})
    assert b == laws.parse_law("bernoulli(0.25)")
    assert laws.parse_law([[0, 0.75], [1, 0.25]]) == b
    with pytest.raises(ValueError):
        laws.parse_law("cauchy(1)")


def test_merge_atoms_combines_close_values():
    v, w = laws.merge_atoms(np.array([1.0, 1.0 + 1e-14, 0.0]), np.array([0.25, 0.25, 0.5]))
    assert v.tolist() == [0.0, 1.0]
    assert w.tolist() == [0.5, 0.5]


finite_laws = st.lists(
    st.tuples(st.floats(-5, 5, allow_nan=False), st.floats(0.01, 1)), min_size=2, max_size=6,
).map(lambda pairs: laws.DiscreteLaw.from_atoms(
    [p[0] for p in pairs], np.array([p[1] for p in pairs]) / math.fsum(p[1] for p in pairs)))


@settings(max_examples=80, deadline=None)
@given(finite_laws)
def test_standardized_laws_satisfy_moment_chain(law):
    if len(law) < 2 or law.variance < 1e-6:
        return
    s = laws.standardize(law)
    assert abs(s.mean) < 1e-12 and abs(s.variance - 1) < 1e-12
    assert laws.moments(s).chain_holds(tol=1e-10)


@settings(max_examples=80, deadline=None)
@given(finite_laws, st.floats(-30, 30))
def test_symmetrized_charfun_is_squared_modulus(law, xi):
    lhs = laws.charfun(laws.symmetrize(law), xi)
    assert abs(lhs - abs(laws.charfun(law, xi)) ** 2) < 1e-12
    assert abs(lhs.imag) < 1e-12
