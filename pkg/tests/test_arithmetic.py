import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belab import arithmetic as ar
from belab import laws
from belab.errors import BadDimension


def test_dist_to_lattice_examples():
    assert ar.dist_to_lattice(np.array([0.5, 0.5])) == pytest.approx(math.sqrt(2) / 2)
    assert ar.dist_to_lattice(np.array([1.0, 2.0, 3.0])) == 0.0
    assert ar.dist_to_lattice(np.array([0.3, -0.4])) == pytest.approx(0.5)


def test_theta_zero_shape_and_power_sums():
    np.testing.assert_allclose(ar.theta_zero(4).coords,
                               np.array([1, math.sqrt(2), -1, -math.sqrt(2)]) / math.sqrt(6),
                               atol=1e-15)
    assert np.sum(ar.theta_zero(4).coords ** 3) == pytest.approx(0, abs=1e-15)
    for n in (8, 16, 64):
        assert np.sum(ar.theta_zero(n).coords ** 4) == pytest.approx(10 / (9 * n), rel=1e-12)
    with pytest.raises(BadDimension):
        ar.theta_zero(6)


def test_coefficient_vector_validation():
    with pytest.raises(ValueError):
        ar.CoefficientVector(np.array([1.0, 1.0]))
    v = ar.CoefficientVector.normalized([3.0, 4.0])
    assert v.coords.tolist() == [0.6, 0.8]
    assert v.digest() == ar.CoefficientVector.normalized([6.0, 8.0]).digest()


def test_conditions_i_ii():
    r_i, r_ii = ar.check_conditions_i_ii(ar.theta_zero(8))
    assert r_i == pytest.approx(0, abs=1e-13)
    assert r_ii == pytest.approx(10 / 9, rel=1e-12)
    assert ar.check_conditions_i_ii(ar.unit_theta(5)) == pytest.approx((5, 5))
    r_i, r_ii = ar.check_conditions_i_ii(ar.uniform_theta(16))
    assert r_i == pytest.approx(4, rel=1e-12)
    assert r_ii == pytest.approx(1, rel=1e-12)


def test_uniform_theta_is_refuted_at_sqrt_n():
    for R in (40, 1e6):
        cert = ar.certify_condition_iii(ar.uniform_theta(16), R)
        assert cert.refuted
        assert cert.counterexample_xi == 4.0


def test_unit_theta_refuted_at_one():
    cert = ar.certify_condition_iii(ar.unit_theta(6), 1e3)
    assert cert.refuted and cert.counterexample_xi == 1.0


def test_theta_zero_certified_and_sound_on_dense_probe():
    theta = ar.theta_zero(8)
    cert = ar.certify_condition_iii(theta, 40)
    assert cert.certified
    # Independent check: random off-grid points must satisfy the inequality.
    rng = np.random.default_rng(12345)
    xi = rng.uniform(1e-6, 8, size=100_000)
    d = ar.dist_to_lattice(np.multiply.outer(xi, theta.coords))
    assert np.all(d >= ar.condition_rhs(xi, 8, 40))


def test_certificate_json_round_trip():
    cert = ar.certify_condition_iii(ar.uniform_theta(4), 10)
    d = cert.to_dict()
    assert d["outcome"] == "Refuted" and d["counterexample_xi"] == 2.0
    assert d["theta_digest"] == ar.uniform_theta(4).digest()


def test_minimal_certified_R():
    upper, lower = ar.minimal_certified_R(ar.uniform_theta(16))
    assert upper == math.inf and lower > 0
    ups = []
    for n in (8, 16, 32, 64):
        upper, _ = ar.minimal_certified_R(ar.theta_zero(n))
        assert upper >= 10 / 9 - 1e-12
        ups.append(upper)
    assert max(ups) <= 2 * min(ups)


def test_s_function_symmetrized_rademacher():
    theta = ar.theta_zero(8)
    Y = laws.symmetrize(laws.rademacher())
    xi = np.linspace(-20, 20, 101)
    expected = np.sqrt(0.5 * ar.dist_to_lattice(np.multiply.outer(xi / math.pi, theta.coords)) ** 2)
    np.testing.assert_allclose(ar.s_function(theta, Y, xi), expected, atol=1e-14)
    assert ar.s_function(theta, Y, 0.0) == 0.0


def test_s_function_lipschitz_by_finite_differences():
    theta = ar.theta_zero(12)
    Y = laws.symmetrize(laws.standardize(laws.bernoulli(0.3)))
    xi = np.linspace(0, 50, 20001)
    s = ar.s_function(theta, Y, xi)
    # |S(a) - S(b)| <= |a - b| * sqrt(E Y^2) / (2 pi)
    lip = math.sqrt(Y.moment(2)) / (2 * math.pi)
    assert np.max(np.abs(np.diff(s))) <= lip * (xi[1] - xi[0]) + 1e-12


def test_tail_integral_trivial_cases():
    # Y = 0 makes S vanish identically, so the integrand is 1/xi.
    Y0 = laws.DiscreteLaw.point_mass(0.0)
    T = 50.0
    value = ar.tail_integral_check(ar.unit_theta(3), Y0, T)
    assert value == pytest.approx(5 / 6 * math.log(T), rel=1e-10)
    Y = laws.symmetrize(laws.rademacher())
    assert ar.tail_integral_check(ar.theta_zero(8), Y, T) <= 5 / 6 * math.log(T)


def test_tail_integral_matches_dense_riemann_sum():
    theta = ar.theta_zero(8)
    Y = laws.symmetrize(laws.rademacher())
    T = 30.0
    x = np.linspace(T ** (1 / 6), T, 2_000_001)
    f = np.exp(-4 * ar.s_function(theta, Y, x) ** 2) / x
    ref = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(x)))
    assert ar.tail_integral_check(theta, Y, T) == pytest.approx(ref, abs=1e-7)


def test_sqrt2_diophantine():
    xi = np.linspace(1e-3, 1 / (2 * math.sqrt(2)), 50)
    d2 = ar.dist_to_lattice(xi[:, None]) ** 2 + ar.dist_to_lattice((math.sqrt(2) * xi)[:, None]) ** 2
    np.testing.assert_allclose(d2, 3 * xi ** 2, rtol=1e-12)
    c = ar.sqrt2_diophantine_check(100.0)
    assert 0 < c <= (math.sqrt(2) - 1) ** 2 + 1e-15


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.floats(-40, 40), st.floats(-40, 40), st.integers(0, 2**32))
def test_line_distance_lipschitz(n, x1, x2, seed):
    theta = ar.CoefficientVector.normalized(np.random.default_rng(seed).standard_normal(n))
    d = ar.line_distance(theta, np.array([x1, x2]))
    assert abs(d[0] - d[1]) <= abs(x1 - x2) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_lattice_distance_triangle(x, y):
    x, y = np.array(x), np.array(y)
    assert ar.dist_to_lattice(x + y) <= ar.dist_to_lattice(x) + ar.dist_to_lattice(y) + 1e-12
