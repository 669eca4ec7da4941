import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.core import (
    DomainSpec,
    ModelConfig,
    PointVec,
    WeightSpec,
    monomial_jet,
    multiindex_count,
    multiindex_enumerate,
    validate_point,
)
from bergman_lab.errors import ConfigError, OutsideDomain, ZeroVector


class TestEnumeration:
    def test_one_variable(self):
        assert multiindex_enumerate(1, 2) == [(0,), (1,), (2,)]

    def test_two_variables_degree_one(self):
        assert multiindex_enumerate(2, 1) == [(0, 0), (1, 0), (0, 1)]

    def test_two_variables_degree_two_count(self):
        assert len(multiindex_enumerate(2, 2)) == 6  # C(4, 2)

    @given(st.integers(1, 4), st.integers(0, 8))
    @settings(max_examples=40)
    def test_count_and_grading(self, n, N):
        idx = multiindex_enumerate(n, N)
        assert len(idx) == multiindex_count(n, N) == math.comb(N + n, n)
        degrees = [sum(a) for a in idx]
        assert degrees == sorted(degrees)  # graded: degree never decreases
        assert len(set(idx)) == len(idx)

    def test_within_degree_order_is_lexicographic_descending(self):
        idx = [a for a in multiindex_enumerate(3, 2) if sum(a) == 2]
        assert idx == sorted(idx, reverse=True)

    def test_bad_arguments(self):
        with pytest.raises(ConfigError):
            multiindex_enumerate(0, 3)
        with pytest.raises(ConfigError):
            multiindex_enumerate(2, -1)


class TestMonomialJet:
    def test_first_derivative(self):
        jet = monomial_jet((2,), (1.0,), order=1)
        assert jet[(1,)] == pytest.approx(2.0)  # d/dz z^2 at 1

    def test_derivative_in_absent_variable(self):
        jet = monomial_jet((1, 0), (0.0, 0.0), order=1)
        assert jet[(0, 1)] == 0

    def test_second_derivative_is_constant(self):
        jet = monomial_jet((2,), (0.5,), order=2)
        assert jet[(2,)] == pytest.approx(2.0)

    def test_zero_point_powers(self):
        jet = monomial_jet((1, 1), (0.0, 0.0), order=2)
        assert jet[(0, 0)] == 0
        assert jet[(1, 1)] == pytest.approx(1.0)

    def test_forward_difference_slope(self):
        # one-sided differences converge at first order: log-log slope ~ 1
        alpha = (3, 2)
        p = np.array([0.7 + 0.2j, -0.4 + 0.5j])
        jet = monomial_jet(alpha, p, order=1)
        e0 = np.array([1.0, 0.0], dtype=complex)

        def mono(z):
            return z[0] ** 3 * z[1] ** 2

        hs = [1e-2, 1e-3, 1e-4, 1e-5]
        errs = [abs((mono(p + h * e0) - mono(p)) / h - jet[(1, 0)])
                for h in hs]
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert slope >= 0.9


class TestDomains:
    def test_ball_gauge(self):
        ball = DomainSpec.ball(2, 2.0)
        assert ball.gauge((1.0, 1.0)) == pytest.approx(math.sqrt(2) / 2)

    def test_polydisc_gauge(self):
        pd = DomainSpec.polydisc((1.0, 0.5))
        assert pd.gauge((0.3, 0.3)) == pytest.approx(0.6)

    def test_ellipsoid_gauge_uniform_exponent(self):
        ell = DomainSpec.ellipsoid((2.0, 2.0), (1.0, 1.0))
        # boundary point: |z1|^4 + |z2|^4 = 1
        t = 0.5 ** 0.25
        assert ell.gauge((t, t)) == pytest.approx(1.0, rel=1e-12)

    def test_ellipsoid_gauge_mixed_exponents_bisection(self):
        ell = DomainSpec.ellipsoid((1.0, 3.0), (1.0, 0.8))
        z = (0.4 + 0.1j, 0.3 - 0.2j)
        lam = ell.gauge(z)
        t = np.abs(np.asarray(z)) / np.array([1.0, 0.8])
        residual = (t[0] / lam) ** 2 + (t[1] / lam) ** 6
        assert residual == pytest.approx(1.0, abs=1e-10)

    def test_radial_limit_nests(self):
        ball = DomainSpec.ball(2, 1.0)
        outer = np.array([0.6])
        assert ball.radial_limit([outer], 1)[0] == pytest.approx(0.8)

    def test_validation(self):
        with pytest.raises(ConfigError):
            DomainSpec.ball(2, -1.0)
        with pytest.raises(ConfigError):
            DomainSpec.polydisc(())
        with pytest.raises(ConfigError):
            DomainSpec.ellipsoid((0.5, 1.0), (1.0, 1.0))  # exponent < 1

    def test_validate_point(self):
        ball = DomainSpec.ball(1, 1.0)
        validate_point(ball, (0.5,))
        with pytest.raises(OutsideDomain):
            validate_point(ball, (1.0,))
        with pytest.raises(OutsideDomain):
            validate_point(ball, (1.0 - 1e-12,))  # inside the 1e-9 margin


class TestWeights:
    def test_ball_ke_density_level_two(self):
        # density (1/2)(1-|z|^2)^2 on the unit disc
        w = WeightSpec.ball_ke(2, 1.0)
        ball = DomainSpec.ball(1, 1.0)
        t = np.array([[0.5]])
        assert w.density(ball, t)[0] == pytest.approx(0.5 * (1 - 0.25) ** 2)

    def test_ball_ke_level_one_is_unweighted(self):
        w = WeightSpec.ball_ke(1, 1.0)
        ball = DomainSpec.ball(1, 1.0)
        assert w.density(ball, np.array([[0.7]]))[0] == pytest.approx(1.0)

    def test_custom_radial_gets_normalised_radii(self):
        seen = {}

        def profile(u):
            seen["u"] = u.copy()
            return np.ones(u.shape[:-1])

        w = WeightSpec.custom_radial(profile)
        pd = DomainSpec.polydisc((2.0, 4.0))
        w.density(pd, np.array([[1.0, 1.0]]))
        np.testing.assert_allclose(seen["u"], [[0.5, 0.25]])

    def test_validation(self):
        with pytest.raises(ConfigError):
            WeightSpec.radial_power(-1.0)
        with pytest.raises(ConfigError):
            WeightSpec("ball_ke", level=0)
        with pytest.raises(ConfigError):
            WeightSpec("custom_radial")


class TestModelConfig:
    def _ball(self):
        return DomainSpec.ball(1, 1.0)

    def test_defaults_valid(self):
        cfg = ModelConfig(self._ball(), WeightSpec.unweighted())
        assert cfg.level == 1

    def test_truncation_floor(self):
        with pytest.raises(ConfigError):
            ModelConfig(self._ball(), WeightSpec.unweighted(),
                        truncation_degree=1)

    def test_tolerance_range(self):
        with pytest.raises(ConfigError):
            ModelConfig(self._ball(), WeightSpec.unweighted(), tolerance=1.0)

    def test_ke_radius_must_match_domain(self):
        with pytest.raises(ConfigError):
            ModelConfig(self._ball(), WeightSpec.ball_ke(2, 0.5))

    def test_ball_weights_rejected_elsewhere(self):
        with pytest.raises(ConfigError):
            ModelConfig(DomainSpec.polydisc((1.0,)), WeightSpec.radial_power(1.0))

    def test_cap_not_below_start(self):
        with pytest.raises(ConfigError):
            ModelConfig(self._ball(), WeightSpec.unweighted(),
                        truncation_degree=40, max_degree=30)


def test_pointvec_coercion():
    pv = PointVec.of([0.1, 0.2j], X=[1, 0])
    assert pv.point == (0.1 + 0j, 0.2j)
    assert pv.X == (1 + 0j, 0j)
    assert pv.Y is None
