import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.ball_oracle import ball_automorphism, ball_closed_forms, ball_constant
from bergman_lab.core import DomainSpec, ModelConfig, WeightSpec
from bergman_lab.errors import (
    NotPositiveDefinite,
    RegionGuard,
    TruncationInsufficient,
    ZeroVector,
)
from bergman_lab.kernel_engine import (
    BergmanModel,
    KernelJet,
    _bisectional_from_jet,
    _jet_fixed,
    _metric_from_jet,
    build_model,
    canonical_functions,
    curvature_bisectional,
    inner_product,
    kernel_jet,
    length2,
    metric,
    ricci,
)

from oracles import fd_apply, fd_curvature, jet_ops, polydisc_metric_fn


def disc_model(m=1, N=20, cap=80):
    weight = WeightSpec.ball_ke(m, 1.0) if m > 1 else WeightSpec.unweighted()
    return build_model(ModelConfig(DomainSpec.ball(1, 1.0), weight,
                                   truncation_degree=N, max_degree=cap))


def ball2_model(m=1, N=30, cap=80):
    weight = WeightSpec.ball_ke(m, 1.0) if m > 1 else WeightSpec.unweighted()
    return build_model(ModelConfig(DomainSpec.ball(2, 1.0), weight,
                                   truncation_degree=N, max_degree=cap))


def bidisc_model(N=30, cap=80):
    return build_model(ModelConfig(DomainSpec.polydisc((1.0, 1.0)),
                                   WeightSpec.unweighted(),
                                   truncation_degree=N, max_degree=cap))


class TestBuildModel:
    def test_basis_counts(self):
        assert disc_model(N=8).basis_size == 9
        cfg = ModelConfig(DomainSpec.ball(2, 1.0), WeightSpec.ball_ke(2, 1.0),
                          truncation_degree=6)
        assert build_model(cfg).basis_size == 28
        cfg = ModelConfig(DomainSpec.polydisc((1.0, 1.0)), WeightSpec.unweighted(),
                          truncation_degree=4)
        assert build_model(cfg).basis_size == 15


class TestKernelJet:
    def test_disc_origin(self):
        jet = kernel_jet(disc_model(), (0.0,))
        assert jet.value == pytest.approx(1 / math.pi, rel=1e-14)

    def test_disc_half_radius_squared(self):
        p = (math.sqrt(0.5),)
        jet = kernel_jet(disc_model(N=60, cap=120), p, degree=60)
        assert jet.value == pytest.approx(4 / math.pi, abs=1e-8)

    def test_origin_off_diagonal_entries_vanish(self):
        jet = kernel_jet(ball2_model(), (0.0, 0.0))
        for (a, b), v in jet.derivs.items():
            if a != b:
                assert v == 0

    @given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))
    @settings(max_examples=15, deadline=None)
    def test_hermitian_symmetry(self, x, y):
        if x * x + y * y > 0.8:
            x, y = x / 2, y / 2
        jet = kernel_jet(disc_model(m=2), (complex(x, y),), degree=25)
        for (a, b), v in jet.derivs.items():
            assert v == np.conj(jet.derivs[(b, a)])

    def test_truncation_monotone_in_degree(self):
        model = disc_model(N=10, cap=80).extended(40)
        p = np.array([0.6 + 0.2j])
        values = [_jet_fixed(model, p, d).value for d in (5, 10, 20, 40)]
        assert values == sorted(values)

    def test_finite_difference_consistency_order(self):
        # every jet entry should match second-order differencing of K(z)
        model = disc_model(m=2, N=50, cap=120)
        p = np.array([0.25 + 0.1j])
        jet = kernel_jet(model, p, degree=50)

        def K(z):
            return _jet_fixed(model, z, 50).value

        for a, b in [((1,), (1,)), ((2,), (1,)), ((2,), (2,))]:
            ops = jet_ops(a, b)
            errs = [abs(fd_apply(K, p, ops, h) - jet.entry(a, b))
                    for h in (0.05, 0.025)]
            order = math.log2(errs[0] / errs[1])
            assert order >= 1.8, (a, b, order)

    def test_two_dim_jet_against_differencing(self):
        model = ball2_model(m=2, N=40, cap=80)
        p = np.array([0.2 + 0.1j, -0.15 + 0.05j])
        jet = kernel_jet(model, p, degree=40)

        def K(z):
            return _jet_fixed(model, z, 40).value

        a, b = (1, 1), (0, 1)
        got = fd_apply(K, p, jet_ops(a, b), 0.02)
        assert got == pytest.approx(jet.entry(a, b), rel=2e-3)

    def test_region_guard(self):
        model = disc_model()
        with pytest.raises(RegionGuard):
            kernel_jet(model, (0.96,))
        jet = kernel_jet(model, (0.96,), degree=40, allow_near_boundary=True)
        assert jet.value > 0

    def test_truncation_insufficient_near_boundary(self):
        model = build_model(ModelConfig(DomainSpec.ball(1, 1.0),
                                        WeightSpec.unweighted(),
                                        truncation_degree=20, max_degree=30))
        with pytest.raises(TruncationInsufficient):
            kernel_jet(model, (0.93,))


class TestMetric:
    def test_ball2_origin(self):
        md = metric(ball2_model(), (0.0, 0.0))
        np.testing.assert_allclose(md.G, 3 * np.eye(2), atol=1e-13)
        assert md.det_G == pytest.approx(9.0, rel=1e-12)

    def test_disc_ke_scaled_radius(self):
        r = 0.7
        cfg = ModelConfig(DomainSpec.ball(1, r), WeightSpec.ball_ke(2, r),
                          truncation_degree=20, max_degree=80)
        md = metric(build_model(cfg), (0.0,))
        assert md.G[0, 0].real == pytest.approx(4 / r ** 2, rel=1e-12)

    def test_bidisc_origin(self):
        md = metric(bidisc_model(), (0.0, 0.0))
        np.testing.assert_allclose(md.G, 2 * np.eye(2), atol=1e-13)

    def test_inverse_consistency(self):
        md = metric(ball2_model(m=2), (0.2 + 0.1j, -0.3))
        np.testing.assert_allclose(md.G @ md.G_inverse, np.eye(2), atol=1e-10)

    def test_closed_form_off_origin(self):
        p = np.array([0.3 - 0.2j, 0.1 + 0.25j])
        md = metric(ball2_model(m=2, N=50, cap=120), p)
        ref = ball_closed_forms(1.0, 2, 2, p)
        assert np.linalg.norm(md.G - ref.G) / np.linalg.norm(ref.G) < 1e-10

    def test_not_positive_definite_is_reported(self):
        # a doctored jet whose log-Hessian is negative must be rejected
        z, u = (0,), (1,)
        jet = KernelJet((0j,), {(z, z): 1.0 + 0j, (u, z): 2.0 + 0j,
                                (z, u): 2.0 + 0j, (u, u): 1.0 + 0j}, 0)
        with pytest.raises(NotPositiveDefinite):
            _metric_from_jet(jet)


class TestInnerProduct:
    def test_values(self):
        md = metric(ball2_model(), (0.0, 0.0))
        assert inner_product(md, (1, 0), (1, 0)) == pytest.approx(3.0)
        assert inner_product(md, (1, 0), (0, 1)) == pytest.approx(0.0, abs=1e-14)

    def test_bidisc_diagonal_vector(self):
        md = metric(bidisc_model(), (0.0, 0.0))
        assert length2(md, (1, 1)) == pytest.approx(4.0)

    def test_zero_vector_rejected(self):
        md = metric(disc_model(), (0.0,))
        with pytest.raises(ZeroVector):
            inner_product(md, (0,), (1,))


class TestCurvature:
    def test_disc_holomorphic(self):
        rep = curvature_bisectional(disc_model(), (0.0,), (1,), (1,))
        assert rep.H == pytest.approx(-1.0, abs=1e-12)
        assert rep.B == rep.H
        assert rep.S == 0.0
        assert rep.T == pytest.approx(3.0, abs=1e-12)

    def test_ball2_orthogonal_pair(self):
        rep = curvature_bisectional(ball2_model(), (0.0, 0.0), (1, 0), (0, 1))
        assert rep.B == pytest.approx(-1 / 3, abs=1e-12)
        assert rep.S == pytest.approx(1.0, abs=1e-13)

    def test_bidisc_cross_directions_flat(self):
        rep = curvature_bisectional(bidisc_model(), (0.0, 0.0), (1, 0), (0, 1))
        assert rep.B == pytest.approx(0.0, abs=1e-12)

    def test_bidisc_off_origin_against_fd_oracle(self):
        rng = np.random.default_rng(11)
        model = bidisc_model(N=40, cap=120)
        fn = polydisc_metric_fn((1.0, 1.0))
        for _ in range(3):
            p = 0.35 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
            p /= max(1.0, 2.5 * np.max(np.abs(p)))
            X = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            Y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            rep = curvature_bisectional(model, p, X, Y)
            ref = fd_curvature(fn, p, X, Y, h=1e-3)
            assert rep.B == pytest.approx(ref, abs=1e-4)

    def test_ball_off_origin_against_pullback(self):
        # closed-form origin value along the automorphism pushforward
        model = ball2_model(m=2, N=50, cap=120)
        p = np.array([0.2 + 0.1j, -0.1 + 0.05j])
        X = np.array([0.3 - 0.2j, 0.7 + 0.1j])
        Y = np.array([-0.5 + 0.4j, 0.2 + 0.6j])
        F = ball_automorphism(p)
        J = F.jacobian(p)
        ref = ball_closed_forms(1.0, 2, 2, None, J @ X, J @ Y)
        rep = curvature_bisectional(model, p, X, Y)
        assert rep.B == pytest.approx(ref.B, abs=1e-9)

    def test_symmetry_in_the_two_directions(self):
        model = ball2_model(m=2, N=40, cap=120)
        p = (0.2 + 0.1j, -0.25)
        X, Y = (0.4, -0.3j), (0.1 - 0.2j, 0.8)
        forward = curvature_bisectional(model, p, X, Y).B
        backward = curvature_bisectional(model, p, Y, X).B
        assert abs(forward - backward) <= 1e-9

    @given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10,
                              allow_infinity=False, allow_nan=False),
           st.complex_numbers(min_magnitude=0.1, max_magnitude=10,
                              allow_infinity=False, allow_nan=False))
    @settings(max_examples=10, deadline=None)
    def test_scale_invariance(self, c, d):
        model = ball2_model(N=20, cap=80)
        p = (0.1, 0.2j)
        X, Y = np.array([1.0, 0.5j]), np.array([0.2, -1.0])
        base = curvature_bisectional(model, p, X, Y, degree=20)
        scaled = curvature_bisectional(model, p, c * X, d * Y, degree=20)
        assert abs(base.B - scaled.B) <= 1e-9
        assert abs(base.S - scaled.S) <= 1e-9

    def test_imaginary_residue_small(self):
        model = ball2_model(m=2, N=40, cap=120)
        p = np.array([0.25 + 0.2j, -0.1 + 0.3j])
        jet = kernel_jet(model, p)
        md = _metric_from_jet(jet)
        X = np.array([0.3 - 0.2j, 0.7 + 0.1j])
        Y = np.array([-0.5 + 0.4j, 0.2 + 0.6j])
        b = _bisectional_from_jet(jet, md, X, Y)
        assert abs(b.imag) <= 1e-9 * max(1.0, abs(b.real))


class TestRicci:
    def test_disc_value(self):
        assert ricci(disc_model(), (0.0,), (1,)) == pytest.approx(-1.0, abs=1e-12)

    def test_ball2_ke_level_two(self):
        assert ricci(ball2_model(m=2), (0.0, 0.0), (1, 0)) == pytest.approx(
            -0.5, abs=1e-12)

    def test_scale_invariant_in_direction(self):
        assert ricci(disc_model(), (0.0,), (5,)) == pytest.approx(-1.0, abs=1e-12)

    def test_frame_order_does_not_matter(self):
        model = ball2_model(m=2, N=40, cap=120)
        p = (0.2 + 0.1j, -0.15)
        X = (0.7, 0.3 - 0.4j)
        r01 = ricci(model, p, X, frame_order=(0, 1))
        r10 = ricci(model, p, X, frame_order=(1, 0))
        assert abs(r01 - r10) <= 1e-8


class TestCanonicalFunctions:
    def test_disc_value_is_constant(self):
        model = disc_model(N=40, cap=120)
        J1, Jt1 = canonical_functions(model, (0.0,))
        J2, Jt2 = canonical_functions(model, (0.4 - 0.2j,))
        assert J1 == pytest.approx(2 * math.pi, rel=1e-12)
        assert J2 == pytest.approx(2 * math.pi, rel=1e-10)
        assert abs(Jt1 - Jt2) <= 1e-8

    def test_normalised_value_matches_constant(self):
        for n, m in [(1, 2), (2, 3)]:
            cfg = ModelConfig(DomainSpec.ball(n, 1.0), WeightSpec.ball_ke(m, 1.0),
                              truncation_degree=20, max_degree=80)
            _, Jt = canonical_functions(build_model(cfg), (0.0,) * n)
            expected = ball_constant(m, n) ** (1.0 / m) * (n + 1) ** n
            assert Jt == pytest.approx(expected, rel=1e-12)


class TestTransformation:
    def test_series_kernel_transformation_rule(self):
        model = disc_model(m=2, N=60, cap=120)
        F = ball_automorphism((0.25 + 0.1j,))
        z = np.array([0.3 - 0.2j])
        lhs = kernel_jet(model, z, degree=60).value
        rhs = (kernel_jet(model, F(z), degree=60).value
               * abs(F.jacobian_det(z)) ** 4)
        assert abs(lhs - rhs) / lhs <= 1e-6

    def test_metric_invariance_under_pullback(self):
        model = ball2_model(m=2, N=50, cap=120)
        p = np.array([0.2 + 0.1j, -0.1 + 0.05j])
        X = np.array([0.3, -0.2 + 0.4j])
        Y = np.array([0.1 - 0.5j, 0.6])
        F = ball_automorphism(p)
        J = F.jacobian(p)
        here = curvature_bisectional(model, p, X, Y).B
        there = curvature_bisectional(model, F(p), J @ X, J @ Y).B
        assert abs(here - there) <= 1e-6
