import math

import numpy as np
import pytest

from almostsd.dominance import (Index2DSD, Region, classify, derivative_components, index, mvr, phi,
                                phi_hat_derivative, tail_diagnostics)
from almostsd.empirical import OrderKind
from almostsd.errors import ParameterError, PreconditionError
from almostsd.piecewise import PiecewiseFunction, integrate


def idx(x, y, order=OrderKind.FIRST):
    return Index2DSD(x, y, order, (0.0, 1.0))


def lin(knots, values):
    return PiecewiseFunction(knots, values, "linear", values[0], values[-1])


class TestIndex:
    def test_ordered_pair_on_l1(self):
        r = index([1.0, 3.0], [2.0, 4.0], "first")
        assert (r.signed, r.abs) == pytest.approx((1.0, 1.0))
        assert classify(r).region is Region.ON_L1

    def test_symmetric_crossing(self):
        r = index([1.0, 4.0], [2.0, 3.0], "first")
        assert (r.signed, r.abs) == pytest.approx((0.0, 1.0))

    @pytest.mark.parametrize("order", list(OrderKind))
    def test_identical_samples(self, order):
        r = index([1.0, 2.0, 5.0], [1.0, 2.0, 5.0], order)
        assert (r.signed, r.abs) == (0.0, 0.0)
        assert mvr(r).degenerate

    def test_domains(self):
        assert index([1.0, 2.0], [3.0, 5.0], "second").domain == (1.0, 5.0)
        assert index([1.0, 2.0], [3.0, 5.0], "lorenz").domain == (0.0, 1.0)

    def test_positivity_precondition(self):
        with pytest.raises(PreconditionError):
            index([-1.0, 2.0], [1.0, 2.0], "second")

    def test_second_order_by_hand(self):
        # S1(t)=int F1: {1,3}; S2: {2}.  On [1,3]: S1 - S2 = 0.5(t-1) - (t-2)^+
        r = index([1.0, 3.0], [2.0], "second")
        # signed = int_1^3 0.5(t-1) dt - int_2^3 (t-2) dt = 1 - 0.5
        assert r.signed == pytest.approx(0.5)
        # difference 0.5(t-1) on [1,2], then 0.5(t-1)-(t-2) = 1.5-0.5t >= 0 on [2,3]
        assert r.abs == pytest.approx(0.5)

    def test_lorenz_by_hand(self):
        r = index([1.0, 1.0], [1.0, 3.0], "lorenz")
        assert r.signed == pytest.approx(0.125)
        assert r.abs == pytest.approx(0.125)


class TestMvr:
    def test_strict(self):
        assert mvr(idx(1.0, 1.0)).epsilon0 == 0.0

    def test_symmetric(self):
        assert mvr(idx(0.0, 1.0)).epsilon0 == 0.5

    def test_reversed(self):
        m = mvr(idx(-1.0, 1.0))
        assert m.epsilon0 == 1.0
        assert m.reversed().epsilon0 == 0.0

    def test_degenerate_flag(self):
        m = mvr(idx(0.0, 0.0))
        assert m.degenerate and m.epsilon0 == 0.5


class TestClassify:
    def test_on_l1(self):
        assert classify(idx(1.0, 1.0), 0.0).region is Region.ON_L1

    def test_on_l2(self):
        assert classify(idx(-2.0, 2.0), 0.1).region is Region.ON_L2

    def test_in_r1(self):
        assert classify(idx(0.8, 1.0), 0.11).region is Region.IN_R1_EPS

    def test_interior(self):
        assert classify(idx(0.8, 1.0), 0.05).region is Region.INTERIOR

    def test_in_r2(self):
        assert classify(idx(-0.8, 1.0), 0.11).region is Region.IN_R2_EPS

    @pytest.mark.parametrize("eps", [-0.1, 0.5, 0.7])
    def test_epsilon_range(self, eps):
        with pytest.raises(ParameterError):
            classify(idx(0.8, 1.0), eps)


class TestPhi:
    def test_boundary(self):
        assert phi(idx(1.0, 1.0), 0.0) == 0.0

    def test_symmetric_never_dominates(self):
        for eps in (0.0, 0.25, 0.499):
            assert phi(idx(0.0, 1.0), eps) < 0

    def test_root_at_mvr(self):
        assert phi(idx(0.8, 1.0), 0.1) == pytest.approx(0.0, abs=1e-15)

    def test_matches_region(self):
        i = idx(0.8, 1.0)
        assert phi(i, 0.11) >= 0 and classify(i, 0.11).region is Region.IN_R1_EPS
        assert phi(i, 0.05) < 0 and classify(i, 0.05).region is Region.INTERIOR

    def test_accepts_function(self):
        h = lin([0.0, 1.0], [-1.0, 1.0])
        assert phi(h, 0.25) == pytest.approx(0.0 - 0.5 * 0.5)


class TestPhiHatDerivative:
    def test_full_contact_recovers_phi(self):
        h = lin([0.0, 1.0, 2.0], [1.0, -0.5, 2.0])
        zero = lin([0.0, 2.0], [0.0, 0.0])
        for eps in (0.0, 0.2):
            assert phi_hat_derivative(h, zero, eps, 0.01) == pytest.approx(phi(h, eps))

    def test_no_contact(self):
        h = lin([0.0, 1.0, 2.0], [1.0, -0.5, 2.0])
        theta = lin([0.0, 2.0], [1.0, 1.0])
        eps = 0.2
        assert phi_hat_derivative(h, theta, eps, 0.1) == pytest.approx(2 * eps * integrate(h).signed)

    def test_ramp(self):
        h = lin([0.0, 1.0], [1.0, 1.0])
        theta = lin([0.0, 1.0], [0.0, 1.0])
        assert phi_hat_derivative(h, theta, 0.0, 0.5) == pytest.approx(0.0, abs=1e-15)
        assert derivative_components(h, theta, 0.5) == pytest.approx((1.0, 1.0))


class TestTailDiagnostics:
    def test_point_mass(self):
        d = tail_diagnostics([3.0, 3.0], [3.0])
        assert d.lambda21[0] == pytest.approx(3.0)
        assert d.lambda42[0] == pytest.approx(4.5)

    def test_two_points(self):
        d = tail_diagnostics([1.0, 3.0], [1.0, 3.0])
        assert d.lambda21[0] == pytest.approx(1.0 + 2.0 * math.sqrt(0.5))

    def test_tail_constant_and_warning(self, rng):
        x, y = rng.lognormal(0, 1, 500), rng.lognormal(0.5, 1, 500)
        d = tail_diagnostics(x, y)
        assert d.tail_constant == pytest.approx(y.mean() - x.mean())
        assert d.warnings and "second" in d.truncation_ratio

    def test_no_warning_for_equal_means(self):
        d = tail_diagnostics([1.0, 3.0], [2.0, 2.0])
        assert d.tail_constant == 0.0
        assert d.warnings == ()

    def test_negative_values_use_absolute_survival(self):
        d = tail_diagnostics([-2.0, 2.0], [1.0])
        assert d.lambda21[0] == pytest.approx(2.0)
