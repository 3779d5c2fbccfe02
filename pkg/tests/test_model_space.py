
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftlab import (
    Domain,
    WeightFunction,
    drift_quantities,
    eval_potential,
    schrodinger_potential,
    weighted_mean_of_f,
)


class TestEvalPotential:
    def test_quadratic_quarter(self):
        f = WeightFunction.quadratic(0.25, 2)
        assert eval_potential(f, (2.0, 0.0)) == 1.0

    def test_constant(self):
        f = WeightFunction.constant(3.0, 3)
        assert eval_potential(f, (0.7, -1.2, 5.0)) == 3.0

    def test_quadratic_at_origin(self):
        f = WeightFunction.quadratic(0.5, 1)
        assert eval_potential(f, 0.0) == 0.0

    def test_tabulated_off_grid_raises(self):
        f = WeightFunction.tabulated(axes=[[0.0, 1.0, 2.0, 3.0]],
                                     values=[0, 1, 4, 9], grads=[0, 2, 4, 6],
                                     laps=[2, 2, 2, 2])
        assert eval_potential(f, 2.0) == 4.0
        with pytest.raises(ValueError):
            eval_potential(f, 2.5)
        with pytest.raises(ValueError):
            eval_potential(f, -1.0)

    def test_tabulated_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            WeightFunction.tabulated(axes=[[0.0, 1.0]], values=[0.0, np.inf],
                                     grads=[0.0, 1.0], laps=[0.0, 0.0])


class TestDriftQuantities:
    def test_gaussian_weight_2d(self):
        d = drift_quantities(WeightFunction.quadratic(0.25, 2), (1.0, 1.0))
        assert d.grad_f == (0.5, 0.5)
        assert d.lap_f == 1.0
        assert d.grad_f_sq == 0.5
        assert d.drift_lap_f == 0.5

    def test_constant_all_zero(self):
        d = drift_quantities(WeightFunction.constant(7.0, 2), (0.3, 0.4))
        assert d.grad_f == (0.0, 0.0)
        assert d.lap_f == 0.0 and d.grad_f_sq == 0.0 and d.drift_lap_f == 0.0

    def test_half_square_1d(self):
        d = drift_quantities(WeightFunction.quadratic(0.5, 1), 3.0)
        assert d.grad_f == (3.0,)
        assert d.lap_f == 1.0
        assert d.grad_f_sq == 9.0
        assert d.drift_lap_f == -8.0

    def test_drift_identity_exact(self):
        f = WeightFunction.affine_quadratic(0.3, [1.0, -2.0], 0.5)
        d = drift_quantities(f, (0.2, 1.7))
        assert d.drift_lap_f == d.lap_f - d.grad_f_sq


class TestSchrodingerPotential:
    def test_half_square_origin(self):
        assert schrodinger_potential(WeightFunction.quadratic(0.5, 1), 0.0) == -0.5

    def test_constant_vanishes_everywhere(self):
        f = WeightFunction.constant(2.0, 2)
        rng = np.random.default_rng(0)
        for pt in rng.uniform(-5, 5, size=(20, 2)):
            assert schrodinger_potential(f, pt) == 0.0

    def test_gaussian_weight_origin(self):
        assert schrodinger_potential(WeightFunction.quadratic(0.25, 2), (0.0, 0.0)) == -0.5


class TestFiniteDifferenceConsistency:
    """Central differences of eval_potential against the analytic gradient.

    Every analytic kind is a polynomial of degree <= 2, so the central
    difference is exact up to roundoff; when an error ever rises above the
    roundoff floor the classical factor-4 decay under halving must show."""

    def _fd_error(self, f, x, h):
        dim = f.dimension
        worst = 0.0
        grad = np.asarray(drift_quantities(f, x).grad_f)
        for a in range(dim):
            e = np.zeros(dim)
            e[a] = h
            fd = (eval_potential(f, x + e) - eval_potential(f, x - e)) / (2 * h)
            worst = max(worst, abs(fd - grad[a]))
        return worst

    @pytest.mark.parametrize("f", [
        WeightFunction.constant(4.0, 2),
        WeightFunction.quadratic(0.25, 2),
        WeightFunction.quadratic(0.5, 3),
        WeightFunction.affine_quadratic(1.3, [0.2, -0.7], 2.0),
    ])
    def test_gradients_match(self, f):
        rng = np.random.default_rng(1)
        for x in rng.uniform(-3, 3, size=(5, f.dimension)):
            e1 = self._fd_error(f, x, 1e-3)
            e2 = self._fd_error(f, x, 5e-4)
            if e1 > 1e-9:
                assert 3.5 <= e1 / e2 <= 4.5
            else:
                assert e2 <= 1e-9


class TestWeightedMean:
    def test_constant_weight(self):
        dom = Domain.box([0.0, 0.0], [2.0, 3.0])
        f = WeightFunction.constant(5.0, 2)
        assert weighted_mean_of_f(dom, f, 32) == 5.0

    def test_truncated_gaussian_moment(self):
        dom = Domain.interval(-12.0, 12.0)
        f = WeightFunction.quadratic(0.5, 1)
        assert weighted_mean_of_f(dom, f, 4096) == pytest.approx(0.5, abs=1e-5)

    def test_linear_weight_unit_interval(self):
        # closed form (1 - 2/e) / (1 - 1/e), cross-checked by quadrature
        dom = Domain.interval(0.0, 1.0)
        f = WeightFunction.affine_quadratic(0.0, [1.0], 0.0)
        assert weighted_mean_of_f(dom, f, 2048) == pytest.approx(
            0.4180232931306736, abs=1e-6)

    def test_refinement_stability(self):
        dom = Domain.interval(0.0, 1.0)
        f = WeightFunction.affine_quadratic(0.0, [1.0], 0.0)
        coarse = weighted_mean_of_f(dom, f, 1024)
        fine = weighted_mean_of_f(dom, f, 2048)
        assert abs(coarse - fine) < 1e-6

    def test_resolution_floor(self):
        dom = Domain.interval(0.0, 1.0)
        with pytest.raises(ValueError):
            weighted_mean_of_f(dom, WeightFunction.constant(0.0, 1), 4)

    @settings(deadline=None, max_examples=25)
    @given(shift=st.floats(-3.0, 3.0), coeff=st.floats(0.05, 1.0))
    def test_translation_equivariance(self, shift, coeff):
        base = Domain.interval(-1.0, 3.0)
        f = WeightFunction.quadratic(coeff, 1)
        moved = Domain.interval(-1.0 + shift, 3.0 + shift)
        # same quadratic recentred at the shifted origin
        f_moved = WeightFunction.affine_quadratic(
            coeff, [-2.0 * coeff * shift], coeff * shift * shift)
        a = weighted_mean_of_f(base, f, 512)
        b = weighted_mean_of_f(moved, f_moved, 512)
        assert a == pytest.approx(b, abs=1e-10)

    def test_product_reduces_to_euclidean_factor(self):
        eucl = Domain.interval(-2.0, 2.0)
        prod = Domain.product_with_sphere(eucl, sphere_dim=2, sphere_radius=1.0)
        f = WeightFunction.quadratic(0.5, 1)
        assert weighted_mean_of_f(prod, f, 512) == weighted_mean_of_f(eucl, f, 512)


class TestDomain:
    def test_interval_requires_order(self):
        with pytest.raises(ValueError):
            Domain.interval(2.0, 2.0)

    def test_box_requires_componentwise_order(self):
        with pytest.raises(ValueError):
            Domain.box([0.0, 0.0], [1.0, 0.0])

    def test_torus_positive_periods(self):
        with pytest.raises(ValueError):
            Domain.flat_torus([1.0, -1.0])

    def test_product_dimension(self):
        prod = Domain.product_with_sphere(Domain.interval(0, 1), 2, 1.0)
        assert prod.dimension == 3
        assert prod.boundary == "closed_product"

    def test_min_position_sq(self):
        assert Domain.box([-1.0, -1.0], [1.0, 1.0]).min_position_sq() == 0.0
        assert Domain.interval(2.0, 3.0).min_position_sq() == 4.0
        assert Domain.box([1.0, -1.0], [2.0, 1.0]).min_position_sq() == 1.0
