import numpy as np
import pytest

from spheig.errors import BracketFailure, DegenerateWeight
from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch
from spheig.ode_axisym import (
    ColatGrid,
    first_zero,
    ode_rhs,
    pole_series,
    shoot,
    solve_beta,
    sphere_area,
)


class TestSectorExponents:
    """For p = 2 and N = 2 the exponents of Arc(alpha) are +/- pi/alpha."""

    @pytest.mark.parametrize("alpha", [np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2])
    @pytest.mark.parametrize("branch", [Branch.SINGULAR, Branch.REGULAR])
    def test_pi_over_alpha(self, alpha, branch):
        pair = solve_beta(PParams(p=2.0, dim=2), SphericalDomain.arc(alpha), branch)
        assert pair.beta == pytest.approx(branch.sign * np.pi / alpha, abs=1e-8)

    def test_profile_is_sine(self, arc_pair_p2):
        grid = arc_pair_p2.omega
        shape = np.sin(2.0 * grid.nodes)
        expected = shape / grid.integrate(shape)
        assert np.max(np.abs(grid.values - expected)) < 1e-6

    def test_unit_mass(self, arc_pair_p2):
        assert arc_pair_p2.omega.l1_norm() == pytest.approx(1.0, rel=1e-10)
        assert arc_pair_p2.omega.values[-1] == 0.0


class TestCapExponents:
    """Closed-form cap exponents."""

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_half_space_regular_exponent(self, p, hemisphere):
        pair = solve_beta(PParams(p=p, dim=3), hemisphere, Branch.REGULAR)
        assert pair.beta == pytest.approx(-1.0, abs=1e-7)

    @pytest.mark.parametrize("dim", [3, 4, 5])
    def test_hemisphere_laplace_singular(self, dim):
        pair = solve_beta(PParams(p=2.0, dim=dim), SphericalDomain.cap(np.pi / 2.0, dim), Branch.SINGULAR)
        assert pair.beta == pytest.approx(dim - 1.0, abs=1e-7)

    def test_profile_positive_inside(self, hemisphere):
        pair = solve_beta(PParams(p=2.5, dim=3), hemisphere, Branch.SINGULAR)
        grid = pair.omega
        assert np.all(grid.values[grid.interior()] > 0.0)
        assert grid.values[0] == pytest.approx(grid.values.max())


class TestShoot:
    """Integration of the profile equation."""

    def test_no_zero_before_horizon(self):
        assert first_zero(PParams(p=2.0, dim=2), 0.1, 1.0) == np.inf

    def test_planar_first_zero(self):
        assert first_zero(PParams(p=2.0, dim=2), 4.0, 1.0) == pytest.approx(np.pi / 4.0, abs=1e-8)

    def test_zero_beta_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            shoot(PParams(p=2.0, dim=2), 0.0, 1.0)

    def test_pole_series(self):
        params = PParams(p=2.0, dim=3)
        w, dw = pole_series(params, 2.0, 1e-3)
        # cos(theta) = 1 - theta^2 / 2 + ...
        assert w == pytest.approx(1.0 - 0.5e-6)
        assert dw == pytest.approx(-1e-3)

    def test_rhs_for_laplace_on_the_circle(self):
        dw, d2w = ode_rhs(PParams(p=2.0, dim=2), 2.0, 0.3, 0.5, 0.2)
        assert dw == 0.2
        assert d2w == pytest.approx(-2.0)

    def test_rhs_degenerate_weight(self):
        with pytest.raises(DegenerateWeight):
            ode_rhs(PParams(p=1.5, dim=2), 2.0, 0.3, 0.0, 0.0)


class TestSolveBetaErrors:
    """Failure modes of the shooting solver."""

    def test_empty_scan_range(self, quarter_arc):
        with pytest.raises(BracketFailure) as exc:
            solve_beta(PParams(p=2.0, dim=2), quarter_arc, Branch.SINGULAR, beta_range=(1e-3, 1e-2))
        assert exc.value.details["scanned"]

    def test_polygon_rejected(self):
        with pytest.raises(ValueError, match="arc or a cap"):
            solve_beta(PParams(p=2.0, dim=3), SphericalDomain.square(1.0), Branch.SINGULAR)

    def test_dimension_mismatch(self, hemisphere):
        with pytest.raises(ValueError, match="dimension"):
            solve_beta(PParams(p=2.0, dim=4), hemisphere, Branch.SINGULAR)


class TestColatGrid:
    """Sampled profiles."""

    def test_measure_of_hemisphere(self):
        nodes = np.linspace(0.0, np.pi / 2.0, 201)
        grid = ColatGrid(alpha=np.pi / 2.0, nodes=nodes, values=np.ones_like(nodes), derivs=np.zeros_like(nodes), dim=3)
        assert grid.l1_norm() == pytest.approx(sphere_area(2) / 2.0, rel=1e-8)

    def test_rejects_short_grid(self):
        nodes = np.linspace(0.0, 1.0, 5)
        with pytest.raises(ValueError, match="span"):
            ColatGrid(alpha=2.0, nodes=nodes, values=nodes, derivs=nodes, dim=2)


@pytest.mark.slow
class TestIndependentIntegrators:
    """Values without a closed form must not depend on the integrator."""

    def test_first_zero_for_p3(self):
        params = PParams(p=3.0, dim=2)
        dop853 = first_zero(params, 1.0, 1.0, method="DOP853")
        rk45 = first_zero(params, 1.0, 1.0, method="RK45")
        assert np.isfinite(dop853)
        assert rk45 == pytest.approx(dop853, abs=1e-9)

    def test_half_circle_singular_exponent_for_p3(self):
        params = PParams(p=3.0, dim=2)
        half = SphericalDomain.arc(np.pi)
        dop853 = solve_beta(params, half, Branch.SINGULAR, method="DOP853")
        rk45 = solve_beta(params, half, Branch.SINGULAR, method="RK45")
        assert dop853.beta > 0.0
        assert rk45.beta == pytest.approx(dop853.beta, abs=1e-8)
