import numpy as np
import pytest

from spheig.errors import NegativeGap, PositivityError
from spheig.exponent import (
    BracketResult,
    approximate_from_inside,
    approximate_from_outside,
    bracket_steps,
    eigenfunction_pair,
    exponent_bracket,
    maximality_probe,
    negative_gap_error,
    order_pair,
    proportionality_diagnostic,
    richardson,
    transplant,
)
from spheig.fem_sphere import polygon_mesh, solve_nonlinear
from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch
from spheig.ode_axisym import ColatGrid

STEPS = (0.2, 0.1, 0.05, 0.025, 0.0125)


class TestRichardson:
    """Extrapolation of the family exponents to delta = 0."""

    def test_second_order_sequence(self):
        deltas = [0.2, 0.1, 0.05]
        betas = [1.0 + 3.0 * d**2 for d in deltas]
        extrap = richardson(deltas, betas)
        assert extrap.limit == pytest.approx(1.0, abs=1e-12)
        assert extrap.order == pytest.approx(2.0)
        assert not extrap.fallback

    def test_two_terms_fall_back(self):
        extrap = richardson([0.2, 0.1], [2.5, 2.2])
        assert extrap.fallback
        assert extrap.limit == 2.2
        assert extrap.error == pytest.approx(0.3)

    def test_non_contracting_terms_fall_back(self):
        extrap = richardson([0.2, 0.1, 0.05], [1.0, 1.1, 1.3])
        assert extrap.fallback
        assert extrap.limit == 1.3


class TestFamilies:
    """Inner and outer approximations of the quarter arc for p = 2."""

    def test_inner_decreases_to_limit(self, quarter_arc):
        result = approximate_from_inside(quarter_arc, PParams(p=2.0, dim=2), Branch.SINGULAR, STEPS)
        expected = [np.pi / (np.pi / 2 - 2 * d) for d in STEPS]
        assert result.beta_inner == pytest.approx(expected, abs=1e-8)
        assert result.beta_in_limit == pytest.approx(2.0, abs=5e-3)

    def test_outer_increases(self, quarter_arc):
        result = approximate_from_outside(quarter_arc, PParams(p=2.0, dim=2), Branch.SINGULAR, STEPS)
        assert np.all(np.diff(result.beta_outer) > 0.0)
        assert result.beta_inner == []

    def test_bracket(self, quarter_arc):
        params = PParams(p=2.0, dim=2)
        result = exponent_bracket(quarter_arc, params, Branch.SINGULAR, STEPS)
        assert result.consistent
        assert result.beta_out_limit == pytest.approx(2.0, abs=5e-3)
        assert abs(result.gap) < 1e-2
        rows = result.rows()
        assert [r["k"] for r in rows] == list(range(len(STEPS)))
        assert all(r["gap"] > 0.0 for r in rows)
        assert maximality_probe(result, params, quarter_arc).holds

    def test_regular_branch_in_magnitude(self, quarter_arc):
        result = exponent_bracket(quarter_arc, PParams(p=2.0, dim=2), Branch.REGULAR, STEPS)
        assert all(b < 0.0 for b in result.beta_inner + result.beta_outer)
        assert result.gap >= -1e-6

    def test_negative_gap(self, quarter_arc, mocker):
        params = PParams(p=2.0, dim=2)
        mocker.patch(
            "spheig.exponent.bracket.approximate_from_outside",
            return_value=BracketResult(
                branch=Branch.SINGULAR,
                steps=list(STEPS),
                beta_outer=[3.0] * len(STEPS),
                residual_outer=[0.0] * len(STEPS),
                beta_out_limit=3.0,
            ),
        )
        result = exponent_bracket(quarter_arc, params, Branch.SINGULAR, STEPS)
        assert not result.consistent
        assert result.gap < -result.gap_allowed
        assert result.beta_out_limit == 3.0
        error = negative_gap_error(result, quarter_arc)
        assert isinstance(error, NegativeGap)
        assert error.details["beta_out_limit"] == 3.0

    def test_regular_branch_on_hemisphere(self, hemisphere):
        result = exponent_bracket(hemisphere, PParams(p=3.0, dim=3), Branch.REGULAR, STEPS)
        assert result.consistent
        assert all(b < -1.0 for b in result.beta_inner)
        assert all(b > -1.0 for b in result.beta_outer)
        assert result.beta_in_limit == pytest.approx(-1.0, abs=5e-3)
        assert result.beta_out_limit == pytest.approx(-1.0, abs=5e-3)

    def test_default_steps_fit_the_domain(self, quarter_arc):
        assert bracket_steps(quarter_arc) == pytest.approx(STEPS)
        small = bracket_steps(SphericalDomain.arc(0.3))
        assert small[0] == pytest.approx(0.075)
        assert small[-1] == pytest.approx(0.075 / 16.0)
        assert bracket_steps(SphericalDomain.cap(3.0, 3))[0] == pytest.approx((np.pi - 3.0) / 2.0)


class TestPairs:
    """Transplanted and ordered eigenfunctions."""

    def test_transplant_keeps_mass(self, arc_pair_p2):
        moved = transplant(arc_pair_p2.omega, 1.0)
        assert moved.alpha == 1.0
        assert moved.l1_norm() == pytest.approx(1.0)
        assert moved.values[-1] == 0.0

    def test_eigenfunction_pair_is_ordered(self, hemisphere):
        pairing = eigenfunction_pair(hemisphere, PParams(p=2.5, dim=3), Branch.SINGULAR, 0.1, 1e-9)
        w, wp = pairing.omega.values, pairing.omega_prime.values
        mask = pairing.omega.interior()
        assert np.all(wp[mask] <= w[mask] * (1.0 + 1e-12))
        assert np.max(wp[mask] / w[mask]) == pytest.approx(1.0)
        assert 0.0 < pairing.delta1 <= 1.0
        assert abs(pairing.inner.beta) > abs(pairing.outer.beta)

    def test_order_pair_needs_positive_profiles(self, arc_pair_p2):
        grid = arc_pair_p2.omega
        flat = ColatGrid(alpha=grid.alpha, nodes=grid.nodes, values=np.zeros_like(grid.values), derivs=grid.derivs, dim=2)
        with pytest.raises(PositivityError):
            order_pair(grid, flat)


class TestProportionality:
    """Oscillation of the log-ratio of two profiles."""

    def test_multiples_are_proportional(self, arc_pair_p2):
        diag = proportionality_diagnostic(arc_pair_p2.omega, arc_pair_p2.omega.scaled(0.3))
        assert diag.osc_log_ratio < 1e-12
        assert diag.comparability_constant == pytest.approx(1.0)

    def test_distinct_profiles(self, arc_pair_p2):
        grid = arc_pair_p2.omega
        other = ColatGrid(
            alpha=grid.alpha,
            nodes=grid.nodes,
            values=grid.values * (1.5 + np.cos(grid.nodes)),
            derivs=grid.derivs,
            dim=2,
        )
        diag = proportionality_diagnostic(grid, other)
        assert diag.osc_log_ratio == pytest.approx(np.log(2.5 / (1.5 + np.cos(grid.alpha))), rel=5e-3)
        assert 0.0 < diag.holder_exponent <= 1.0

    def test_shapes_must_match(self, arc_pair_p2):
        short = transplant(arc_pair_p2.omega, 1.0)
        with pytest.raises(ValueError):
            proportionality_diagnostic(arc_pair_p2.omega, ColatGrid(
                alpha=1.0, nodes=short.nodes[::2], values=short.values[::2], derivs=short.derivs[::2], dim=2
            ))


@pytest.mark.slow
class TestConvexUniqueness:
    """Two eigenfunctions of one convex domain are proportional."""

    def test_square_from_two_starts(self):
        square = SphericalDomain.square(1.0)
        params = PParams(p=2.5, dim=3)
        mesh = polygon_mesh(square, 0.1)
        first = solve_nonlinear(mesh, params, square, Branch.SINGULAR, tol=1e-8)
        start = first.omega.with_values(first.omega.values**2)
        second = solve_nonlinear(mesh, params, square, Branch.SINGULAR, tol=1e-8, initial=start)
        assert second.beta == pytest.approx(first.beta, rel=1e-5)
        assert proportionality_diagnostic(first.omega, second.omega).osc_log_ratio < 0.05
