import numpy as np
import pytest

from spheig.errors import RangeError
from spheig.fem_sphere import DiscreteField, cap_mesh
from spheig.geometry import PParams
from spheig.verify import (
    CHECKS,
    build_sub_super,
    convexity_bound_check,
    ellipticity_check,
    energy_constant,
    energy_identity_check,
    homogeneity_check,
    power_deformation,
    power_deformation_check,
    power_deformation_operator,
    run_suite,
    spherical_operator_fd,
    subsolution_sign_check,
    vector_inequality_check,
)


class TestInequalities:
    """Pointwise and integral inequalities."""

    @pytest.mark.parametrize("p", [1.1, 1.5, 1.9])
    def test_vector_inequality(self, p):
        report = vector_inequality_check(PParams(p=p, dim=3), 2000, rng=np.random.default_rng(7))
        assert report.passed
        assert report.details["violations"] == 0

    def test_vector_inequality_range(self):
        with pytest.raises(RangeError):
            vector_inequality_check(PParams(p=2.5, dim=2), 10)

    def test_energy_identity(self, arc_pair_p2):
        report = energy_identity_check(arc_pair_p2)
        assert report.passed
        assert report.details["identity_error"] < 1e-6

    def test_energy_constant_for_laplace(self):
        # beta^2 + lambda with lambda = beta^2 in the plane
        assert energy_constant(PParams(p=2.0, dim=2), 2.0) == pytest.approx(8.0)

    def test_homogeneity(self, arc_pair_p2):
        assert homogeneity_check(arc_pair_p2, 2.0).passed
        with pytest.raises(RangeError):
            homogeneity_check(arc_pair_p2, -1.0)

    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_ellipticity(self, p):
        mesh = cap_mesh(1.0, 6)
        rng = np.random.default_rng(3)
        values = np.where(mesh.boundary, 0.0, rng.uniform(0.1, 1.0, mesh.n_vertices))
        report = ellipticity_check(DiscreteField(mesh, values), PParams(p=p, dim=3), rng=rng)
        assert report.passed


class TestSubSuper:
    """Sub and super profiles from an ordered pair."""

    def test_convexity_bound(self, arc_pair_p2):
        omega = arc_pair_p2.omega
        pair = build_sub_super(omega, omega.scaled(0.5), 0.75)
        assert pair.delta1 == pytest.approx(0.5)
        assert pair.theta_t == pytest.approx(0.5)
        assert convexity_bound_check(pair, omega, omega.scaled(0.5)).passed

    def test_t_below_delta1(self, arc_pair_p2):
        omega = arc_pair_p2.omega
        with pytest.raises(RangeError):
            build_sub_super(omega, omega.scaled(0.5), 0.25)

    def test_power_deformation_is_subsolution(self, arc_pair_p2):
        values = power_deformation_operator(arc_pair_p2.omega, PParams(p=2.5, dim=2), arc_pair_p2.beta, 1.3)
        assert np.all(values <= 0.0)

    def test_eigenfunction_sign_checks(self, arc_pair_p2):
        params = PParams(p=2.0, dim=2)
        omega = arc_pair_p2.omega
        assert subsolution_sign_check(omega, params, arc_pair_p2.beta, "sub").passed
        assert subsolution_sign_check(omega, params, arc_pair_p2.beta, "super").passed
        # a larger exponent turns the eigenfunction into a strict subsolution
        assert subsolution_sign_check(omega, params, 2.5, "sub").passed
        assert not subsolution_sign_check(omega, params, 2.5, "super").passed

    def test_power_deformation_exponent(self, arc_pair_p2):
        eta, beta = power_deformation(arc_pair_p2.omega, arc_pair_p2.beta, 1.5)
        assert beta == pytest.approx(1.5 * arc_pair_p2.beta)
        assert eta.values == pytest.approx(np.clip(arc_pair_p2.omega.values, 0.0, None) ** 1.5)

    def test_power_deformation_matches_finite_differences(self, arc_pair_p2):
        params = PParams(p=2.0, dim=2)
        report = power_deformation_check(arc_pair_p2.omega, params, arc_pair_p2.beta, 1.2)
        assert report.passed
        assert report.details["mismatch"] < 1e-3
        assert report.details["nodes"] > 100

    def test_power_deformation_detects_a_wrong_operator(self, arc_pair_p2):
        # the p = 2 profile is not an eigenfunction for p = 2.5
        report = power_deformation_check(arc_pair_p2.omega, PParams(p=2.5, dim=2), arc_pair_p2.beta, 1.2)
        assert not report.passed
        assert report.details["mismatch"] > 1e-2

    def test_finite_difference_operator_vanishes_on_eigenfunctions(self, arc_pair_p2):
        values = spherical_operator_fd(arc_pair_p2.omega, PParams(p=2.0, dim=2), arc_pair_p2.beta)
        scale = arc_pair_p2.beta**2 * np.max(arc_pair_p2.omega.values)
        assert np.max(np.abs(values)) < 1e-4 * scale


class TestSuite:
    """Seeded runs of the property suite."""

    def test_same_seed_same_report(self):
        only = ["vector-inequality", "convexity-bound"]
        first = run_suite(3, only, trials=200)
        second = run_suite(3, only, trials=200)
        assert first.model_dump() == second.model_dump()
        assert first.passed
        assert first.lines()[0].startswith("# spheig verify seed=3")

    def test_unknown_check(self):
        with pytest.raises(ValueError, match="unknown checks"):
            run_suite(0, ["no-such-check"])

    def test_check_names(self):
        assert "half-space" in CHECKS
        assert len(CHECKS) == 10

    @pytest.mark.slow
    def test_full_suite_passes(self):
        report = run_suite(0)
        assert report.passed, "\n".join(report.lines())
