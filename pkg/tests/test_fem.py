import numpy as np
import pytest

from spheig.errors import MeshError
from spheig.fem_sphere import (
    DiscreteField,
    SurfaceMesh,
    arc_mesh,
    assemble_linearized,
    assemble_weighted,
    cap_mesh,
    dirichlet_eigen,
    evaluate_residual,
    field_from_grid,
    frozen_eigen_mu,
    interpolate_profile,
    latitude_variation,
    mass_matrix,
    mesh_for,
    meridian_mesh,
    p_laplacian_residual,
    polygon_mesh,
    read_mesh,
    solve_nonlinear,
    stiffness_matrix,
    write_mesh,
)
from spheig.geometry import PParams, SphericalDomain, boundary_distances
from spheig.models import Branch
from spheig.ode_axisym import solve_beta


class TestMeshes:
    """Carriers for the surface finite elements."""

    def test_cap_mesh_rings(self):
        mesh = cap_mesh(1.0, 8)
        assert mesh.boundary.sum() == 48
        assert np.allclose(np.linalg.norm(mesh.points, axis=1), 1.0)
        mesh.check_cells()

    def test_polygon_boundary_on_edges(self):
        square = SphericalDomain.square(1.0)
        mesh = polygon_mesh(square, 0.1)
        dist = boundary_distances(square, mesh.points)
        assert np.max(np.abs(dist[mesh.boundary])) < 1e-9
        assert np.all(dist[mesh.interior] > 0.0)

    def test_meridian_mesh_measure(self):
        mesh = meridian_mesh(np.pi / 2.0, 3, 128)
        area = float(np.ones(mesh.n_vertices) @ mass_matrix(mesh) @ np.ones(mesh.n_vertices))
        assert area == pytest.approx(2.0 * np.pi, rel=1e-4)
        assert not mesh.boundary[0]

    def test_levels_refine(self, quarter_arc):
        assert mesh_for(quarter_arc, 1).h == pytest.approx(mesh_for(quarter_arc, 0).h / 2.0)

    def test_density_shape_checked(self):
        with pytest.raises(MeshError):
            SurfaceMesh(
                vertices=np.array([[0.0], [1.0]]),
                cells=np.array([[0, 1]]),
                boundary=np.array([True, True]),
                density=np.ones(2),
                on_sphere=False,
            )

    def test_exchange_file(self, tmp_path):
        mesh = cap_mesh(0.8, 4)
        write_mesh(mesh, tmp_path / "cap.json")
        loaded = read_mesh(tmp_path / "cap.json")
        assert np.array_equal(loaded.cells, mesh.cells)
        assert np.allclose(loaded.vertices, mesh.vertices)
        assert loaded.boundary.tolist() == mesh.boundary.tolist()


class TestAssembly:
    """Stiffness, mass and nonlinear residuals."""

    def test_constants_in_stiffness_kernel(self):
        mesh = cap_mesh(1.0, 6)
        k = stiffness_matrix(mesh)
        assert np.max(np.abs(k @ np.ones(mesh.n_vertices))) < 1e-12

    def test_p_laplacian_residual_is_linear_for_p2(self):
        mesh = arc_mesh(1.0, 16)
        u = np.sin(mesh.vertices[:, 0])
        res = p_laplacian_residual(mesh, PParams(p=2.0, dim=2), u)
        assert np.allclose(res, stiffness_matrix(mesh) @ u)

    def test_half_space_residual_converges(self):
        params = PParams(p=3.0, dim=3)
        residuals = []
        for n in (32, 64, 128):
            mesh = meridian_mesh(np.pi / 2.0, 3, n)
            residuals.append(evaluate_residual(mesh, params, -1.0, np.cos(mesh.vertices[:, 0])))
        assert residuals[2] < residuals[1] < residuals[0]

    def test_weighted_matrices_for_p2(self):
        mesh = arc_mesh(1.0, 16)
        field_ = DiscreteField(mesh, np.sin(np.pi * mesh.vertices[:, 0]))
        k, m = assemble_weighted(mesh, PParams(p=2.0, dim=2), 3.0, field_, 0.0)
        assert np.allclose(k.toarray(), stiffness_matrix(mesh).toarray())
        assert np.allclose(m.toarray(), mass_matrix(mesh).toarray())

    def test_weighted_matrices_symmetric(self):
        mesh = cap_mesh(1.0, 6)
        field_ = DiscreteField(mesh, 1.0 + mesh.points[:, 0])
        k, m = assemble_weighted(mesh, PParams(p=3.0, dim=3), 2.0, field_, 1e-3)
        assert abs(k - k.T).max() < 1e-12
        assert abs(m - m.T).max() < 1e-12

    def test_linearized_operator_is_the_jacobian(self):
        mesh = arc_mesh(1.0, 16)
        params = PParams(p=3.0, dim=2)
        u = 1.0 + np.sin(2.0 * mesh.vertices[:, 0])
        v = np.cos(mesh.vertices[:, 0])
        h = 1e-5
        fd = (
            p_laplacian_residual(mesh, params, u + h * v, 0.1)
            - p_laplacian_residual(mesh, params, u - h * v, 0.1)
        ) / (2.0 * h)
        jac = assemble_linearized(mesh, params, DiscreteField(mesh, u), 0.1)
        assert np.allclose(jac @ v, fd, rtol=1e-6, atol=1e-8 * np.max(np.abs(fd)))


class TestEigen:
    """Linear and nonlinear spherical eigenproblems."""

    def test_dirichlet_half_circle(self):
        mu, field_ = dirichlet_eigen(arc_mesh(np.pi, 256))
        assert mu == pytest.approx(1.0, rel=1e-4)
        assert np.all(field_.interior_values > 0.0)
        assert field_.l1_norm() == pytest.approx(1.0)

    def test_frozen_eigen_mu_for_p2(self):
        mesh = arc_mesh(np.pi / 2.0, 256)
        start = DiscreteField(mesh, np.where(mesh.boundary, 0.0, 1.0))
        mu, field_ = frozen_eigen_mu(mesh, PParams(p=2.0, dim=2), 2.0, start, 0.0)
        assert mu == pytest.approx(4.0, rel=1e-4)
        assert np.all(field_.values >= 0.0)
        assert field_.l1_norm() == pytest.approx(1.0)

    def test_quarter_arc_laplace(self, quarter_arc):
        pair = solve_nonlinear(arc_mesh(quarter_arc.alpha, 256), PParams(p=2.0, dim=2), quarter_arc, Branch.SINGULAR)
        assert pair.beta == pytest.approx(2.0, abs=1e-3)
        assert pair.extras["clipped"] == 0

    def test_cap_mesh_profile_is_axisymmetric(self):
        cap = SphericalDomain.cap(1.0, 3)
        pair = solve_nonlinear(cap_mesh(1.0, 10), PParams(p=2.5, dim=3), cap, Branch.SINGULAR, tol=1e-6)
        assert latitude_variation(pair.omega, cap.center) < 0.05

    def test_dimension_mismatch(self, hemisphere):
        with pytest.raises(ValueError, match="dimension"):
            solve_nonlinear(mesh_for(hemisphere), PParams(p=2.0, dim=4), hemisphere, Branch.SINGULAR)


class TestTransfer:
    """Moving shooting profiles onto meshes."""

    def test_field_from_grid(self, arc_pair_p2):
        field_ = field_from_grid(arc_pair_p2.omega)
        assert field_.l1_norm() == pytest.approx(1.0, rel=1e-6)
        assert field_.satisfies_dirichlet(atol=1e-12)

    def test_interpolate_onto_cap_mesh(self, hemisphere):
        pair = solve_beta(PParams(p=2.0, dim=3), hemisphere, Branch.SINGULAR)
        mesh = cap_mesh(hemisphere.alpha, 8)
        field_ = interpolate_profile(pair.omega, mesh, hemisphere)
        assert isinstance(field_, DiscreteField)
        assert latitude_variation(field_, hemisphere.center) < 1e-10


@pytest.mark.slow
class TestAgainstShooting:
    """Finite elements converge to the shooting exponent."""

    def test_cap_two_fifths_pi(self):
        params = PParams(p=2.5, dim=3)
        cap = SphericalDomain.cap(2.0 * np.pi / 5.0, 3)
        exact = solve_beta(params, cap, Branch.SINGULAR).beta
        errors = [
            abs(solve_nonlinear(mesh_for(cap, level), params, cap, Branch.SINGULAR).beta - exact)
            for level in (0, 1, 2)
        ]
        assert errors[2] < 5e-4 * exact
        assert errors[2] < errors[1] < errors[0]
        assert np.log2(errors[1] / errors[2]) >= 1.0
