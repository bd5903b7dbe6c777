import numpy as np
import pytest
from pydantic import ValidationError

from spheig.errors import ComplementPolar, EmptyDomain, OutsideDomain
from spheig.geometry import (
    DomainFamily,
    FamilyDirection,
    PParams,
    SphericalDomain,
    boundary_distance,
    boundary_distances,
    contains,
    dump_domain,
    expand,
    expansion_room,
    incenter,
    inradius,
    interior_angles,
    load_domain,
    shrink,
)


class TestPParams:
    """Exponent parameters and the paired eigenvalue."""

    def test_beta0(self):
        assert PParams(p=2.0, dim=3).beta0 == pytest.approx(1.0)
        assert PParams(p=3.0, dim=3).beta0 == pytest.approx(0.0)

    def test_eigen_factor_vanishes_at_zero_and_beta0(self):
        params = PParams(p=2.5, dim=3)
        assert params.eigen_factor(0.0) == 0.0
        assert params.eigen_factor(params.beta0) == pytest.approx(0.0)

    def test_planar_laplace(self):
        assert PParams(p=2.0, dim=2).eigen_factor(2.0) == pytest.approx(4.0)

    def test_rejects_p_at_most_one(self):
        with pytest.raises(ValidationError):
            PParams(p=1.0, dim=2)


class TestSphericalDomain:
    """Construction rules for arcs, caps and polygons."""

    def test_arc_requires_dim_two(self):
        with pytest.raises(ValidationError):
            SphericalDomain(kind="arc", alpha=1.0, dim=3)

    def test_cap_opening_range(self):
        with pytest.raises(ValidationError):
            SphericalDomain.cap(np.pi, 3)
        with pytest.raises(ValidationError):
            SphericalDomain.cap(1.0, 2)

    def test_polygon_orientation_is_normalized(self):
        square = SphericalDomain.square(1.0)
        flipped = SphericalDomain.polygon(square.vertex_array[::-1])
        assert np.all(interior_angles(flipped.vertex_array) < np.pi)
        assert inradius(flipped) == pytest.approx(inradius(square), rel=1e-6)

    def test_square_angles_exceed_right_angle(self):
        angles = interior_angles(SphericalDomain.square(1.0).vertex_array)
        assert np.all(angles > np.pi / 2.0)
        assert np.allclose(angles, angles[0])

    def test_polygon_outside_hemisphere_rejected(self):
        with pytest.raises(ValidationError):
            SphericalDomain.polygon([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    def test_label(self):
        assert SphericalDomain.arc(1.5).label() == "arc(1.5)"
        assert SphericalDomain.regular_polygon(5, 0.6).label() == "polygon[5]"


class TestOffsets:
    """Shrinking and enlarging domains by a geodesic margin."""

    def test_arc_and_cap(self):
        assert shrink(SphericalDomain.arc(2.0), 0.25).alpha == pytest.approx(1.5)
        assert expand(SphericalDomain.arc(2.0), 0.25).alpha == pytest.approx(2.5)
        assert shrink(SphericalDomain.cap(1.0, 4), 0.25).alpha == pytest.approx(0.75)
        assert expand(SphericalDomain.cap(1.0, 4), 0.25).dim == 4

    def test_zero_margin_is_identity(self, quarter_arc):
        assert shrink(quarter_arc, 0.0) is quarter_arc

    def test_shrink_past_inradius_empties(self):
        with pytest.raises(EmptyDomain) as exc:
            shrink(SphericalDomain.arc(1.0), 0.5)
        assert exc.value.details["inradius"] == pytest.approx(0.5)

    def test_expand_to_complement(self):
        with pytest.raises(ComplementPolar):
            expand(SphericalDomain.arc(6.0), 0.2)
        with pytest.raises(ComplementPolar):
            expand(SphericalDomain.cap(3.0, 3), 0.2)

    def test_polygon_vertices_move_by_margin(self):
        square = SphericalDomain.square(1.0)
        inner = shrink(square, 0.05)
        for v in inner.vertex_array:
            assert boundary_distance(square, v) == pytest.approx(0.05, abs=1e-9)
        assert inradius(inner) < inradius(square)

    def test_polygon_expand_contains_original(self):
        square = SphericalDomain.square(1.0)
        outer = expand(square, 0.05)
        assert np.all(contains(outer, square.vertex_array))

    def test_polygon_expand_edges_stay_in_band(self):
        square = SphericalDomain.square(1.0)
        delta = 0.05
        moved = expand(square, delta).vertex_array
        travel = np.arcsin(np.sin(delta) / np.sin(interior_angles(square.vertex_array) / 2.0))
        t = np.linspace(0.0, 1.0, 41)
        for a, b in zip(moved, np.roll(moved, -1, axis=0), strict=True):
            angle = np.arccos(np.clip(a @ b, -1.0, 1.0))
            points = (np.sin((1.0 - t) * angle)[:, None] * a + np.sin(t * angle)[:, None] * b) / np.sin(angle)
            dist = -boundary_distances(square, points)
            assert np.all(dist >= delta - 1e-9)
            assert np.all(dist <= travel.max() + 1e-9)
            # the new edge bows away from the offset curve between its vertices
            assert dist[20] > 1.1 * delta

    def test_expansion_room(self):
        assert expansion_room(SphericalDomain.arc(2.0)) == pytest.approx(np.pi - 1.0)
        assert expansion_room(SphericalDomain.cap(3.0, 3)) == pytest.approx(np.pi - 3.0)
        assert 0.0 < expansion_room(SphericalDomain.square(1.0)) < np.pi / 2.0


class TestDistances:
    """Membership and distance to the boundary."""

    def test_cap_distance(self):
        cap = SphericalDomain.cap(1.0, 3)
        x = np.array([np.sin(0.3), 0.0, np.cos(0.3)])
        assert boundary_distance(cap, x) == pytest.approx(0.7)

    def test_arc_center(self, quarter_arc):
        assert boundary_distance(quarter_arc, incenter(quarter_arc)) == pytest.approx(np.pi / 4.0)

    def test_outside_point(self):
        cap = SphericalDomain.cap(0.5, 3)
        with pytest.raises(OutsideDomain):
            boundary_distance(cap, np.array([1.0, 0.0, 0.0]))

    def test_polygon_incenter_is_pole(self):
        square = SphericalDomain.square(1.0)
        assert np.allclose(incenter(square), [0.0, 0.0, 1.0], atol=1e-5)

    def test_contains_vectorized(self):
        cap = SphericalDomain.cap(1.0, 3)
        pts = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        assert contains(cap, pts).tolist() == [True, False]


class TestDomainFamily:
    """Inner and outer approximation families."""

    def test_dyadic_members(self, quarter_arc):
        family = DomainFamily.dyadic(quarter_arc, FamilyDirection.INNER, 0.2, 3)
        members = family.members()
        assert len(members) == 4
        assert [m.alpha for m in members] == pytest.approx([np.pi / 2 - 2 * d for d in family.steps])

    def test_steps_must_decrease(self, quarter_arc):
        with pytest.raises(ValidationError):
            DomainFamily(base=quarter_arc, direction=FamilyDirection.OUTER, steps=(0.1, 0.2))


def test_domain_file(tmp_path):
    path = tmp_path / "square.toml"
    square = SphericalDomain.square(0.8)
    dump_domain(square, path)
    loaded = load_domain(path)
    assert loaded.kind == "polygon"
    assert np.allclose(loaded.vertex_array, square.vertex_array)
