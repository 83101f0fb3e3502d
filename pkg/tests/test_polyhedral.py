"""Tests for exact rational cones."""
from fractions import Fraction

import pytest

from lcy_cones.cones import cone_of_curves
from lcy_cones.exceptions import DimensionMismatch
from lcy_cones.lattice import ClassVector, IntersectionForm
from lcy_cones.polyhedral import (
    RationalCone,
    cone_equal,
    cone_from_inequalities,
    contains,
    double_description,
    dual_cone,
    extremal_rays,
    intersect,
    ray_membership,
    verify_certificate,
    verify_duality,
)


def v(*coords):
    return ClassVector(coords)


def standard(rank):
    """Form with identity gram, so pairing is the dot product."""
    gram = tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank))
    return IntersectionForm(gram, tuple(f"x{i}" for i in range(rank)))


def random_cone(rng, rank, count, bound=3):
    rays = []
    while len(rays) < count:
        r = v(*(rng.randint(-bound, bound) for _ in range(rank)))
        if not r.is_zero():
            rays.append(r)
    return RationalCone.from_rays(rank, rays)


class TestFromRays:
    """Test cone construction."""

    def test_primitive_and_deduplicated(self):
        """Proportional rays collapse to one primitive generator; zero is dropped."""
        cone = RationalCone.from_rays(2, [v(2, 4), v(0, 0), v(1, 2), v(3, 0)], ["a", "z", "b", "c"])
        assert cone.rays == (v(1, 2), v(1, 0))
        assert cone.labels == ("a", "c")

    def test_wrong_length(self):
        """Rays must match the ambient rank."""
        with pytest.raises(DimensionMismatch):
            RationalCone.from_rays(2, [v(1, 2, 3)])

    def test_halfspaces_hold_on_rays(self, rng):
        """Every ray satisfies every computed inequality."""
        for _ in range(20):
            cone = random_cone(rng, 3, 4)
            for h in cone.halfspaces:
                assert all(sum(a * b for a, b in zip(h, r)) >= 0 for r in cone.rays)


class TestDualCone:
    """Test duals and the double description conversion."""

    def test_planar_dual(self):
        """The dual of <(1,0),(1,2)> is <(0,1),(2,-1)>."""
        cone = RationalCone.from_rays(2, [v(1, 0), v(1, 2)])
        assert dual_cone(standard(2), cone).rays == (v(0, 1), v(2, -1))

    def test_full_space_dual_is_zero(self):
        """The dual of the whole plane is {0}."""
        cone = RationalCone.from_rays(2, [v(1, 0), v(-1, 0), v(0, 1), v(0, -1)])
        assert dual_cone(standard(2), cone).rays == ()

    def test_halfplane_has_lineality(self):
        """x >= 0 in the plane has one ray and a lineality line."""
        rays, lineality = double_description([(1, 0)], 2)
        assert rays == [v(1, 0)]
        assert len(lineality) == 1 and lineality[0][0] == 0
        cone = cone_from_inequalities([(1, 0)], 2)
        assert ray_membership(cone, v(0, -5)).member
        assert ray_membership(cone, v(3, 7)).member
        assert not ray_membership(cone, v(-1, 0)).member

    def test_biduality(self, rng):
        """The dual of the dual is the original cone."""
        form = standard(3)
        for _ in range(25):
            cone = random_cone(rng, 3, rng.randint(1, 5))
            assert cone_equal(cone, dual_cone(form, dual_cone(form, cone)))

    def test_gram_is_used(self):
        """Duals are taken with the intersection form, not the dot product."""
        form = IntersectionForm(((1, 0), (0, -1)), ("H", "e"))
        cone = RationalCone.from_rays(2, [v(0, 1), v(1, -1)])
        dual = dual_cone(form, cone)
        assert dual.rays == (v(1, -1), v(1, 0))

    def test_intersect(self):
        """Intersecting two quadrants gives their common ray."""
        first = RationalCone.from_rays(2, [v(1, 0), v(0, 1)])
        second = RationalCone.from_rays(2, [v(1, 0), v(0, -1)])
        assert intersect(first, second).rays == (v(1, 0),)

    def test_duality_check_agrees_with_bidual(self, rng):
        """verify_duality accepts every computed dual, under the dot product and a hyperbolic form."""
        hyperbolic = IntersectionForm(((1, 0, 0), (0, -1, 0), (0, 0, -1)), ("H", "e_1", "e_2"))
        for form in (standard(3), hyperbolic):
            for _ in range(15):
                cone = random_cone(rng, 3, rng.randint(1, 5))
                assert verify_duality(form, cone, dual_cone(form, cone))

    def test_duality_check_rejects_missing_ray(self, m3):
        nef = dual_cone(m3.form, cone_of_curves(m3))
        smaller = RationalCone(nef.ambient_rank, nef.rays[:-1])
        assert not verify_duality(m3.form, cone_of_curves(m3), smaller)

    def test_duality_check_rejects_extra_ray(self, m3):
        """E_{1,1} pairs negatively with itself, so it is not a nef class."""
        nef = dual_cone(m3.form, cone_of_curves(m3))
        larger = RationalCone.from_rays(nef.ambient_rank, nef.rays + (v(0, 1, 0, 0),))
        assert not verify_duality(m3.form, cone_of_curves(m3), larger)


class TestMembership:
    """Test membership and its certificates."""

    def test_member_with_coefficients(self):
        """(2,2) = (1,0) + (1,2)."""
        cone = RationalCone.from_rays(2, [v(1, 0), v(1, 2)])
        cert = contains(standard(2), cone, v(2, 2))
        assert cert.member
        assert cert.coefficients == (Fraction(1), Fraction(1))

    def test_rational_coefficients(self):
        """Coefficients may be fractional."""
        cone = RationalCone.from_rays(2, [v(1, 1), v(1, -1)])
        cert = ray_membership(cone, v(1, 0))
        assert cert.coefficients == (Fraction(1, 2), Fraction(1, 2))

    def test_separating_functional(self):
        """A point outside gets a functional that separates it."""
        cone = RationalCone.from_rays(2, [v(1, 0), v(1, 2)])
        x = v(0, 1)
        cert = ray_membership(cone, x)
        assert not cert.member
        f = cert.separating_functional
        assert all(sum(a * b for a, b in zip(f, r)) >= 0 for r in cone.rays)
        assert sum(a * b for a, b in zip(f, x)) < 0
        assert verify_certificate(cone, x, cert)

    def test_zero_is_always_member(self):
        cone = RationalCone.from_rays(2, [v(1, 0)])
        assert ray_membership(cone, v(0, 0)).member

    def test_empty_cone(self):
        """Only 0 lies in the cone with no rays."""
        cone = RationalCone(2, ())
        cert = ray_membership(cone, v(1, 1))
        assert not cert.member
        assert verify_certificate(cone, v(1, 1), cert)

    def test_random_certificates_verify(self, rng):
        """Every certificate returned for random data checks out."""
        for _ in range(40):
            cone = random_cone(rng, 4, rng.randint(1, 6))
            x = v(*(rng.randint(-4, 4) for _ in range(4)))
            assert verify_certificate(cone, x, ray_membership(cone, x))

    def test_dimension_mismatch(self):
        cone = RationalCone.from_rays(2, [v(1, 0)])
        with pytest.raises(DimensionMismatch):
            ray_membership(cone, v(1, 0, 0))


class TestExtremalRays:
    """Test redundancy removal and cone equality."""

    def test_redundant_ray_dropped(self):
        """(1,1) is a combination of (1,0) and (0,1)."""
        cone = RationalCone.from_rays(2, [v(1, 0), v(1, 1), v(0, 1)], ["a", "b", "c"])
        extremal = extremal_rays(cone)
        assert extremal.rays == (v(1, 0), v(0, 1))
        assert extremal.labels == ("a", "c")

    def test_cone_equal(self):
        """Equality ignores redundant generators."""
        quadrant = RationalCone.from_rays(2, [v(1, 0), v(0, 1)])
        padded = RationalCone.from_rays(2, [v(1, 0), v(1, 1), v(0, 1)])
        narrow = RationalCone.from_rays(2, [v(1, 0), v(1, 1)])
        assert cone_equal(quadrant, padded)
        assert not cone_equal(quadrant, narrow)

    def test_cone_equal_rank_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cone_equal(RationalCone.from_rays(2, [v(1, 0)]), RationalCone.from_rays(3, [v(1, 0, 0)]))
