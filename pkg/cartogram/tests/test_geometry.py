import math
import random

import numpy as np
from django.test import SimpleTestCase
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from shapely.geometry import LineString

from cartogram.exceptions import CapacityError, DomainError
from cartogram.tests.factories import chords, ratios, scales
from cartogram.utils.geometry import (
    ChordArc, Point, SimplePolygon, arc_crosses_segment, arc_in_polygon, arc_radius, arcs_intersect,
    circumcircle, face_area_with_arcs, sagitta_for_area, segment_area, segments_cross,
)


def unit_square():
    return SimplePolygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 1)])


def integrated_segment_area(length, sagitta):
    """Area between chord and minor arc by quadrature over the chord."""
    r = arc_radius(length, sagitta)
    value, _ = quad(lambda x: math.sqrt(r * r - x * x) - (r - sagitta), -length / 2, length / 2,
                    epsabs=1e-13, epsrel=1e-13)
    return value


def random_arc(rng):
    while True:
        a = Point(rng.uniform(0, 10), rng.uniform(0, 10))
        b = Point(rng.uniform(0, 10), rng.uniform(0, 10))
        length = a.distance_to(b)
        if length > 0.5:
            return ChordArc(a, b, rng.uniform(-1, 1) * length / 2)


def polyline_crossing(u, v, count):
    """Sampled verdict, or None when the polylines meet next to an endpoint."""
    hit = LineString(u.sample(count)).intersection(LineString(v.sample(count)))
    if hit.is_empty:
        return False
    points = [hit] if hit.geom_type == 'Point' else list(getattr(hit, 'geoms', [hit]))
    ends = [(p.x, p.y) for p in (u.a, u.b, v.a, v.b)]
    for point in points:
        if point.geom_type != 'Point':
            return None
        if min(math.dist((point.x, point.y), e) for e in ends) < 1e-3:
            return None
    return True


class SegmentAreaTests(SimpleTestCase):
    def test_half_disk_of_radius_two_is_two_pi(self):
        self.assertAlmostEqual(segment_area(4, 2), 2 * math.pi, delta=2 * math.pi * 1e-12)

    def test_half_disk_of_radius_one(self):
        self.assertAlmostEqual(segment_area(2, 1), math.pi / 2, places=12)

    def test_zero_sagitta_is_zero(self):
        self.assertEqual(segment_area(3, 0), 0.0)

    def test_tiny_sagitta_keeps_precision(self):
        # parabolic limit 2/3 * L * h
        self.assertAlmostEqual(segment_area(1, 1e-8) / (2 / 3 * 1e-8), 1.0, places=6)

    def test_rejects_bad_input(self):
        with self.assertRaises(DomainError):
            segment_area(0, 1)
        with self.assertRaises(DomainError):
            segment_area(1, -0.5)
        with self.assertRaises(DomainError):
            segment_area(math.inf, 0.5)

    @settings(max_examples=1000, deadline=None)
    @given(chords, ratios, scales)
    def test_scales_with_the_square_of_the_factor(self, length, ratio, factor):
        h = ratio * length / 2
        expected = factor * factor * segment_area(length, h)
        self.assertLessEqual(abs(segment_area(factor * length, factor * h) - expected),
                             1e-10 * max(1.0, expected))

    @settings(max_examples=500, deadline=None)
    @given(chords, ratios, ratios)
    def test_grows_with_the_sagitta(self, length, first, second):
        low, high = sorted((first, second))
        assume(high > low * (1 + 1e-9))
        self.assertLess(segment_area(length, low * length / 2), segment_area(length, high * length / 2))

    @settings(max_examples=200, deadline=None)
    @given(chords)
    def test_half_circle_identity(self, length):
        expected = math.pi * length * length / 8
        self.assertLessEqual(abs(segment_area(length, length / 2) - expected), 1e-12 * expected)

    def test_agrees_with_quadrature(self):
        for length, h in ((2, 0.5), (3, 0.1), (1, 0.4), (10, 1)):
            self.assertAlmostEqual(segment_area(length, h), integrated_segment_area(length, h), places=10)


class SagittaForAreaTests(SimpleTestCase):
    def test_recovers_half_circle(self):
        self.assertAlmostEqual(sagitta_for_area(4, 2 * math.pi), 2.0, places=9)

    def test_zero_area_is_straight(self):
        self.assertEqual(sagitta_for_area(3, 0), 0.0)

    def test_area_beyond_cap_reports_maximum(self):
        with self.assertRaises(CapacityError) as ctx:
            sagitta_for_area(2, 10)
        self.assertAlmostEqual(ctx.exception.maximum, math.pi / 2, places=12)

    def test_cap_follows_ratio(self):
        with self.assertRaises(CapacityError):
            sagitta_for_area(2, math.pi / 2, max_sagitta_ratio=0.5)

    @settings(max_examples=1000, deadline=None)
    @given(chords, st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    def test_round_trip(self, length, fraction):
        area = fraction * segment_area(length, length / 2)
        h = sagitta_for_area(length, area)
        self.assertLessEqual(abs(segment_area(length, h) - area), 1e-10 * max(1.0, area))

    def test_inverse_checked_by_quadrature(self):
        h = sagitta_for_area(2, 0.5, 1e-10)
        self.assertAlmostEqual(segment_area(2, h), 0.5, delta=1e-10)
        self.assertAlmostEqual(integrated_segment_area(2, h), 0.5, places=8)


class ArcRadiusTests(SimpleTestCase):
    def test_half_circles(self):
        self.assertEqual(arc_radius(4, 2), 2)
        self.assertEqual(arc_radius(2, 1), 1)

    def test_flat_arc_matches_circumcircle(self):
        self.assertAlmostEqual(arc_radius(10, 1), 13)
        _, radius = circumcircle(Point(0, 0), Point(10, 0), Point(5, 1))
        self.assertAlmostEqual(arc_radius(10, 1), radius)

    def test_straight_edge_has_infinite_radius(self):
        self.assertEqual(arc_radius(3, 0), math.inf)

    @settings(max_examples=200, deadline=None)
    @given(chords, ratios)
    def test_never_below_half_the_chord(self, length, ratio):
        self.assertGreaterEqual(arc_radius(length, ratio * length / 2), length / 2 * (1 - 1e-12))


class ChordArcTests(SimpleTestCase):
    def test_positive_sagitta_bulges_left(self):
        arc = ChordArc(Point(0, 0), Point(2, 0), 1)
        self.assertEqual(arc.apex, Point(1, 1))
        self.assertAlmostEqual(arc.radius, 1.0)
        self.assertAlmostEqual(arc.center.x, 1.0)
        self.assertAlmostEqual(arc.center.y, 0.0)

    def test_reversed_arc_is_the_same_curve(self):
        arc = ChordArc(Point(0, 0), Point(2, 0), 0.5)
        back = arc.reversed()
        self.assertEqual(back.apex, arc.apex)
        self.assertAlmostEqual(back.signed_segment_area, -arc.signed_segment_area)

    def test_samples_stay_on_the_circle(self):
        arc = ChordArc(Point(0, 0), Point(3, 1), -0.7)
        for x, y in arc.sample(9):
            self.assertAlmostEqual(Point(x, y).distance_to(arc.center), arc.radius, places=9)

    def test_bounds_include_the_apex(self):
        min_x, min_y, max_x, max_y = ChordArc(Point(0, 0), Point(2, 0), 1).bounds
        self.assertAlmostEqual(max_y, 1.0)
        self.assertAlmostEqual(min_y, 0.0)


class CircumcircleTests(SimpleTestCase):
    def test_right_triangle_center_is_hypotenuse_midpoint(self):
        center, radius = circumcircle(Point(0, 0), Point(1, 0), Point(0, 1))
        self.assertAlmostEqual(center.x, 0.5)
        self.assertAlmostEqual(center.y, 0.5)
        self.assertAlmostEqual(radius, math.sqrt(0.5))

    def test_collinear_points_raise(self):
        with self.assertRaises(DomainError):
            circumcircle(Point(0, 0), Point(1, 1), Point(2, 2))


class FaceAreaWithArcsTests(SimpleTestCase):
    def test_straight_edges_keep_polygon_area(self):
        self.assertAlmostEqual(face_area_with_arcs(unit_square(), (0, 0, 0, 0)), 1.0)

    def test_outward_bend_adds_segment(self):
        self.assertAlmostEqual(face_area_with_arcs(unit_square(), (-0.5, 0, 0, 0)), 1 + math.pi / 8)

    def test_inward_bend_removes_segment(self):
        self.assertAlmostEqual(face_area_with_arcs(unit_square(), {2: 0.5}), 1 - math.pi / 8)

    def test_inward_bend_by_sampling(self):
        expected = 1 - segment_area(1, 0.2)
        self.assertAlmostEqual(face_area_with_arcs(unit_square(), {0: 0.2}), expected, places=12)
        arc = ChordArc(Point(0, 0), Point(1, 0), 0.2)
        points = np.random.default_rng(7).random((10**6, 2))
        cut = np.hypot(points[:, 0] - arc.center.x, points[:, 1] - arc.center.y) < arc.radius
        self.assertAlmostEqual(1 - cut.mean(), expected, delta=2e-3)

    def test_bend_count_must_match(self):
        with self.assertRaises(DomainError):
            face_area_with_arcs(unit_square(), (0, 0))


class IntersectionTests(SimpleTestCase):
    def test_segments_touching_at_endpoint_do_not_cross(self):
        self.assertFalse(segments_cross(Point(0, 0), Point(1, 0), Point(1, 0), Point(1, 1)))
        self.assertTrue(segments_cross(Point(0, 0), Point(2, 2), Point(0, 2), Point(2, 0)))

    def test_arcs_sharing_only_an_endpoint_do_not_intersect(self):
        u = ChordArc(Point(0, 0), Point(2, 0), 0.5)
        v = ChordArc(Point(2, 0), Point(4, 0), 0.5)
        self.assertFalse(arcs_intersect(u, v))

    def test_crossing_half_circles_intersect(self):
        u = ChordArc(Point(0, 0), Point(2, 0), 1)
        v = ChordArc(Point(1, -0.5), Point(1, 2), 0)
        self.assertTrue(arcs_intersect(u, v))

    def test_tangent_circles_only_touch(self):
        u = ChordArc(Point(0, 1), Point(0, -1), 1)
        v = ChordArc(Point(2, -1), Point(2, 1), 1)
        self.assertFalse(arcs_intersect(u, v))

    def test_lens_touches_only_at_its_corners(self):
        u = ChordArc(Point(0, 0), Point(2, 0), 0.5)
        self.assertFalse(arcs_intersect(u, u.with_sagitta(-0.5)))

    def test_arcs_tangent_at_a_shared_corner_only_touch(self):
        h = math.sqrt(2) - 1
        u = ChordArc(Point(0, 0), Point(2, 0), h)
        v = ChordArc(Point(2, 0), Point(2, 2), h)
        self.assertFalse(arcs_intersect(u, v))
        self.assertFalse(arcs_intersect(v, u))
        self.assertTrue(arcs_intersect(u.with_sagitta(0.6), v.with_sagitta(0.6)))

    def test_arcs_diverging_from_a_sharp_corner(self):
        turn = math.radians(3)
        u = ChordArc(Point(0, 0), Point(10, 0), -1)
        v = ChordArc(Point(0, 0), Point(10 * math.cos(turn), 10 * math.sin(turn)), 1)
        self.assertFalse(arcs_intersect(u, v))
        self.assertTrue(arcs_intersect(u.with_sagitta(1), v.with_sagitta(-1)))

    def test_segment_from_the_arc_endpoint(self):
        arc = ChordArc(Point(0, 0), Point(2, 0), 1)
        self.assertFalse(arc_crosses_segment(arc, Point(0, 0), Point(-1, 1)))
        self.assertTrue(arc_crosses_segment(arc, Point(0, 0), Point(2, 2)))

    def test_half_circle_crosses_a_parallel_chord(self):
        u = ChordArc(Point(0, 0), Point(4, 0), 2)
        v = ChordArc(Point(0, 1), Point(4, 1))
        self.assertTrue(arcs_intersect(u, v))
        diff = u.sample(10**4)[::10, None, :] - v.sample(10**4)[None, ::10, :]
        self.assertLess(np.hypot(diff[..., 0], diff[..., 1]).min(), 1e-2)

    def test_agrees_with_sampled_polylines(self):
        rng = random.Random(11)
        decided = {True: 0, False: 0}
        for _ in range(1000):
            u, v = random_arc(rng), random_arc(rng)
            exact = arcs_intersect(u, v)
            self.assertEqual(exact, arcs_intersect(v, u))
            coarse, fine = polyline_crossing(u, v, 500), polyline_crossing(u, v, 2000)
            if coarse is None or coarse != fine:
                continue
            self.assertEqual(exact, fine, (u, v))
            decided[fine] += 1
        self.assertGreater(decided[True], 20)
        self.assertGreater(decided[False], 20)

    def test_arc_crossing_segment(self):
        arc = ChordArc(Point(0, 0), Point(2, 0), 1)
        self.assertTrue(arc_crosses_segment(arc, Point(0, 0.5), Point(2, 0.5)))
        self.assertFalse(arc_crosses_segment(arc, Point(0, 1.5), Point(2, 1.5)))

    def test_arc_in_triangle_region(self):
        region = SimplePolygon.from_coords([(0, 0), (2, 0), (1, 1)])
        edge = ChordArc(Point(0, 0), Point(2, 0))
        self.assertTrue(arc_in_polygon(edge.with_sagitta(0.4), region))
        self.assertFalse(arc_in_polygon(edge.with_sagitta(0.9), region))

    def test_straight_arc_on_the_region_edge(self):
        region = SimplePolygon.from_coords([(0, 0), (2, 0), (1, 1)])
        self.assertTrue(arc_in_polygon(ChordArc(Point(0, 0), Point(2, 0)), region))

    def test_half_circle_is_deeper_than_a_flat_rectangle(self):
        region = SimplePolygon.from_coords([(0, 0), (4, 0), (4, 1), (0, 1)])
        arc = ChordArc(Point(0, 0), Point(4, 0), 2)
        self.assertFalse(arc_in_polygon(arc, region))
        self.assertFalse(region.to_shapely().covers(LineString(arc.sample(200))))
        self.assertTrue(arc_in_polygon(arc.with_sagitta(0.9), region))
