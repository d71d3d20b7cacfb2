import itertools
import math

from django.test import SimpleTestCase

from cartogram.tests.factories import NOTCHED, grid_subdivision, star_polygon, two_squares
from cartogram.utils.config import RunConfig
from cartogram.utils.geometry import (
    ChordArc, Point, SimplePolygon, arc_crosses_segment, arc_in_polygon, arcs_intersect, segment_area,
)
from cartogram.utils.skeleton import (
    STRONG, WEAK, compute_skeletons, edge_capacities, max_sagitta, sea_max_sagitta, straight_skeleton,
)
from cartogram.utils.subdivision import dual_graph

SQUARE_CAPACITY = math.pi / 2 - 1


def max_bent_arcs(polygon, skeleton=None):
    skeleton = skeleton or straight_skeleton(polygon)
    return [ChordArc(a, b, max_sagitta((a, b), skeleton.region(i))) for i, (a, b) in enumerate(polygon.edges())]


class StraightSkeletonTests(SimpleTestCase):
    def test_square_gives_four_unit_triangles(self):
        square = SimplePolygon.from_coords([(0, 0), (2, 0), (2, 2), (0, 2)])
        skeleton = straight_skeleton(square)
        self.assertEqual(len(skeleton.regions), 4)
        for region in skeleton.regions:
            self.assertAlmostEqual(region.area, 1.0, places=9)

    def test_rectangle_regions(self):
        rectangle = SimplePolygon.from_coords([(0, 0), (4, 0), (4, 2), (0, 2)])
        areas = [round(region.area, 9) for region in straight_skeleton(rectangle).regions]
        self.assertEqual(areas, [3, 1, 3, 1])

    def test_l_shape_partitions_the_polygon(self):
        l_shape = SimplePolygon.from_coords([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)])
        skeleton = straight_skeleton(l_shape)
        self.assertAlmostEqual(skeleton.area, l_shape.area, places=9)
        for i, region in enumerate(skeleton.regions):
            a, b = l_shape.edges()[i]
            self.assertTrue(region.contains(a))
            self.assertTrue(region.contains(b))

    def test_notch_tip_splits_the_wavefront(self):
        notched = SimplePolygon.from_coords(NOTCHED)
        skeleton = straight_skeleton(notched)
        self.assertAlmostEqual(skeleton.area, notched.area, places=9)
        tip = Point(5, 1)
        split = [q if p.distance_to(tip) < 1e-9 else p for p, q in skeleton.ridges
                 if tip.distance_to(p) < 1e-9 or tip.distance_to(q) < 1e-9]
        below = [p for p in split if abs(p.x - 5) < 1e-6 and p.y < 0.5]
        self.assertTrue(below)
        # the tip runs down at 1 / sin(half notch angle) while the bottom edge rises at 1
        speed = 1 / math.sin(math.atan2(0.5, 3))
        for p in below:
            self.assertAlmostEqual(p.y, 1 / (1 + speed), places=6)

    def test_random_star_polygons_are_partitioned(self):
        for seed in range(200):
            polygon = star_polygon(5 + seed % 26, seed)
            skeleton = straight_skeleton(polygon)
            self.assertLessEqual(abs(skeleton.area - polygon.area), 1e-8 * polygon.area, seed)

    def test_ridges_stay_inside(self):
        polygon = star_polygon(12, 7)
        for p, q in straight_skeleton(polygon).ridges:
            self.assertTrue(polygon.contains(p, 1e-7))
            self.assertTrue(polygon.contains(q, 1e-7))


class MaxSagittaTests(SimpleTestCase):
    def test_square_edge_stops_at_the_diagonals(self):
        square = SimplePolygon.from_coords([(0, 0), (2, 0), (2, 2), (0, 2)])
        region = straight_skeleton(square).region(0)
        h = max_sagitta(square.edge_arc(0), region)
        self.assertAlmostEqual(h, math.sqrt(2) - 1, places=6)
        self.assertTrue(arc_in_polygon(square.edge_arc(0, h), region))

    def test_max_bent_arcs_never_cross(self):
        for seed in range(50):
            polygon = star_polygon(5 + seed % 20, seed)
            arcs = max_bent_arcs(polygon)
            for i, j in itertools.combinations(range(len(arcs)), 2):
                self.assertFalse(arcs_intersect(arcs[i], arcs[j]), (seed, i, j))

    def test_sliver_triangle_arcs_only_touch(self):
        sliver = SimplePolygon.from_coords([(0, 0), (10, 0), (10, 0.2)])
        arcs = max_bent_arcs(sliver)
        for u, v in itertools.combinations(arcs, 2):
            self.assertFalse(arcs_intersect(u, v))

    def test_max_bent_arc_stays_clear_of_the_ridges(self):
        for seed in range(20):
            polygon = star_polygon(5 + seed % 12, seed)
            skeleton = straight_skeleton(polygon)
            for i, arc in enumerate(max_bent_arcs(polygon, skeleton)):
                for p, q in skeleton.ridges:
                    self.assertFalse(arc_crosses_segment(arc, p, q), (seed, i, p, q))

    def test_result_respects_the_ratio_cap(self):
        region = SimplePolygon.from_coords([(0, 0), (2, 0), (2, 10), (0, 10)])
        edge = ChordArc(Point(0, 0), Point(2, 0))
        self.assertAlmostEqual(max_sagitta(edge, region, max_sagitta_ratio=0.5), 0.5)
        self.assertAlmostEqual(max_sagitta(edge, region), 1.0)

    def test_sea_border_of_a_lone_square(self):
        s = grid_subdivision(1, 1)
        e = s.sea.boundary[0]
        h = sea_max_sagitta(s, e)
        self.assertGreater(h, 0)
        self.assertLessEqual(h, s.edge_length(e) / 2)


class EdgeCapacityTests(SimpleTestCase):
    def test_two_squares_share_one_border(self):
        s = two_squares(0.1)
        g = dual_graph(s)
        caps = edge_capacities(s, g, WEAK, s.deltas())
        west, east = s.face_index('west'), s.face_index('east')
        self.assertAlmostEqual(caps[(west, east)].total, SQUARE_CAPACITY, places=6)
        self.assertAlmostEqual(caps[(east, west)].total, SQUARE_CAPACITY, places=6)
        (bend,) = caps[(west, east)].edges
        self.assertAlmostEqual(bend.capacity, segment_area(bend.length, bend.max_sagitta))

    def test_strong_mode_only_lets_shrinking_faces_ship(self):
        s = two_squares(0.1)
        g = dual_graph(s)
        caps = edge_capacities(s, g, STRONG, s.deltas())
        west, east = s.face_index('west'), s.face_index('east')
        self.assertGreater(caps[(west, east)].total, 0)
        self.assertEqual(caps[(east, west)].total, 0)

    def test_precomputed_skeletons_are_reused(self):
        s = grid_subdivision(2, 2)
        config = RunConfig()
        skeletons = compute_skeletons(s, config.geom_eps)
        g = dual_graph(s)
        first = edge_capacities(s, g, WEAK, {}, config, skeletons)
        second = edge_capacities(s, g, WEAK, {}, config)
        self.assertEqual(first.keys(), second.keys())
        for key in first:
            self.assertAlmostEqual(first[key].total, second[key].total)
