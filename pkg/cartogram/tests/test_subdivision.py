import math
from dataclasses import replace

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from cartogram.exceptions import DomainError, TopologyError
from cartogram.tests.factories import face_name, grid_polygons, grid_subdivision, square_ring
from cartogram.utils.subdivision import (
    SEA_NAME, apply_targets, build_from_polygons, dual_graph, merge_degree2, normalize_weights,
    refine, validate,
)


class BuildFromPolygonsTests(SimpleTestCase):
    def test_grid_builds_a_valid_subdivision(self):
        s = grid_subdivision(3, 3)
        self.assertEqual(len(s.land_faces()), 9)
        self.assertEqual(len(s.vertices), 16)
        self.assertEqual(s.sea.name, SEA_NAME)
        self.assertEqual(validate(s), [])

    def test_half_edges_pair_up(self):
        s = grid_subdivision(2, 2)
        for e in s.half_edges:
            twin = s.half_edges[e.twin]
            self.assertEqual(twin.twin, e.index)
            self.assertEqual(s.destination(e.index), twin.origin)
        self.assertEqual(len(s.undirected_edges()) * 2, len(s.half_edges))

    def test_snaps_nearly_coincident_vertices(self):
        s = build_from_polygons([
            ('a', square_ring(0, 0), None),
            ('b', [(2 + 1e-9, 0), (4, 0), (4, 2), (2, 2 - 1e-9)], None),
        ])
        self.assertEqual(len(s.vertices), 6)
        self.assertEqual(validate(s), [])

    def test_splits_t_junctions(self):
        s = build_from_polygons([
            ('tall', [(0, 0), (2, 0), (2, 4), (0, 4)], None),
            ('low', square_ring(2, 0), None),
            ('high', square_ring(2, 2), None),
        ])
        tall = s.faces[s.face_index('tall')]
        self.assertEqual(len(tall.ring), 5)
        self.assertEqual(validate(s), [])

    def test_clockwise_rings_are_reoriented(self):
        s = build_from_polygons([('cw', list(reversed(square_ring(0, 0))), None)])
        self.assertAlmostEqual(s.faces[0].initial_area, 4.0)

    def test_overlap_is_rejected(self):
        with self.assertRaises(TopologyError) as ctx:
            build_from_polygons([('a', square_ring(0, 0), None), ('b', square_ring(1, 1), None)])
        self.assertEqual(ctx.exception.code, 'overlap')
        self.assertEqual(sorted(ctx.exception.params['faces']), ['a', 'b'])

    def test_self_intersection_is_rejected(self):
        with self.assertRaises(TopologyError) as ctx:
            build_from_polygons([('bowtie', [(0, 0), (2, 2), (2, 0), (0, 2)], None)])
        self.assertEqual(ctx.exception.code, 'self_intersection')

    def test_enclosed_gap_is_rejected(self):
        polygons = [(f"cell{i}", square_ring(x, y), None)
                    for i, (x, y) in enumerate([(0, 0), (2, 0), (4, 0), (0, 2), (4, 2), (0, 4), (2, 4), (4, 4)])]
        with self.assertRaises(TopologyError) as ctx:
            build_from_polygons(polygons)
        self.assertEqual(ctx.exception.code, 'dangling')

    def test_duplicate_names_are_rejected(self):
        name = face_name()
        with self.assertRaises(TopologyError):
            build_from_polygons([(name, square_ring(0, 0), None), (name, square_ring(2, 0), None)])

    def test_explicit_sea_must_reach_the_exterior(self):
        polygons = grid_polygons(3, 3)
        with self.assertRaises(TopologyError) as ctx:
            build_from_polygons(polygons, sea=4)
        self.assertEqual(ctx.exception.code, 'multiple_sea')

    def test_face_index_accepts_names_and_indices(self):
        s = grid_subdivision(1, 2)
        self.assertEqual(s.face_index('r01'), 1)
        self.assertEqual(s.face_index('0'), 0)
        with self.assertRaises(DomainError):
            s.face_index('atlantis')


class ValidateTests(SimpleTestCase):
    def test_reports_wrong_area(self):
        s = grid_subdivision(1, 2)
        broken = replace(s, faces=(replace(s.faces[0], initial_area=99.0),) + s.faces[1:])
        rules = {v.rule for v in validate(broken)}
        self.assertIn('area', rules)

    def test_reports_weighted_sea(self):
        s = grid_subdivision(1, 1)
        sea = replace(s.sea, weight=1.0)
        broken = replace(s, faces=tuple(sea if f.is_sea else f for f in s.faces))
        self.assertIn('sea', {v.rule for v in validate(broken)})

    def test_violation_text_names_entity_and_rule(self):
        s = grid_subdivision(1, 1)
        broken = replace(s, faces=(replace(s.faces[0], initial_area=1.0),) + s.faces[1:])
        self.assertIn('[area]', str(validate(broken)[0]))


class WeightTests(SimpleTestCase):
    def test_normalized_targets_sum_to_land_area(self):
        s = build_from_polygons([
            ('small', [(0, 0), (1, 0), (1, 1), (0, 1)], None),
            ('large', [(1, 0), (4, 0), (4, 1), (1, 1)], None),
        ])
        targets = normalize_weights(s, {'small': 1, 'large': 1})
        self.assertAlmostEqual(targets[0].target, 2.0)
        self.assertAlmostEqual(targets[1].target, 2.0)
        self.assertAlmostEqual(targets[0].delta, 1.0)
        self.assertAlmostEqual(targets[1].delta, -1.0)

    def test_three_faces_example(self):
        s = build_from_polygons([
            ('a', [(0, 0), (1, 0), (1, 1), (0, 1)], None),
            ('b', [(1, 0), (3, 0), (3, 1), (1, 1)], None),
            ('c', [(3, 0), (6, 0), (6, 1), (3, 1)], None),
        ])
        targets = normalize_weights(s, {'a': 3, 'b': 2, 'c': 1})
        self.assertEqual([round(targets[f].target, 9) for f in range(3)], [3, 2, 1])
        self.assertAlmostEqual(math.fsum(t.delta for t in targets.values()), 0.0)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.1, 10.0), min_size=9, max_size=9), st.floats(0.01, 100.0))
    def test_normalizing_is_idempotent_and_ignores_scale(self, raw, factor):
        s = grid_subdivision(3, 3)
        targets = normalize_weights(s, dict(enumerate(raw)))
        again = normalize_weights(s, {f: t.target for f, t in targets.items()})
        scaled = normalize_weights(s, {f: w * factor for f, w in enumerate(raw)})
        for f, target in targets.items():
            self.assertAlmostEqual(again[f].target, target.target, places=9)
            self.assertAlmostEqual(scaled[f].target, target.target, places=9)

    def test_land_face_named_like_the_sea_is_rejected(self):
        with self.assertRaises(DomainError) as ctx:
            build_from_polygons([(SEA_NAME, square_ring(0, 0), None), ('a', square_ring(2, 0), None)])
        self.assertEqual(ctx.exception.code, 'reserved_name')
        s = build_from_polygons([('a', square_ring(0, 0), None), (SEA_NAME, square_ring(2, 0), None)], sea=1)
        self.assertEqual(s.sea.name, SEA_NAME)

    def test_non_positive_weight_is_rejected(self):
        s = grid_subdivision(1, 2)
        with self.assertRaises(DomainError):
            normalize_weights(s, {'r00': 0, 'r01': 1})

    def test_missing_weight_is_rejected(self):
        s = grid_subdivision(1, 2)
        with self.assertRaises(DomainError):
            normalize_weights(s, {'r00': 1})

    def test_absolute_targets_allow_zero(self):
        s = grid_subdivision(1, 2)
        targets = apply_targets(s, {'r00': 0.0, 'r01': 5.0})
        self.assertEqual(targets[0].target, 0.0)
        self.assertAlmostEqual(targets[0].delta, -4.0)

    def test_negative_absolute_target_is_rejected(self):
        s = grid_subdivision(1, 2)
        with self.assertRaises(DomainError):
            apply_targets(s, {'r00': -1.0, 'r01': 5.0})


class DualGraphTests(SimpleTestCase):
    def test_grid_adjacencies(self):
        s = grid_subdivision(2, 2)
        g = dual_graph(s)
        land = [(u, v) for u, v in g.adjacencies() if not s.is_sea(u) and not s.is_sea(v)]
        self.assertEqual(len(land), 4)
        self.assertEqual(len(g.directed_edges()), 2 * len(g.adjacencies()))

    def test_shared_half_edges_belong_to_the_first_face(self):
        s = grid_subdivision(1, 2)
        g = dual_graph(s)
        for e in g.shared(0, 1):
            self.assertEqual(s.half_edges[e].face, 0)
            self.assertEqual(s.half_edges[s.half_edges[e].twin].face, 1)


class RefineAndMergeTests(SimpleTestCase):
    def test_refine_keeps_areas(self):
        s = grid_subdivision(2, 2)
        fine = refine(s, 4)
        self.assertEqual(validate(fine), [])
        for before, after in zip(s.land_faces(), fine.land_faces()):
            self.assertAlmostEqual(before.initial_area, after.initial_area)
            self.assertEqual(len(after.ring), 4 * len(before.ring))

    def test_merge_drops_degree2_vertices(self):
        fine = refine(grid_subdivision(1, 2), 3)
        merged = merge_degree2(fine)
        self.assertEqual(validate(merged), [])
        self.assertLess(sum(len(f.ring) for f in merged.land_faces()),
                        sum(len(f.ring) for f in fine.land_faces()))

    def test_merge_keeps_corners(self):
        s = grid_subdivision(3, 3)
        merged = merge_degree2(s)
        self.assertEqual(len(merged.vertices), 16)
        for face in merged.land_faces():
            self.assertAlmostEqual(face.initial_area, 4.0)

    def test_merge_restores_refined_grid(self):
        s = grid_subdivision(2, 2)
        merged = merge_degree2(refine(s, 3))
        self.assertEqual(validate(merged), [])
        self.assertEqual(len(merged.vertices), len(s.vertices))
        used = {v for face in merged.faces for v in face.ring}
        self.assertEqual(used, set(range(len(merged.vertices))))
        for before, after in zip(s.land_faces(), merged.land_faces()):
            self.assertAlmostEqual(before.initial_area, after.initial_area)

    def test_merge_keeps_a_bent_pentagon(self):
        s = build_from_polygons([('a', [(0, 0), (2, 0), (3, 1), (2, 2), (0, 2)], None)])
        merged = merge_degree2(s)
        self.assertEqual(len(merged.faces[0].ring), 5)
        self.assertAlmostEqual(merged.faces[0].initial_area, s.faces[0].initial_area)

    def test_refine_rejects_zero_parts(self):
        with self.assertRaises(DomainError):
            refine(grid_subdivision(1, 1), 0)
