from django.test import SimpleTestCase

from cartogram.exceptions import DomainError
from cartogram.tests.factories import grid_subdivision, two_squares
from cartogram.utils.metrics import FaceReport, build_report, face_metrics, summarize


def row(name, rate, error, absolute=0.0):
    return FaceReport(name, 4.0, 4.0, 4.0, 0.0, rate, error, absolute)


class FaceMetricsTests(SimpleTestCase):
    def test_target_reached(self):
        self.assertEqual(face_metrics(4, 6, 6), (1.0, 0.0))

    def test_half_way(self):
        rate, error = face_metrics(4, 6, 5)
        self.assertAlmostEqual(rate, 0.5)
        self.assertAlmostEqual(error, 1 / 6)

    def test_no_change_wanted(self):
        rate, error = face_metrics(4, 4, 4.5)
        self.assertIsNone(rate)
        self.assertAlmostEqual(error, 0.125)

    def test_overshoot_and_wrong_direction(self):
        self.assertAlmostEqual(face_metrics(4, 6, 7)[0], 1.5)
        self.assertAlmostEqual(face_metrics(4, 6, 3)[0], -0.5)

    def test_rejects_non_positive_target(self):
        with self.assertRaises(DomainError):
            face_metrics(4, 0, 4)


class SummarizeTests(SimpleTestCase):
    def test_means_skip_faces_without_a_rate(self):
        summary = summarize([row('a', 1.0, 0.0), row('b', None, 0.2), row('c', 0.5, 0.1, 0.4)])
        self.assertAlmostEqual(summary.average_success_rate, 0.75)
        self.assertAlmostEqual(summary.average_error, 0.1)
        self.assertAlmostEqual(summary.total_error, 0.4)
        self.assertEqual(summary.zero_error_faces, 2)
        self.assertEqual(summary.faces, 3)

    def test_empty_input_is_rejected(self):
        with self.assertRaises(DomainError):
            summarize([])


class BuildReportTests(SimpleTestCase):
    def test_report_over_two_squares(self):
        s = two_squares(0.5)
        west, east = s.face_index('west'), s.face_index('east')
        report = build_report(s, {west: 3.75, east: 4.25, s.sea_face: 0.0}, 0.25, 0.5)
        by_name = {r.name: r for r in report.faces}
        self.assertAlmostEqual(by_name['west'].success_rate, 0.5)
        self.assertAlmostEqual(by_name['east'].cartographic_error, 0.25 / 4.5)
        self.assertAlmostEqual(report.average_success_rate, 0.5)
        self.assertEqual(report.mode, 'weak')
        self.assertEqual(len(report.faces), 2)

    def test_zero_target_reports_absolute_error(self):
        s = grid_subdivision(1, 2, targets={'r00': 0.0, 'r01': 8.0})
        report = build_report(s, {0: 1.0, 1: 7.0, s.sea_face: 0.0}, 3.0, 4.0)
        empty = report.faces[0]
        self.assertAlmostEqual(empty.cartographic_error, 1.0)
        self.assertAlmostEqual(empty.success_rate, 0.75)

    def test_as_dict_stringifies_violations(self):
        s = two_squares(0.0)
        report = build_report(s, {0: 4.0, 1: 4.0, s.sea_face: 0.0}, 0.0, 0.0, violations=['edge 3: bad'])
        self.assertEqual(report.as_dict()['violations'], ['edge 3: bad'])
        self.assertEqual(report.summary.zero_error_faces, 2)
