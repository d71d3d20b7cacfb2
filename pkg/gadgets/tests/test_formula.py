from pathlib import Path

from django.test import SimpleTestCase

from gadgets.exceptions import FormulaError
from gadgets.utils.formula import parse_formula

PLANAR = Path(__file__).resolve().parent.parent / 'fixtures' / 'planar.txt'


class ParseFormulaTests(SimpleTestCase):
    def test_reads_the_planar_fixture(self):
        formula = parse_formula(PLANAR.read_text())
        self.assertEqual(formula.order, (1, 2, 3, 4, 5))
        self.assertEqual(formula.variable_count, 5)
        self.assertEqual(len(formula.clauses), 4)
        self.assertEqual([c.side for c in formula.clauses], ['+', '+', '-', '-'])
        self.assertEqual(formula.clauses[3].variables, (3, 4, 4))

    def test_default_order_is_ascending(self):
        formula = parse_formula("7 2 4\n")
        self.assertEqual(formula.order, (2, 4, 7))
        self.assertEqual(formula.positions(), {2: 0, 4: 1, 7: 2})

    def test_comments_blank_lines_and_forced_depth(self):
        formula = parse_formula("# header\n\n-1 -2 -3 @2  # outer\n")
        (clause,) = formula.clauses
        self.assertFalse(clause.positive)
        self.assertEqual(clause.depth, 2)
        self.assertEqual(clause.line, 3)

    def test_clauses_on_one_side(self):
        formula = parse_formula("1 2 3\n-1 -2 -3\n2 3 3\n")
        self.assertEqual([i for i, _ in formula.clauses_on(True)], [0, 2])
        self.assertEqual([i for i, _ in formula.clauses_on(False)], [1])

    def test_empty_text_is_an_empty_formula(self):
        formula = parse_formula("# nothing here\n")
        self.assertEqual(formula.clauses, ())
        self.assertEqual(formula.order, ())

    def test_errors(self):
        cases = {
            "1 -2 3": 'not_monotone',
            "1 2": 'clause_arity',
            "1 0 2": 'clause_arity',
            "1 two 3": 'not_an_integer',
            "1 2 3 @0": 'invalid_depth',
            "order: 1 1\n1 1 1": 'invalid_order',
            "order: 1\norder: 1\n1 1 1": 'duplicate_order',
            "order: 1 2\n1 2 3": 'incomplete_order',
        }
        for text, code in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(FormulaError) as ctx:
                    parse_formula(text)
                self.assertEqual(ctx.exception.code, code)

    def test_error_names_the_line(self):
        with self.assertRaises(FormulaError) as ctx:
            parse_formula("1 2 3\n\n1 -2 3\n")
        self.assertEqual(ctx.exception.params['line'], 3)
