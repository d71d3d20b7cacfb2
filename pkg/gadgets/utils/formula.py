"""
Planar monotone 3-SAT formulas in a line-oriented text format.

    # comment
    order: 3 1 2
    1 2 3
    -1 -3 -2 @2

Each clause line holds three nonzero integers of the same sign. `order:` fixes
the left-to-right variable order (default ascending), `@N` forces a clause's
nesting depth.
"""

from dataclasses import dataclass

from gadgets.exceptions import FormulaError


@dataclass(frozen=True)
class Clause:
    variables: tuple
    positive: bool
    depth: int = None
    line: int = None

    @property
    def side(self):
        return '+' if self.positive else '-'


@dataclass(frozen=True)
class MonotoneFormula:
    variable_count: int = 0
    clauses: tuple = ()
    order: tuple = ()

    def positions(self):
        return {v: i for i, v in enumerate(self.order)}

    def clauses_on(self, positive):
        return [(i, c) for i, c in enumerate(self.clauses) if c.positive == positive]


def _integer(token, line):
    try:
        return int(token)
    except ValueError:
        raise FormulaError("Line %(line)s: %(token)r is not an integer.",
                           code='not_an_integer', params={'line': line, 'token': token})


def _parse_clause(text, line):
    depth = None
    tokens = text.split()
    if tokens and tokens[-1].startswith('@'):
        depth = _integer(tokens.pop()[1:], line)
        if depth < 1:
            raise FormulaError("Line %(line)s: depth must be at least 1.",
                               code='invalid_depth', params={'line': line})
    literals = [_integer(token, line) for token in tokens]
    if len(literals) != 3 or 0 in literals:
        raise FormulaError("Line %(line)s: a clause needs three nonzero literals.",
                           code='clause_arity', params={'line': line})
    if not (all(x > 0 for x in literals) or all(x < 0 for x in literals)):
        raise FormulaError("Line %(line)s: clause mixes positive and negative literals.",
                           code='not_monotone', params={'line': line})
    return Clause(tuple(abs(x) for x in literals), literals[0] > 0, depth, line)


def parse_formula(text):
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise FormulaError("Formula is not UTF-8: %(reason)s",
                               code='encoding', params={'reason': str(e)})
    clauses = []
    order = None
    for line, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        if content.lower().startswith('order:'):
            if order is not None:
                raise FormulaError("Line %(line)s: order given twice.",
                                   code='duplicate_order', params={'line': line})
            order = [_integer(token, line) for token in content[len('order:'):].split()]
            if any(v <= 0 for v in order) or len(set(order)) != len(order):
                raise FormulaError("Line %(line)s: order must list distinct positive variables.",
                                   code='invalid_order', params={'line': line})
            continue
        clauses.append(_parse_clause(content, line))

    used = {v for clause in clauses for v in clause.variables}
    if order is None:
        order = sorted(used)
    missing = used - set(order)
    if missing:
        raise FormulaError("Variables %(missing)s are missing from the order.",
                           code='incomplete_order', params={'missing': sorted(missing)})
    variable_count = max(order, default=0)
    return MonotoneFormula(variable_count, tuple(clauses), tuple(order))
