"""
Assembles a monotone formula into one gadget subdivision.

Variable gadgets sit on a line in layout order. Positive clauses are built
above the row, negative ones mirrored below it. A clause at depth d has its
middle stub at y = 1 + 8d; its outer legs climb to y = 5 + 8d and turn
towards the clause. Sea pockets enclosed by pipes become faces that keep
their area.
"""

import logging
import math
from dataclasses import dataclass, field

from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import unary_union

from cartogram.utils.documents import document_from_subdivision
from cartogram.utils.subdivision import Subdivision, apply_targets, build_from_polygons
from gadgets.exceptions import LayoutError
from gadgets.utils.builders import (
    CONNECTOR_HEIGHT, POCKET, RECT_HEIGHT, SKINNY, Fragment, GadgetFace, build_clause_gadget,
    build_variable_gadget, rectangle, surviving_configurations, turn_square,
)

logger = logging.getLogger(__name__)

MAX_DEPTH = 2
GADGET_GAP = 2
GRID = 4


def clause_base(depth):
    return 1 + 8 * depth


@dataclass(frozen=True)
class GadgetInstance:
    subdivision: Subdivision
    targets: dict = field(default_factory=dict)
    fragment: Fragment = field(default_factory=Fragment)
    variables: tuple = ()
    clauses: tuple = ()
    depths: dict = field(default_factory=dict)
    survivors: dict = field(default_factory=dict)

    @property
    def sea_delta(self):
        """Change the implicit sea absorbs so that all changes sum to zero."""
        return 0.0 - math.fsum(face.delta for face in self.fragment.faces)

    def document(self):
        return document_from_subdivision(self.subdivision, self.targets, 'absolute')


def _leg_key(positions, index, ordered, k):
    left, right = positions[ordered[0]], positions[ordered[2]]
    here = positions[ordered[k]]
    span = right - left
    if span and here == right:
        return (0, span, -index, k)
    if span and here == left:
        return (2, -span, index, k)
    return (1, 0 if span == 0 else 1, index, k)


def _legs(formula, positive):
    """Per variable, the (clause, leg) pairs of one side in left-to-right connector order."""
    positions = formula.positions()
    legs = {v: [] for v in formula.order}
    for index, clause in formula.clauses_on(positive):
        ordered = sorted(clause.variables, key=positions.get)
        for k, v in enumerate(ordered):
            legs[v].append((_leg_key(positions, index, ordered, k), index, k))
    return {v: [(index, k) for _, index, k in sorted(entries)] for v, entries in legs.items()}


def _nesting(spans, forced):
    """Depth per clause from its leg positions; crossing clauses are rejected."""
    inner = {c: [] for c in spans}
    for c, (xl, xm, xr) in spans.items():
        for d, (yl, _, yr) in spans.items():
            if c == d or yr < xl or xr < yl:
                continue
            if xl < yl and yr < xr and (yr < xm or yl > xm):
                inner[c].append(d)
            elif not (yl < xl and xr < yr):
                raise LayoutError(
                    "Clauses %(first)s and %(second)s cross.",
                    code='crossing_clauses', params={'first': c, 'second': d})
    depths = {}
    for c in sorted(spans, key=lambda c: spans[c][2] - spans[c][0]):
        required = 1 + max((depths[d] for d in inner[c]), default=0)
        depth = forced.get(c) or required
        if depth < required:
            raise LayoutError(
                "Clause %(clause)s is forced to depth %(depth)s but encloses depth %(inner)s.",
                code='forced_depth', params={'clause': c, 'depth': depth, 'inner': required - 1})
        if depth > MAX_DEPTH:
            raise LayoutError(
                "Clause %(clause)s needs nesting depth %(depth)s; at most %(max)s is supported.",
                code='too_deep', params={'clause': c, 'depth': depth, 'max': MAX_DEPTH})
        depths[c] = depth
    return depths


def _run(label, x0, x1, y):
    faces = []
    x = x0
    while x1 - x >= 4:
        faces.append(rectangle(f"{label}{len(faces)}", x, y, x + 4, y + 2))
        x += 4
    if x1 > x:
        faces.append(rectangle(f"{label}{len(faces)}", x, y, x1, y + 2))
    return faces


def _column(label, x, y0, y1):
    return [rectangle(f"{label}{k}", x, y, x + 2, y + 4) for k, y in enumerate(range(y0, y1, 4))]


def _clause_faces(label, xs, depth):
    xl, xm, xr = xs
    base = clause_base(depth)
    turn = base + 4
    faces = _column(f"{label}.m.pipe", xm, CONNECTOR_HEIGHT, base)
    faces += _column(f"{label}.l.pipe", xl, CONNECTOR_HEIGHT, turn)
    faces += _column(f"{label}.r.pipe", xr, CONNECTOR_HEIGHT, turn)
    faces += turn_square(f"{label}.l.turn", xl, turn, ('left', 'top'))
    faces += turn_square(f"{label}.r.turn", xr, turn, ('right', 'top'))
    faces += _run(f"{label}.l.run", xl + 2, xm - 4, turn)
    faces += _run(f"{label}.r.run", xm + 6, xr, turn)
    faces += build_clause_gadget(label).moved(xm, base).faces
    return faces


def _snapped(value):
    return round(value * GRID) / GRID


def _pockets(faces):
    """Faces for the sea regions the gadget encloses, ordered by their lower-left corner."""
    union = unary_union([ShapelyPolygon(face.ring) for face in faces])
    parts = list(union.geoms) if hasattr(union, 'geoms') else [union]
    holes = [interior for part in parts for interior in part.interiors]
    holes.sort(key=lambda ring: ring.bounds[:2])
    pockets = []
    for k, hole in enumerate(holes):
        ring = [(_snapped(x), _snapped(y)) for x, y in list(hole.coords)[:-1]]
        pockets.append(GadgetFace(f"pocket{k}", tuple(ring), abs(ShapelyPolygon(ring).area), POCKET))
    return pockets


def compile_formula(formula):
    """Gadget subdivision for a monotone formula; targets are absolute areas."""
    if not formula.order:
        return GadgetInstance(Subdivision())

    sides = {True: _legs(formula, True), False: _legs(formula, False)}
    faces = []
    survivors = {}
    leg_x = {}
    cursor = 0
    for v in formula.order:
        gadget = build_variable_gadget(len(sides[True][v]), len(sides[False][v]), name=f"x{v}")
        width = max(x for face in gadget.faces for x, _ in face.ring)
        gadget = gadget.moved(cursor)
        survivors.update(surviving_configurations(gadget, (SKINNY,)))
        faces.extend(gadget.faces)
        for positive, side in ((True, '+'), (False, '-')):
            xs = [x for s, x in gadget.connectors if s == side]
            for (index, k), x in zip(sides[positive][v], xs):
                leg_x[(index, k)] = x
        cursor += width + GADGET_GAP

    depths = {}
    for positive in (True, False):
        on_side = formula.clauses_on(positive)
        spans = {index: tuple(leg_x[(index, k)] for k in range(3)) for index, _ in on_side}
        forced = {index: clause.depth for index, clause in on_side if clause.depth}
        side_depths = _nesting(spans, forced)
        depths.update(side_depths)
        for index, _ in on_side:
            clause_faces = _clause_faces(f"c{index}", spans[index], side_depths[index])
            if not positive:
                clause_faces = [face.moved(mirror=RECT_HEIGHT / 2) for face in clause_faces]
            faces.extend(clause_faces)

    faces.extend(_pockets(faces))
    fragment = Fragment(tuple(faces))
    targets = {face.name: face.target for face in faces}
    s = build_from_polygons([(face.name, list(face.ring), face.target) for face in faces])
    s = s.with_targets(apply_targets(s, targets))
    logger.info("compiled %d variables and %d clauses into %d faces",
                len(formula.order), len(formula.clauses), len(faces))
    return GadgetInstance(
        subdivision=s,
        targets=targets,
        fragment=fragment,
        variables=tuple(f"x{v}" for v in formula.order),
        clauses=tuple(f"c{i}" for i in range(len(formula.clauses))),
        depths={f"c{i}": d for i, d in depths.items()},
        survivors=survivors,
    )
