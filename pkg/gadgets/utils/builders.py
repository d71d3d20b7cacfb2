"""
Gadget fragments: rings with target areas on a quarter-unit grid.

A variable gadget is a row of 2 x 4 rectangles on y in [0, 4]. Connectors
stick out by one unit towards their literal pipe (up for positive, down for
negative literals). Every target-0 triangle vanishes by bending all three of
its edges onto its circumcircle.
"""

import math
from dataclasses import dataclass, replace

from cartogram.utils.geometry import (
    GEOM_EPS, ChordArc, Point, arc_crosses_segment, circumcircle, polygon_signed_area, segment_area,
)

PLAIN = 'plain'
DECISION = 'decision'
CONNECTOR = 'connector'
SKINNY = 'skinny'
RIGHT = 'right'
PIPE = 'pipe'
TURN = 'turn'
CLAUSE = 'clause'
CAP = 'cap'
STUB = 'stub'
POCKET = 'pocket'

TRIANGLE_KINDS = (SKINNY, RIGHT, CAP)

RECT_WIDTH = 2
RECT_HEIGHT = 4
CONNECTOR_HEIGHT = 5
SKINNY_HEIGHT = 0.5


def _ccw(points):
    points = [p if isinstance(p, Point) else Point(*p) for p in points]
    if polygon_signed_area(points) < 0:
        points.reverse()
    return points


def zero_area_triangle_configs(triangle):
    """
    The three sagitta triples that put every edge of a triangle on its circumcircle.

    Vertices are taken counterclockwise (a clockwise triangle is reversed
    first); edge i runs from vertex i to vertex i+1. Configuration k bends
    edge k the long way round, into the triangle, and the other two edges
    outward, so the enclosed area cancels.

    Example:
        (0,0), (1,0), (0,1): the hypotenuse config bends (1,0)->(0,1) by
        sagitta sqrt(2)/2, a half-circle.
    """
    t = _ccw(triangle)
    center, radius = circumcircle(*t)
    offsets = []
    for i in range(3):
        arc = ChordArc(t[i], t[(i + 1) % 3])
        offsets.append((center - arc.midpoint).dot(arc.left_normal))
    return [
        tuple(o + radius if i == k else o - radius for i, o in enumerate(offsets))
        for k in range(3)
    ]


def is_cocircular(points, eps=GEOM_EPS):
    points = _ccw(points) if len(points) == 3 else [p if isinstance(p, Point) else Point(*p) for p in points]
    center, radius = circumcircle(*points[:3])
    return all(abs(center.distance_to(p) - radius) <= eps * max(1.0, radius) for p in points[3:])


def _engulfs(arc, point, eps):
    if arc.is_straight:
        return False
    side = (arc.b - arc.a).cross(point - arc.a) / arc.chord_length
    if side * arc.sagitta <= 0 or abs(side) <= eps:
        return False
    return point.distance_to(arc.center) < arc.radius - eps


def blocked_configurations(triangle, edges, vertices, eps=GEOM_EPS):
    """
    Indices of zero-area configurations that cross a foreign edge or engulf a foreign vertex.

    edges are (p, q) point pairs; the triangle's own edges and vertices are skipped.
    """
    t = _ccw(triangle)
    own_vertices = set(t)
    own_edges = {frozenset((t[i], t[(i + 1) % 3])) for i in range(3)}
    foreign_edges = [(p, q) for p, q in edges if frozenset((p, q)) not in own_edges]
    foreign_vertices = [v for v in vertices if v not in own_vertices]
    blocked = []
    for k, sagittas in enumerate(zero_area_triangle_configs(t)):
        arcs = [ChordArc(t[i], t[(i + 1) % 3], h) for i, h in enumerate(sagittas)]
        if (any(arc_crosses_segment(arc, p, q, eps) for arc in arcs for p, q in foreign_edges)
                or any(_engulfs(arc, v, eps) for arc in arcs for v in foreign_vertices)):
            blocked.append(k)
    return blocked


def segment_gain(base, height):
    """Area a neighbour gains when the isosceles triangle on its edge vanishes with the base bent in."""
    t = [Point(0.0, 0.0), Point(base, 0.0), Point(base / 2, height)]
    return segment_area(base, zero_area_triangle_configs(t)[0][0])


C1 = segment_gain(2, SKINNY_HEIGHT)
C2 = segment_gain(1, SKINNY_HEIGHT / 2)
HALF_CIRCLE = segment_area(RECT_HEIGHT, RECT_HEIGHT / 2)


@dataclass(frozen=True)
class GadgetFace:
    name: str
    ring: tuple
    target: float
    kind: str

    @property
    def area(self):
        return abs(polygon_signed_area([Point(*p) for p in self.ring]))

    @property
    def delta(self):
        return self.target - self.area

    @property
    def points(self):
        return [Point(*p) for p in self.ring]

    def edges(self):
        points = self.points
        return [(points[i], points[(i + 1) % len(points)]) for i in range(len(points))]

    def moved(self, dx=0.0, dy=0.0, mirror=None):
        ring = tuple((x + dx, (2 * mirror - y if mirror is not None else y) + dy) for x, y in self.ring)
        if mirror is not None:
            ring = ring[::-1]
        return replace(self, ring=ring)


def _face(name, ring, kind, delta=0.0, target=None):
    ring = tuple((float(x), float(y)) for x, y in ring)
    face = GadgetFace(name, ring, 0.0, kind)
    return replace(face, target=face.area + delta if target is None else target)


def _triangle(name, *ring, kind=SKINNY):
    return _face(name, ring, kind, target=0.0)


@dataclass(frozen=True)
class Fragment:
    faces: tuple = ()
    connectors: tuple = ()

    def moved(self, dx=0.0, dy=0.0, mirror=None):
        return Fragment(
            tuple(face.moved(dx, dy, mirror) for face in self.faces),
            tuple((side, x + dx) for side, x in self.connectors),
        )

    def __add__(self, other):
        return Fragment(self.faces + other.faces, self.connectors + other.connectors)

    def face(self, name):
        return next(face for face in self.faces if face.name == name)

    def of_kind(self, *kinds):
        return [face for face in self.faces if face.kind in kinds]

    def edges(self):
        return [edge for face in self.faces for edge in face.edges()]

    def vertices(self):
        return sorted({p for face in self.faces for p in face.points}, key=lambda p: (p.x, p.y))


def _rectangle(name, x, kind, delta):
    faces = [
        _face(name, [(x, 0), (x + 2, 0), (x + 2, 4), (x, 4)], kind, delta),
        _triangle(f"{name}.top", (x, 4), (x + 2, 4), (x + 1, 4.5)),
        _triangle(f"{name}.bottom", (x, 0), (x + 1, -0.5), (x + 2, 0)),
    ]
    return faces


def _connector(name, x):
    """Upward connector; the right triangle sits on the short side away from the pipe."""
    return [
        _face(name, [(x, 0), (x + 2, 0), (x + 2, 4), (x + 2, 5), (x, 5), (x, 4)], CONNECTOR, 2 * C2),
        _triangle(f"{name}.base", (x, 0), (x + 1, -1), (x + 2, 0), kind=RIGHT),
        _triangle(f"{name}.left", (x, 4), (x, 5), (x - 0.25, 4.5)),
        _triangle(f"{name}.right", (x + 2, 4), (x + 2.25, 4.5), (x + 2, 5)),
    ]


def build_variable_gadget(degree_pos, degree_neg, name='x'):
    """
    Rectangle row for one variable, starting at x = 0.

    Layout: plain, degree_pos x (connector, plain, plain), decision, plain,
    degree_neg x (connector, plain, plain). Connectors are listed left to
    right as ('+', x) or ('-', x).
    """
    slots = ['P'] + ['C+', 'P', 'P'] * degree_pos + ['D', 'P'] + ['C-', 'P', 'P'] * degree_neg
    faces = []
    connectors = []
    for k, slot in enumerate(slots):
        x = RECT_WIDTH * k
        label = f"{name}.{k}"
        if slot == 'P':
            faces.extend(_rectangle(label, x, PLAIN, 2 * C1))
        elif slot == 'D':
            faces.extend(_rectangle(label, x, DECISION, 2 * C1 - HALF_CIRCLE))
        elif slot == 'C+':
            faces.extend(_connector(label, x))
            connectors.append(('+', x))
        else:
            faces.extend(face.moved(mirror=RECT_HEIGHT / 2) for face in _connector(label, x))
            connectors.append(('-', x))
    return Fragment(tuple(faces), tuple(connectors))


def build_clause_gadget(name='clause'):
    """
    Cross-shaped clause polygon with its stubs, in local coordinates.

    The bottom stub [0, 2] x [0, 2] takes the middle literal, the side stubs
    [-4, -2] x [4, 6] and [4, 6] x [4, 6] the outer ones.
    """
    cross = [(0, 2), (2, 2), (2, 4), (4, 4), (4, 6), (2, 6), (2, 8), (0, 8),
             (0, 6), (-2, 6), (-2, 4), (0, 4)]
    faces = [
        _face(name, cross, CLAUSE, 8 * C2),
        _face(f"{name}.stub.middle", [(0, 0), (2, 0), (2, 2), (0, 2)], STUB),
        _face(f"{name}.stub.left", [(-4, 4), (-2, 4), (-2, 6), (-4, 6)], STUB),
        _face(f"{name}.stub.right", [(4, 4), (6, 4), (6, 6), (4, 6)], STUB),
        _triangle(f"{name}.cap.top", (0, 8), (2, 8), (1, 9), kind=CAP),
        _triangle(f"{name}.cap.left", (0, 6), (0, 8), (-1, 7), kind=CAP),
        _triangle(f"{name}.cap.right", (2, 8), (2, 6), (3, 7), kind=CAP),
    ]
    for arm, x0 in (('left', -2), ('right', 2)):
        for k, x in enumerate((x0, x0 + 1)):
            faces.append(_triangle(f"{name}.{arm}.top{k}", (x, 6), (x + 1, 6), (x + 0.5, 6.25)))
            faces.append(_triangle(f"{name}.{arm}.bottom{k}", (x, 4), (x + 0.5, 3.75), (x + 1, 4)))
    return Fragment(tuple(faces))


def inward_half_circles(fragment):
    """Half-circle arcs of the cap triangles' bases, bulging into the clause polygon."""
    arcs = []
    for face in fragment.of_kind(CAP):
        p = face.points
        edges = [(p[i], p[(i + 1) % 3]) for i in range(3)]
        a, b = max(edges, key=lambda e: e[0].distance_to(e[1]))
        apex = next(v for v in p if v not in (a, b))
        if (b - a).cross(apex - a) > 0:
            a, b = b, a
        arcs.append(ChordArc(a, b, a.distance_to(b) / 2))
    return tuple(arcs)


def surviving_configurations(fragment, kinds=(SKINNY,)):
    """Per triangle face name, the zero-area configurations no neighbour blocks."""
    edges = fragment.edges()
    vertices = fragment.vertices()
    result = {}
    for face in fragment.of_kind(*kinds):
        blocked = set(blocked_configurations(face.points, edges, vertices))
        result[face.name] = [k for k in range(3) if k not in blocked]
    return result


def rectangle(name, x0, y0, x1, y1, kind=PIPE):
    return _face(name, [(x0, y0), (x1, y0), (x1, y1), (x0, y1)], kind)


def turn_square(name, x, y, outward):
    """2 x 2 turn with right triangles on the two outer sides, e.g. outward=('left', 'top')."""
    faces = [rectangle(name, x, y, x + 2, y + 2, TURN)]
    apexes = {
        'left': ((x, y + 2), (x, y), (x - 1, y + 1)),
        'right': ((x + 2, y), (x + 2, y + 2), (x + 3, y + 1)),
        'top': ((x + 2, y + 2), (x, y + 2), (x + 1, y + 3)),
    }
    for side in outward:
        faces.append(_triangle(f"{name}.{side}", *apexes[side], kind=RIGHT))
    return faces


def is_on_grid(value, step=0.25):
    return math.isclose(value / step, round(value / step), abs_tol=1e-9)
