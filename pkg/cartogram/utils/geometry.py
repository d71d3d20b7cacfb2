"""
Circular segments, chord arcs and simple polygons.

Arcs are parameterized by a signed sagitta: positive bulges to the LEFT of the
directed chord a -> b, zero is the straight edge. For a counterclockwise face
boundary the left side is the interior, so a positive sagitta on one of its
edges bulges into the face and removes area from it.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from shapely.geometry import LinearRing, Polygon as ShapelyPolygon

from cartogram.exceptions import CapacityError, DomainError

GEOM_EPS = 1e-9
BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200
MAX_SAGITTA_RATIO = 1.0

TAU = 2 * math.pi


def _check_chord(chord_length):
    if not math.isfinite(chord_length) or chord_length <= 0:
        raise DomainError(
            "Chord length must be a positive finite number, got %(value)s.",
            code='invalid_chord',
            params={'value': chord_length},
        )


def _x_minus_sin(x):
    # x - sin(x) loses every digit to cancellation for small x
    if x < 1e-2:
        x2 = x * x
        return x * x2 * (1 / 6 - x2 * (1 / 120 - x2 * (1 / 5040 - x2 / 362880)))
    return x - math.sin(x)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(
                "Point coordinates must be finite, got (%(x)s, %(y)s).",
                code='non_finite_point',
                params={'x': self.x, 'y': self.y},
            )

    def __add__(self, other):
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point(self.x - other.x, self.y - other.y)

    def scale(self, factor):
        return Point(self.x * factor, self.y * factor)

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def cross(self, other):
        return self.x * other.y - self.y * other.x

    def norm(self):
        return math.hypot(self.x, self.y)

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self):
        return (self.x, self.y)


def segment_area(chord_length, sagitta):
    """
    Area between a chord and its circular arc.

    Example:
        segment_area(4, 2) -> 2*pi   (half-disk of radius 2)
        segment_area(2, 1) -> pi/2
        segment_area(3, 0) -> 0
    """
    _check_chord(chord_length)
    if not math.isfinite(sagitta) or sagitta < 0:
        raise DomainError(
            "Sagitta must be a non-negative finite number, got %(value)s.",
            code='negative_sagitta',
            params={'value': sagitta},
        )
    if sagitta == 0:
        return 0.0

    half = chord_length / 2
    radius = (half * half + sagitta * sagitta) / (2 * sagitta)
    half_angle = math.atan2(half, radius - sagitta)
    return radius * radius * _x_minus_sin(2 * half_angle) / 2


def sagitta_for_area(chord_length, area, tol=BISECTION_TOL,
                     max_sagitta_ratio=MAX_SAGITTA_RATIO, max_iter=BISECTION_MAX_ITER):
    """
    Inverse of segment_area by bisection over the monotone sagitta -> area map.

    Raises CapacityError when the area does not fit under the sagitta cap
    (max_sagitta_ratio * L/2); the error carries the achievable maximum.
    """
    _check_chord(chord_length)
    if not math.isfinite(area) or area < 0:
        raise DomainError(
            "Segment area must be a non-negative finite number, got %(value)s.",
            code='negative_area',
            params={'value': area},
        )
    if tol <= 0:
        raise DomainError("Bisection tolerance must be positive.", code='invalid_tolerance')
    if area == 0:
        return 0.0

    cap = max_sagitta_ratio * chord_length / 2
    maximum = segment_area(chord_length, cap)
    if area > maximum + tol:
        raise CapacityError(
            "Area %(area)s exceeds the largest segment %(maximum)s on a chord of length %(chord)s.",
            code='capacity_exceeded',
            params={'area': area, 'maximum': maximum, 'chord': chord_length},
        )
    if area >= maximum:
        return cap

    low, high = 0.0, cap
    for _ in range(max_iter):
        mid = (low + high) / 2
        if mid == low or mid == high:
            break
        value = segment_area(chord_length, mid)
        if abs(value - area) <= tol:
            return mid
        if value < area:
            low = mid
        else:
            high = mid
    return (low + high) / 2


def arc_radius(chord_length, sagitta):
    """Radius of the arc; math.inf stands for the straight edge (sagitta 0)."""
    _check_chord(chord_length)
    if sagitta == 0:
        return math.inf
    h = abs(sagitta)
    return (chord_length * chord_length / 4 + h * h) / (2 * h)


def circumcircle(p, q, r):
    """Center and radius of the circle through three points."""
    d = 2 * ((q - p).cross(r - p))
    scale = max((q - p).norm(), (r - p).norm(), (r - q).norm())
    if abs(d) <= GEOM_EPS * scale * scale:
        raise DomainError(
            "Points %(points)s are collinear.",
            code='collinear_triangle',
            params={'points': [p.as_tuple(), q.as_tuple(), r.as_tuple()]},
        )
    b = q - p
    c = r - p
    b2 = b.dot(b)
    c2 = c.dot(c)
    ux = (c.y * b2 - b.y * c2) / d
    uy = (b.x * c2 - c.x * b2) / d
    center = Point(p.x + ux, p.y + uy)
    return center, center.distance_to(p)


@dataclass(frozen=True)
class CircularSegment:
    chord_length: float
    sagitta: float

    @cached_property
    def area(self):
        return segment_area(self.chord_length, self.sagitta)

    @cached_property
    def radius(self):
        return arc_radius(self.chord_length, self.sagitta)


@dataclass(frozen=True)
class ChordArc:
    a: Point
    b: Point
    sagitta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.sagitta):
            raise DomainError("Sagitta must be finite.", code='non_finite_sagitta')
        if self.sagitta != 0 and self.a == self.b:
            raise DomainError(
                "A bent arc needs two distinct endpoints.", code='invalid_chord')

    @cached_property
    def chord_length(self):
        return self.a.distance_to(self.b)

    @cached_property
    def midpoint(self):
        return Point((self.a.x + self.b.x) / 2, (self.a.y + self.b.y) / 2)

    @cached_property
    def left_normal(self):
        length = self.chord_length
        return Point(-(self.b.y - self.a.y) / length, (self.b.x - self.a.x) / length)

    @property
    def is_straight(self):
        return self.sagitta == 0

    @cached_property
    def radius(self):
        return arc_radius(self.chord_length, self.sagitta)

    @cached_property
    def apex(self):
        if self.is_straight:
            return self.midpoint
        return self.midpoint + self.left_normal.scale(self.sagitta)

    @cached_property
    def center(self):
        if self.is_straight:
            return None
        offset = self.sagitta - math.copysign(self.radius, self.sagitta)
        return self.midpoint + self.left_normal.scale(offset)

    @cached_property
    def start_angle(self):
        c = self.center
        return math.atan2(self.a.y - c.y, self.a.x - c.x)

    @cached_property
    def sweep(self):
        """Signed central angle from a to b through the apex (clockwise when bulging left)."""
        if self.is_straight:
            return 0.0
        h = abs(self.sagitta)
        half_angle = math.atan2(self.chord_length / 2, self.radius - h)
        return -2 * half_angle if self.sagitta > 0 else 2 * half_angle

    @cached_property
    def signed_segment_area(self):
        if self.is_straight:
            return 0.0
        return math.copysign(segment_area(self.chord_length, abs(self.sagitta)), self.sagitta)

    def reversed(self):
        return ChordArc(self.b, self.a, -self.sagitta)

    def with_sagitta(self, sagitta):
        return ChordArc(self.a, self.b, sagitta)

    def angle_offset(self, point):
        """Angle travelled from a to reach point's direction, measured along the sweep."""
        c = self.center
        angle = math.atan2(point.y - c.y, point.x - c.x)
        delta = (angle - self.start_angle) * (1 if self.sweep > 0 else -1)
        return delta % TAU

    def point_at(self, fraction):
        if self.is_straight:
            return Point(self.a.x + (self.b.x - self.a.x) * fraction,
                         self.a.y + (self.b.y - self.a.y) * fraction)
        angle = self.start_angle + self.sweep * fraction
        c = self.center
        return Point(c.x + self.radius * math.cos(angle), c.y + self.radius * math.sin(angle))

    def sample(self, count):
        """count points from a to b (inclusive) as an (count, 2) array."""
        fractions = np.linspace(0.0, 1.0, count)
        if self.is_straight:
            return np.column_stack([
                self.a.x + (self.b.x - self.a.x) * fractions,
                self.a.y + (self.b.y - self.a.y) * fractions,
            ])
        angles = self.start_angle + self.sweep * fractions
        c = self.center
        return np.column_stack([
            c.x + self.radius * np.cos(angles),
            c.y + self.radius * np.sin(angles),
        ])

    @cached_property
    def bounds(self):
        xs = [self.a.x, self.b.x]
        ys = [self.a.y, self.b.y]
        if not self.is_straight:
            c = self.center
            for k in range(4):
                extreme = Point(c.x + self.radius * math.cos(k * math.pi / 2),
                                c.y + self.radius * math.sin(k * math.pi / 2))
                if self.angle_offset(extreme) <= abs(self.sweep):
                    xs.append(extreme.x)
                    ys.append(extreme.y)
        return min(xs), min(ys), max(xs), max(ys)


def polygon_signed_area(points):
    area = 0.0
    count = len(points)
    for i in range(count):
        p = points[i]
        q = points[(i + 1) % count]
        area += p.x * q.y - q.x * p.y
    return area / 2


@dataclass(frozen=True)
class SimplePolygon:
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DomainError(
                "A polygon needs at least 3 vertices, got %(count)s.",
                code='too_few_vertices',
                params={'count': len(self.vertices)},
            )
        if self.signed_area <= 0:
            raise DomainError(
                "Polygon boundary must be counterclockwise with positive area.",
                code='orientation',
            )

    @classmethod
    def from_coords(cls, coords, check_simple=True):
        vertices = tuple(Point(float(x), float(y)) for x, y in coords)
        polygon = cls(vertices)
        if check_simple and not polygon.is_simple():
            raise DomainError("Polygon boundary intersects itself.", code='self_intersection')
        return polygon

    @cached_property
    def signed_area(self):
        return polygon_signed_area(self.vertices)

    @property
    def area(self):
        return self.signed_area

    def edges(self):
        count = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % count]) for i in range(count)]

    def edge_arc(self, index, sagitta=0.0):
        a, b = self.edges()[index]
        return ChordArc(a, b, sagitta)

    @cached_property
    def perimeter(self):
        return sum(a.distance_to(b) for a, b in self.edges())

    @cached_property
    def centroid(self):
        cx = cy = 0.0
        for p, q in self.edges():
            w = p.x * q.y - q.x * p.y
            cx += (p.x + q.x) * w
            cy += (p.y + q.y) * w
        factor = 1 / (6 * self.signed_area)
        return Point(cx * factor, cy * factor)

    @cached_property
    def bounds(self):
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def coords(self):
        return [p.as_tuple() for p in self.vertices]

    def to_shapely(self):
        return ShapelyPolygon(self.coords())

    def is_simple(self):
        return LinearRing(self.coords()).is_simple

    def contains(self, point, eps=GEOM_EPS):
        return point_in_polygon(point, self, eps)


def face_area_with_arcs(polygon, bends):
    """
    Area of a face whose edges are replaced by arcs.

    bends holds one signed sagitta per polygon edge (edge i runs from vertex i
    to vertex i+1), in the left-positive convention: positive bends inward and
    removes its segment, negative bends outward and adds it.

    Example:
        unit square, bends (0, 0, 0, 0)    -> 1
        unit square, bends (-0.5, 0, 0, 0) -> 1 + pi/8
    """
    if isinstance(bends, dict):
        bends = [bends.get(i, 0.0) for i in range(len(polygon.vertices))]
    if len(bends) != len(polygon.vertices):
        raise DomainError(
            "Expected %(expected)s bends, got %(count)s.",
            code='bend_count',
            params={'expected': len(polygon.vertices), 'count': len(bends)},
        )
    area = polygon.area
    for (a, b), sagitta in zip(polygon.edges(), bends):
        if sagitta:
            area -= math.copysign(segment_area(a.distance_to(b), abs(sagitta)), sagitta)
    return area


def distance_to_segment(point, a, b):
    d = b - a
    length2 = d.dot(d)
    if length2 == 0:
        return point.distance_to(a)
    t = max(0.0, min(1.0, (point - a).dot(d) / length2))
    return point.distance_to(Point(a.x + d.x * t, a.y + d.y * t))


def point_in_polygon(point, polygon, eps=GEOM_EPS):
    """Closed containment: points within eps of the boundary count as inside."""
    vertices = polygon.vertices
    inside = False
    count = len(vertices)
    for i in range(count):
        p = vertices[i]
        q = vertices[(i + 1) % count]
        if distance_to_segment(point, p, q) <= eps:
            return True
        if (p.y > point.y) != (q.y > point.y):
            x_cross = p.x + (point.y - p.y) * (q.x - p.x) / (q.y - p.y)
            if point.x < x_cross:
                inside = not inside
    return inside


def segments_cross(p1, p2, q1, q2, eps=GEOM_EPS):
    """
    True when the open segments p1p2 and q1q2 share a point: a proper crossing
    or a collinear overlap longer than eps. Touching at endpoints never counts.
    """
    d1 = p2 - p1
    d2 = q2 - q1
    len1 = d1.norm()
    len2 = d2.norm()
    if len1 == 0 or len2 == 0:
        return False
    denom = d1.cross(d2)
    if abs(denom) <= 1e-12 * len1 * len2:
        # parallel: only a collinear overlap can share points
        if abs(d1.cross(q1 - p1)) / len1 > eps:
            return False
        t1 = (q1 - p1).dot(d1) / (len1 * len1)
        t2 = (q2 - p1).dot(d1) / (len1 * len1)
        low = max(0.0, min(t1, t2))
        high = min(1.0, max(t1, t2))
        return (high - low) * len1 > eps

    w = q1 - p1
    t = w.cross(d2) / denom
    u = w.cross(d1) / denom
    margin1 = eps / len1
    margin2 = eps / len2
    return margin1 < t < 1 - margin1 and margin2 < u < 1 - margin2


def _effectively_straight(arc, eps):
    return arc.is_straight or abs(arc.sagitta) <= eps


def _line_circle_hits(p, q, center, radius, touch_eps):
    """Transversal crossings of line pq with a circle, as (t, point) pairs; tangencies dropped."""
    d = q - p
    length = d.norm()
    distance = abs(d.cross(center - p)) / length
    if distance >= radius - touch_eps:
        return []
    foot_t = (center - p).dot(d) / (length * length)
    half_chord = math.sqrt(max(radius * radius - distance * distance, 0.0)) / length
    hits = []
    for t in (foot_t - half_chord, foot_t + half_chord):
        hits.append((t, Point(p.x + d.x * t, p.y + d.y * t)))
    return hits


def _circle_circle_hits(c1, r1, c2, r2, touch_eps):
    d = c1.distance_to(c2)
    if d > r1 + r2 - touch_eps or d < abs(r1 - r2) + touch_eps:
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    ux = (c2.x - c1.x) / d
    uy = (c2.y - c1.y) / d
    bx = c1.x + ux * a
    by = c1.y + uy * a
    return [Point(bx - uy * h, by + ux * h), Point(bx + uy * h, by - ux * h)]


def _inside_span(arc, point, eps):
    margin = eps / arc.radius
    return margin < arc.angle_offset(point) < abs(arc.sweep) - margin


def _same_circle(u, v, eps):
    return (u.center.distance_to(v.center) <= eps
            and abs(u.radius - v.radius) <= eps)


def _clear_of(point, endpoints, eps):
    return all(point.distance_to(e) > eps for e in endpoints)


def _shared_endpoints(u, v, eps):
    return [p for p in (u.a, u.b) if p.distance_to(v.a) <= eps or p.distance_to(v.b) <= eps]


def _reflect(point, c1, c2):
    """Mirror image of point in the line through c1 and c2."""
    d = c2 - c1
    foot = c1 + d.scale((point - c1).dot(d) / d.dot(d))
    return foot.scale(2) - point


def _other_line_hit(p, q, center, t_known):
    """The second crossing of line pq with a circle it meets at parameter t_known."""
    d = q - p
    t = 2 * (center - p).dot(d) / d.dot(d) - t_known
    return t, Point(p.x + d.x * t, p.y + d.y * t)


def arcs_intersect(u, v, eps=GEOM_EPS):
    """
    True iff the open arcs u and v share a point.

    Endpoints are excluded and tangential contact counts as touching, so two
    arcs that only meet at a shared endpoint, or graze each other, are fine.
    Near a shared endpoint the second meeting point is found by reflection,
    and contact closer than eps times the arc scale counts as touching.
    """
    endpoints = (u.a, u.b, v.a, v.b)
    u_straight = _effectively_straight(u, eps)
    v_straight = _effectively_straight(v, eps)

    if u_straight and v_straight:
        return segments_cross(u.a, u.b, v.a, v.b, eps)

    shared = _shared_endpoints(u, v, eps)

    if u_straight or v_straight:
        line, curve = (u, v) if u_straight else (v, u)
        length = line.chord_length
        margin = eps / length
        touch = eps * max(1.0, length, curve.radius)
        if len(shared) == 2:
            return False
        if shared:
            t_known = 0.0 if line.a.distance_to(shared[0]) <= eps else 1.0
            hits = [_other_line_hit(line.a, line.b, curve.center, t_known)]
        else:
            hits = _line_circle_hits(line.a, line.b, curve.center, curve.radius, eps)
        for t, point in hits:
            if (margin < t < 1 - margin and _inside_span(curve, point, eps)
                    and _clear_of(point, endpoints, touch)):
                return True
        return False

    if _same_circle(u, v, eps):
        for arc, other in ((u, v), (v, u)):
            for candidate in (other.apex, other.a, other.b):
                if _inside_span(arc, candidate, eps) and _clear_of(candidate, (arc.a, arc.b), eps):
                    return True
        return False

    touch = eps * max(1.0, u.radius, v.radius)
    if len(shared) == 2:
        # two distinct circles meet nowhere else
        return False
    if shared:
        hits = [_reflect(shared[0], u.center, v.center)]
    else:
        hits = _circle_circle_hits(u.center, u.radius, v.center, v.radius, eps)
    for point in hits:
        if (_inside_span(u, point, eps) and _inside_span(v, point, eps)
                and _clear_of(point, endpoints, touch)):
            return True
    return False


def arc_crosses_segment(arc, p, q, eps=GEOM_EPS, touch_eps=None):
    """
    True when the arc's interior crosses the closed segment pq.

    Only the arc's own endpoints are excluded; passing through p or q counts.
    """
    touch_eps = eps if touch_eps is None else touch_eps
    if _effectively_straight(arc, eps):
        return segments_cross(arc.a, arc.b, p, q, eps)
    length = p.distance_to(q)
    if length == 0:
        return False
    margin = eps / length
    touch = eps * max(1.0, length, arc.radius)
    p_end = p.distance_to(arc.a) <= eps or p.distance_to(arc.b) <= eps
    q_end = q.distance_to(arc.a) <= eps or q.distance_to(arc.b) <= eps
    if p_end and q_end:
        return False
    if p_end or q_end:
        hits = [_other_line_hit(p, q, arc.center, 0.0 if p_end else 1.0)]
    else:
        hits = _line_circle_hits(p, q, arc.center, arc.radius, touch_eps)
    for t, point in hits:
        if (-margin <= t <= 1 + margin and _inside_span(arc, point, eps)
                and _clear_of(point, (arc.a, arc.b), touch)):
            return True
    return False


def _collinear(a, b, p, q, eps):
    d = b - a
    length = d.norm()
    return abs(d.cross(p - a)) / length <= eps and abs(d.cross(q - a)) / length <= eps


def arc_in_polygon(arc, region, eps=GEOM_EPS, touch_eps=None):
    """
    True iff no interior point of the arc leaves the closed region.

    Checked exactly: the arc must not cross any region edge (edges collinear
    with the chord, i.e. the generating edge, are skipped) and the apex must
    lie in the closed region. touch_eps controls how much grazing of an edge
    still counts as touching; it defaults to eps.
    """
    for p, q in region.edges():
        if _collinear(arc.a, arc.b, p, q, eps):
            continue
        if arc_crosses_segment(arc, p, q, eps, touch_eps):
            return False
    return point_in_polygon(arc.apex, region, eps)
