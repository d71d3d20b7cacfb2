"""
Straight skeletons of faces and the bending limits derived from them.

The skeleton is built by simulating the shrinking wavefront. Every step
recomputes all edge-collapse and split events of the active wavefront
polygons, advances to the earliest one (ties go to edge events, then to the
lowest edge index) and tidies up whatever became degenerate at that moment:
coincident vertices merge, folded spikes turn into ridges, pinched wavefronts
split and polygons with fewer than three vertices retire.
"""

import logging
import math
from dataclasses import dataclass

from shapely.geometry import LineString

from cartogram.exceptions import SkeletonError
from cartogram.utils.config import RunConfig
from cartogram.utils.geometry import (
    GEOM_EPS, MAX_SAGITTA_RATIO, ChordArc, Point, SimplePolygon,
    arc_crosses_segment, arc_in_polygon, arcs_intersect, segment_area,
)

logger = logging.getLogger(__name__)

MAX_SAGITTA_ITER = 60
STRONG = 'strong'
WEAK = 'weak'


@dataclass(frozen=True)
class SkeletonRegionSet:
    face: int
    polygon: SimplePolygon
    regions: tuple
    ridges: tuple = ()

    def region(self, edge_index):
        return self.regions[edge_index]

    @property
    def area(self):
        return math.fsum(region.area for region in self.regions)


@dataclass(frozen=True)
class EdgeBend:
    half_edge: int
    length: float
    max_sagitta: float
    capacity: float


@dataclass(frozen=True)
class EdgeCapacity:
    source: int
    target: int
    edges: tuple = ()

    @property
    def total(self):
        return math.fsum(edge.capacity for edge in self.edges)

    def zeroed(self):
        return EdgeCapacity(self.source, self.target, tuple(
            EdgeBend(edge.half_edge, edge.length, edge.max_sagitta, 0.0) for edge in self.edges
        ))


class _Vertex:
    __slots__ = ('start', 'anchor', 'left', 'right', 'velocity')

    def __init__(self, point, left, right, normals):
        self.start = point
        self.anchor = point
        self.left = left
        self.right = right
        n_left, n_right = normals[left], normals[right]
        dot = n_left[0] * n_right[0] + n_left[1] * n_right[1]
        if 1 + dot <= 1e-9:
            self.velocity = None
        else:
            self.velocity = ((n_left[0] + n_right[0]) / (1 + dot), (n_left[1] + n_right[1]) / (1 + dot))

    def advance(self, dt):
        if dt and self.velocity is not None:
            self.anchor = Point(self.anchor.x + self.velocity[0] * dt, self.anchor.y + self.velocity[1] * dt)

    def at(self, dt):
        if self.velocity is None:
            return self.anchor
        return Point(self.anchor.x + self.velocity[0] * dt, self.anchor.y + self.velocity[1] * dt)


class _Wavefront:

    def __init__(self, polygon, eps):
        self.polygon = polygon
        points = polygon.vertices
        count = len(points)
        min_x, min_y, max_x, max_y = polygon.bounds
        self.scale = max(math.hypot(max_x - min_x, max_y - min_y), 1.0)
        self.tol = eps * self.scale
        self.directions = []
        self.normals = []
        for i in range(count):
            a, b = points[i], points[(i + 1) % count]
            length = a.distance_to(b)
            if length <= self.tol:
                raise SkeletonError(
                    "Edge %(feature)s is too short for a stable skeleton.",
                    code='short_edge', params={'feature': f"edge {i}"})
            d = ((b.x - a.x) / length, (b.y - a.y) / length)
            self.directions.append(d)
            self.normals.append((-d[1], d[0]))
        for i in range(count):
            n_left, n_right = self.normals[i - 1], self.normals[i]
            if 1 + n_left[0] * n_right[0] + n_left[1] * n_right[1] <= 1e-9:
                raise SkeletonError(
                    "Vertex %(feature)s is a spike.",
                    code='spike', params={'feature': f"vertex {i}"})
        self.time = 0.0
        self.lavs = [[
            _Vertex(points[i], (i - 1) % count, i, self.normals) for i in range(count)
        ]]
        self.segments = []

    def _new(self, point, left, right):
        return _Vertex(point, left, right, self.normals)

    def _record(self, faces, p, q):
        if p.distance_to(q) > self.tol:
            self.segments.append((faces, p, q))

    def _retire(self, vertex):
        self._record((vertex.left, vertex.right), vertex.start, vertex.anchor)

    def _is_reflex(self, vertex):
        d_left, d_right = self.directions[vertex.left], self.directions[vertex.right]
        return d_left[0] * d_right[1] - d_left[1] * d_right[0] < -1e-12

    def _events(self):
        events = []
        for li, lav in enumerate(self.lavs):
            count = len(lav)
            for k in range(count):
                a, b = lav[k], lav[(k + 1) % count]
                if a.velocity is None or b.velocity is None:
                    continue
                d = self.directions[a.right]
                length = (b.anchor.x - a.anchor.x) * d[0] + (b.anchor.y - a.anchor.y) * d[1]
                closing = (b.velocity[0] - a.velocity[0]) * d[0] + (b.velocity[1] - a.velocity[1]) * d[1]
                if closing < -1e-12:
                    events.append((self.time + max(length, 0.0) / -closing, 0, a.right, li, k, None))
            for k, vertex in enumerate(lav):
                if vertex.velocity is None or not self._is_reflex(vertex):
                    continue
                for j in range(count):
                    hit = self._split_time(vertex, lav[j], lav[(j + 1) % count])
                    if hit is not None:
                        events.append((self.time + hit, 1, lav[j].right, li, k, j))
        return events

    def _split_time(self, vertex, a, b):
        e = a.right
        if a is vertex or b is vertex or e in (vertex.left, vertex.right):
            return None
        if a.velocity is None or b.velocity is None:
            return None
        anchor = self.polygon.vertices[e]
        n = self.normals[e]
        distance = (vertex.anchor.x - anchor.x) * n[0] + (vertex.anchor.y - anchor.y) * n[1] - self.time
        if distance < -self.tol:
            return None
        rate = 1 - (vertex.velocity[0] * n[0] + vertex.velocity[1] * n[1])
        if rate <= 1e-12:
            return None
        dt = max(distance, 0.0) / rate
        hit = vertex.at(dt)
        start, end = a.at(dt), b.at(dt)
        d = self.directions[e]
        span = (end.x - start.x) * d[0] + (end.y - start.y) * d[1]
        offset = (hit.x - start.x) * d[0] + (hit.y - start.y) * d[1]
        if span < -self.tol or not -self.tol <= offset <= span + self.tol:
            return None
        return dt

    def _advance(self, time):
        dt = max(time - self.time, 0.0)
        for lav in self.lavs:
            for vertex in lav:
                vertex.advance(dt)
        self.time = max(time, self.time)

    def _edge_event(self, li, k):
        lav = self.lavs[li]
        count = len(lav)
        a, b = lav[k], lav[(k + 1) % count]
        point = Point((a.anchor.x + b.anchor.x) / 2, (a.anchor.y + b.anchor.y) / 2)
        a.anchor = b.anchor = point
        self._retire(a)
        self._retire(b)
        merged = self._new(point, a.left, b.right)
        self.lavs[li] = [merged] + [lav[(k + 2 + i) % count] for i in range(count - 2)]

    def _split_event(self, li, k, j):
        lav = self.lavs[li]
        count = len(lav)
        vertex = lav[k]
        e = lav[j].right
        self._retire(vertex)
        point = vertex.anchor
        ordered = lav[k:] + lav[:k]
        last = (j - k) % count
        self.lavs[li] = [self._new(point, e, vertex.right)] + ordered[1:last + 1]
        self.lavs.append([self._new(point, vertex.left, e)] + ordered[last + 1:])

    def _tidy_one(self, li):
        """Fix one degeneracy of wavefront li; returns False when nothing was left to fix."""
        lav = self.lavs[li]
        count = len(lav)
        if count <= 2:
            for vertex in lav:
                self._retire(vertex)
            if count == 2:
                a, b = lav
                self._record((a.right, b.right), a.anchor, b.anchor)
            del self.lavs[li]
            return True

        for k in range(count):
            a, b = lav[k], lav[(k + 1) % count]
            if a.anchor.distance_to(b.anchor) <= self.tol:
                self._retire(a)
                self._retire(b)
                merged = self._new(a.anchor, a.left, b.right)
                self.lavs[li] = [merged] + [lav[(k + 2 + i) % count] for i in range(count - 2)]
                return True

        for k in range(count):
            if lav[k].velocity is not None:
                continue
            # wavefront folded back onto itself: the overlap up to the nearer neighbour is a ridge
            ordered = lav[k:] + lav[:k]
            spike, nxt, prev = ordered[0], ordered[1], ordered[-1]
            self._retire(spike)
            if spike.anchor.distance_to(prev.anchor) <= spike.anchor.distance_to(nxt.anchor):
                self._record((spike.left, spike.right), spike.anchor, prev.anchor)
                self._retire(prev)
                self.lavs[li] = [self._new(prev.anchor, prev.left, spike.right)] + ordered[1:-1]
            else:
                self._record((spike.left, spike.right), spike.anchor, nxt.anchor)
                self._retire(nxt)
                self.lavs[li] = [self._new(nxt.anchor, spike.left, nxt.right)] + ordered[2:]
            return True

        for i in range(count):
            for j in range(i + 2, count):
                if i == 0 and j == count - 1:
                    continue
                p, q = lav[i], lav[j]
                if p.anchor.distance_to(q.anchor) > self.tol:
                    continue
                self._retire(p)
                self._retire(q)
                point = p.anchor
                self.lavs[li] = [self._new(point, q.left, p.right)] + lav[i + 1:j]
                self.lavs.append([self._new(point, p.left, q.right)] + lav[j + 1:] + lav[:i])
                return True
        return False

    def _tidy(self):
        li = 0
        while li < len(self.lavs):
            if not self._tidy_one(li):
                li += 1
            else:
                li = 0

    def run(self):
        count = len(self.polygon.vertices)
        limit = 8 * count * count + 64
        self._tidy()
        for _ in range(limit):
            if not self.lavs:
                return self.segments
            events = self._events()
            if not events:
                raise SkeletonError(
                    "Wavefront stalled with %(feature)s still active.",
                    code='stalled', params={'feature': f"{sum(map(len, self.lavs))} vertices"})
            earliest = min(event[0] for event in events)
            time, kind, _, li, k, j = min(
                (event for event in events if event[0] <= earliest + self.tol),
                key=lambda event: (event[1], event[2], event[3], event[4]),
            )
            self._advance(time)
            if kind == 0:
                self._edge_event(li, k)
            else:
                self._split_event(li, k, j)
            self._tidy()
        raise SkeletonError(
            "Skeleton did not converge within %(feature)s steps.",
            code='no_convergence', params={'feature': limit})


def _clockwise_angle(reference, candidate):
    cross = reference[0] * candidate[1] - reference[1] * candidate[0]
    dot = reference[0] * candidate[0] + reference[1] * candidate[1]
    angle = math.atan2(-cross, dot) % (2 * math.pi)
    return angle if angle > 1e-12 else 2 * math.pi


def _assemble_region(polygon, index, segments, tol):
    points = polygon.vertices
    count = len(points)
    own = [(p, q) for faces, p, q in segments if index in faces]
    nodes = []

    def node(point):
        for i, existing in enumerate(nodes):
            if existing.distance_to(point) <= tol:
                return i
        nodes.append(point)
        return len(nodes) - 1

    adjacency = {}
    for s, (p, q) in enumerate(own):
        u, v = node(p), node(q)
        if u == v:
            continue
        adjacency.setdefault(u, []).append((s, v))
        adjacency.setdefault(v, []).append((s, u))

    start, goal = node(points[(index + 1) % count]), node(points[index])
    walk = [points[index], points[(index + 1) % count]]
    current = start
    incoming = (points[(index + 1) % count].x - points[index].x,
                points[(index + 1) % count].y - points[index].y)
    used = set()
    for _ in range(len(own) + 1):
        if current == goal:
            break
        options = [(s, v) for s, v in adjacency.get(current, []) if s not in used]
        if not options:
            raise SkeletonError(
                "Skeleton region of %(feature)s is not closed.",
                code='open_region', params={'feature': f"edge {index}"})
        here = nodes[current]
        reverse = (-incoming[0], -incoming[1])
        s, v = min(options, key=lambda option: _clockwise_angle(
            reverse, (nodes[option[1]].x - here.x, nodes[option[1]].y - here.y)))
        used.add(s)
        incoming = (nodes[v].x - here.x, nodes[v].y - here.y)
        current = v
        if current != goal:
            walk.append(nodes[v])
    else:
        raise SkeletonError(
            "Skeleton region of %(feature)s is not closed.",
            code='open_region', params={'feature': f"edge {index}"})
    return SimplePolygon(tuple(walk))


def straight_skeleton(polygon, face=None, eps=GEOM_EPS):
    """
    One region per polygon edge, region i generated by the edge from vertex i
    to vertex i+1.

    Example:
        square of side 2   -> four triangles of area 1
        rectangle 4 x 2    -> regions of area 3, 1, 3, 1
    """
    wavefront = _Wavefront(polygon, eps)
    segments = wavefront.run()
    regions = tuple(
        _assemble_region(polygon, i, segments, wavefront.tol * 100)
        for i in range(len(polygon.vertices))
    )
    total = math.fsum(region.area for region in regions)
    if abs(total - polygon.area) > 1e-9 * polygon.area * 100:
        raise SkeletonError(
            "Skeleton regions cover %(covered)s instead of %(feature)s.",
            code='partition', params={'feature': polygon.area, 'covered': total})
    ridges = tuple((p, q) for _, p, q in segments)
    return SkeletonRegionSet(face, polygon, regions, ridges)


def _bisect(fits, cap, iterations):
    if fits(cap):
        return cap
    low, high = 0.0, cap
    for _ in range(iterations):
        middle = (low + high) / 2
        if fits(middle):
            low = middle
        else:
            high = middle
    return low


def max_sagitta(edge, region, eps=GEOM_EPS, max_sagitta_ratio=MAX_SAGITTA_RATIO,
                iterations=MAX_SAGITTA_ITER):
    """
    Largest inward sagitta whose arc over `edge` stays inside `region`.

    The arc may touch the region boundary but not cross it. Returns 0 when
    no positive sagitta fits.
    """
    if not isinstance(edge, ChordArc):
        edge = ChordArc(*edge)
    cap = max_sagitta_ratio * edge.chord_length / 2
    return _bisect(
        lambda h: h == 0 or arc_in_polygon(edge.with_sagitta(h), region, eps, touch_eps=0.0),
        cap, iterations)


def _engulfs(arc, point, eps):
    side = (arc.b - arc.a).cross(point - arc.a)
    return side > eps and point.distance_to(arc.center) < arc.radius - eps


def sea_max_sagitta(s, half_edge, placed_arcs=(), eps=GEOM_EPS,
                    max_sagitta_ratio=MAX_SAGITTA_RATIO, iterations=MAX_SAGITTA_ITER):
    """
    Largest sagitta for a land border bulging out into the sea.

    The sea has no skeleton, so the arc is checked against the whole map: it
    must not cross any edge or already placed sea arc, must not swallow any
    vertex, and stays within half the clearance to the nearest edge that does
    not touch it.
    """
    chord = s.arc(half_edge)
    own = s.half_edges[half_edge]
    ends = {own.origin, s.destination(half_edge)}
    others = []
    clearance = math.inf
    chord_line = LineString([chord.a.as_tuple(), chord.b.as_tuple()])
    for e in s.undirected_edges():
        if s.canonical(half_edge) == e:
            continue
        p, q = s.chord(e)
        others.append((p, q))
        endpoints = {s.half_edges[e].origin, s.destination(e)}
        if not endpoints & ends:
            clearance = min(clearance, chord_line.distance(LineString([p.as_tuple(), q.as_tuple()])))
    loose = [point for i, point in enumerate(s.vertices) if i not in ends]

    def fits(h):
        if h == 0:
            return True
        arc = chord.with_sagitta(h)
        if any(arc_crosses_segment(arc, p, q, eps) for p, q in others):
            return False
        if any(arcs_intersect(arc, placed, eps) for placed in placed_arcs):
            return False
        return not any(_engulfs(arc, point, eps) for point in loose)

    cap = max_sagitta_ratio * chord.chord_length / 2
    if math.isfinite(clearance):
        cap = min(cap, clearance / 2)
    return _bisect(fits, cap, iterations)


def compute_skeletons(s, eps=GEOM_EPS):
    """Skeleton of every land face, keyed by face id."""
    return {
        face.index: straight_skeleton(s.face_polygon(face.index), face.index, eps)
        for face in s.land_faces()
    }


def _passes_strong(s, u, v, deltas):
    shrinking = s.is_sea(u) or deltas.get(u, 0.0) < 0
    growing = s.is_sea(v) or deltas.get(v, 0.0) > 0
    return shrinking and growing


def edge_capacities(s, g, mode, deltas, config=None, skeletons=None):
    """
    Directed capacities c(u -> v): area u can hand to v by bending shared
    borders into u.

    Land faces use their own skeleton regions. Borders with the sea bulging
    outward are sized by sea_max_sagitta in half-edge order, each placed arc
    constraining the later ones. In strong mode only shrinking faces ship and
    only growing faces receive.
    """
    config = config or RunConfig()
    skeletons = skeletons if skeletons is not None else compute_skeletons(s, config.geom_eps)
    bends = {}
    for face in s.land_faces():
        skeleton = skeletons[face.index]
        for position, e in enumerate(face.boundary):
            arc = s.arc(e)
            h = max_sagitta(arc, skeleton.region(position), config.geom_eps,
                            config.max_sagitta_ratio, config.max_sagitta_iter)
            bends[e] = EdgeBend(e, arc.chord_length, h, segment_area(arc.chord_length, h))

    placed = []
    if s.sea_face is not None:
        for e in sorted(s.sea.boundary):
            h = sea_max_sagitta(s, e, placed, config.geom_eps,
                                config.max_sagitta_ratio, config.max_sagitta_iter)
            length = s.edge_length(e)
            bends[e] = EdgeBend(e, length, h, segment_area(length, h))
            if h > 0:
                placed.append(s.arc(e, h))

    capacities = {}
    for u, v in g.directed_edges():
        capacity = EdgeCapacity(u, v, tuple(bends[e] for e in g.shared(u, v)))
        if mode == STRONG and not _passes_strong(s, u, v, deltas):
            capacity = capacity.zeroed()
        capacities[(u, v)] = capacity
    logger.debug("capacities for %d directed adjacencies (%s mode)", len(capacities), mode)
    return capacities
