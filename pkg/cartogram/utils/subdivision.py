"""
Planar map model: half-edge topology, face targets and the dual face graph.

Faces are numbered in input order. The sea is either an explicit polygon named
by index or, by default, an extra face appended after the land faces that
stands for the unbounded complement. Sea half-edges carry no next/prev links:
the sea is a node of the face graph, not a polygon.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree
from shapely import STRtree, unary_union
from shapely.geometry import LinearRing, LineString, Polygon as ShapelyPolygon

from cartogram.exceptions import DomainError, TopologyError
from cartogram.utils.geometry import (
    GEOM_EPS, ChordArc, Point, SimplePolygon, polygon_signed_area, segments_cross,
)

logger = logging.getLogger(__name__)

SNAP_EPS_RATIO = 1e-6
SEA_NAME = 'sea'


@dataclass(frozen=True)
class HalfEdge:
    index: int
    origin: int
    twin: int
    face: int
    next: int = None
    prev: int = None


@dataclass(frozen=True)
class Face:
    index: int
    name: str
    boundary: tuple
    ring: tuple
    initial_area: float
    weight: float = None
    target_area: float = None
    delta: float = 0.0
    is_sea: bool = False


@dataclass(frozen=True)
class Target:
    target: float
    delta: float


@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str
    message: str

    def __str__(self):
        return f"{self.entity}: [{self.rule}] {self.message}"


@dataclass(frozen=True)
class Subdivision:
    vertices: tuple = ()
    half_edges: tuple = ()
    faces: tuple = ()
    sea_face: int = None

    @classmethod
    def from_rings(cls, vertices, rings, names, weights=None, sea=None):
        """
        Assemble the half-edge structure from vertex-index rings as given.

        Nothing is repaired: orientation, simplicity and crossings are left to
        validate(). Edges of an explicit sea ring that border nothing else are
        dropped, since both of their sides are sea.
        """
        vertices = tuple(vertices)
        weights = list(weights) if weights is not None else [None] * len(rings)
        owner = {}
        for f, ring in enumerate(rings):
            for i, u in enumerate(ring):
                v = ring[(i + 1) % len(ring)]
                if (u, v) in owner:
                    raise TopologyError(
                        "Faces %(faces)s run along the same border in the same direction.",
                        code='overlap',
                        params={'faces': [names[owner[(u, v)]], names[f]]},
                    )
                owner[(u, v)] = f

        sea_id = sea if sea is not None else len(rings)
        records = []
        index_of = {}
        for f, ring in enumerate(rings):
            for i, u in enumerate(ring):
                v = ring[(i + 1) % len(ring)]
                if f == sea and (v, u) not in owner:
                    continue
                index_of[(u, v)] = len(records)
                records.append({'origin': u, 'dest': v, 'face': f})

        for f, ring in enumerate(rings):
            if f == sea:
                continue
            for i, u in enumerate(ring):
                v = ring[(i + 1) % len(ring)]
                if (v, u) not in index_of:
                    index_of[(v, u)] = len(records)
                    records.append({'origin': v, 'dest': u, 'face': sea_id})

        links = {}
        for f, ring in enumerate(rings):
            if f == sea:
                continue
            count = len(ring)
            for i, u in enumerate(ring):
                e = index_of[(u, ring[(i + 1) % count])]
                links[e] = (
                    index_of[(ring[(i + 1) % count], ring[(i + 2) % count])],
                    index_of[(ring[i - 1], u)],
                )

        half_edges = tuple(
            HalfEdge(
                index=e,
                origin=rec['origin'],
                twin=index_of[(rec['dest'], rec['origin'])],
                face=rec['face'],
                next=links.get(e, (None, None))[0],
                prev=links.get(e, (None, None))[1],
            )
            for e, rec in enumerate(records)
        )

        faces = []
        for f, ring in enumerate(rings):
            points = [vertices[i] for i in ring]
            if f == sea:
                boundary = tuple(e.index for e in half_edges if e.face == f)
            else:
                count = len(ring)
                boundary = tuple(index_of[(ring[i], ring[(i + 1) % count])] for i in range(count))
            faces.append(Face(
                index=f,
                name=names[f],
                boundary=boundary,
                ring=tuple(ring),
                initial_area=polygon_signed_area(points) if len(points) >= 3 else 0.0,
                weight=weights[f],
                is_sea=(f == sea),
            ))
        if sea is None and any(e.face == sea_id for e in half_edges):
            faces.append(Face(
                index=sea_id,
                name=SEA_NAME,
                boundary=tuple(e.index for e in half_edges if e.face == sea_id),
                ring=(),
                initial_area=0.0,
                is_sea=True,
            ))
        has_sea = any(face.is_sea for face in faces)
        return cls(vertices, half_edges, tuple(faces), sea_id if has_sea else None)

    def destination(self, e):
        return self.half_edges[self.half_edges[e].twin].origin

    def chord(self, e):
        half_edge = self.half_edges[e]
        return self.vertices[half_edge.origin], self.vertices[self.destination(e)]

    def arc(self, e, sagitta=0.0):
        a, b = self.chord(e)
        return ChordArc(a, b, sagitta)

    def edge_length(self, e):
        a, b = self.chord(e)
        return a.distance_to(b)

    def land_faces(self):
        return [face for face in self.faces if not face.is_sea]

    @property
    def sea(self):
        return self.faces[self.sea_face] if self.sea_face is not None else None

    def is_sea(self, f):
        return self.sea_face is not None and f == self.sea_face

    def face_polygon(self, f):
        return self.polygons[f]

    @cached_property
    def polygons(self):
        return {
            face.index: SimplePolygon(tuple(self.vertices[i] for i in face.ring))
            for face in self.faces if face.ring
        }

    def canonical(self, e):
        """The half-edge of e's undirected edge whose face has the lower id."""
        half_edge = self.half_edges[e]
        twin = self.half_edges[half_edge.twin]
        return e if half_edge.face < twin.face else twin.index

    def undirected_edges(self):
        return [e.index for e in self.half_edges if self.canonical(e.index) == e.index]

    def face_index(self, selector):
        """Face id from an index or a name; unknown selectors raise DomainError."""
        if isinstance(selector, int) or (isinstance(selector, str) and selector.isdigit()):
            index = int(selector)
            if 0 <= index < len(self.faces):
                return index
        for face in self.faces:
            if face.name == selector:
                return face.index
        raise DomainError(
            "Unknown face %(face)s.", code='unknown_face', params={'face': selector})

    @cached_property
    def bbox_diagonal(self):
        if not self.vertices:
            return 0.0
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))

    def with_targets(self, targets):
        faces = []
        for face in self.faces:
            target = targets.get(face.index)
            if target is None:
                faces.append(replace(face, target_area=None, delta=0.0))
            else:
                faces.append(replace(face, target_area=target.target, delta=target.delta))
        return replace(self, faces=tuple(faces))

    def deltas(self):
        return {face.index: face.delta for face in self.faces
                if not face.is_sea and face.target_area is not None}


def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def _snap(coords, snap_eps):
    """Merge coordinates closer than snap_eps; returns (unique coords, id per input)."""
    parent = list(range(len(coords)))
    for i, j in sorted(cKDTree(coords).query_pairs(snap_eps)):
        ri, rj = _find(parent, i), _find(parent, j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    ids = {}
    unique = []
    mapping = []
    for i in range(len(coords)):
        root = _find(parent, i)
        if root not in ids:
            ids[root] = len(unique)
            unique.append(coords[root])
        mapping.append(ids[root])
    return np.asarray(unique, dtype=float), mapping


def _split_t_junctions(ring, points, snap_eps):
    """Insert every vertex lying on the interior of a ring edge into that edge."""
    result = []
    count = len(ring)
    for i, u in enumerate(ring):
        v = ring[(i + 1) % count]
        result.append(u)
        a = points[u]
        d = points[v] - a
        length2 = float(d @ d)
        if length2 == 0:
            continue
        t = (points - a) @ d / length2
        foot = a + np.outer(t, d)
        dist = np.hypot(*(points - foot).T)
        margin = snap_eps / math.sqrt(length2)
        on_edge = np.nonzero((dist <= snap_eps) & (t > margin) & (t < 1 - margin))[0]
        inserted = sorted((w for w in on_edge if w not in (u, v)), key=lambda w: t[w])
        result.extend(int(w) for w in inserted)
    return result


def build_from_polygons(polygons, snap_eps=None, sea=None, snap_eps_ratio=SNAP_EPS_RATIO):
    """
    Build a subdivision from (name, ring, weight) triples.

    Vertices closer than snap_eps merge, vertices lying on another ring's edge
    split that edge, rings are turned counterclockwise. The unbounded
    complement becomes the sea unless `sea` names an explicit sea polygon, in
    which case both are the same sea node.
    """
    if not polygons:
        return Subdivision()

    names = [name for name, _, _ in polygons]
    weights = [weight for _, _, weight in polygons]
    if len(set(names)) != len(names):
        raise TopologyError("Face names must be unique.", code='duplicate_name',
                            params={'faces': names})
    if sea is not None:
        if not 0 <= sea < len(polygons):
            raise TopologyError("Sea index %(sea)s is out of range.", code='sea_index',
                                params={'faces': [], 'sea': sea})
        if weights[sea] is not None:
            raise DomainError("Sea face %(face)s must not carry a weight.",
                              code='sea_weight', params={'face': names[sea]})
    if SEA_NAME in names and (sea is None or names[sea] != SEA_NAME):
        raise DomainError("Face name %(face)s is reserved for the sea.",
                          code='reserved_name', params={'face': SEA_NAME})

    flat = [(float(x), float(y)) for _, ring, _ in polygons for x, y in ring]
    coords = np.asarray(flat, dtype=float)
    if not np.all(np.isfinite(coords)):
        raise DomainError("Vertex coordinates must be finite.", code='non_finite_point')
    span = coords.max(axis=0) - coords.min(axis=0)
    diagonal = float(math.hypot(*span))
    if diagonal == 0:
        raise TopologyError("All vertices coincide.", code='degenerate_map', params={'faces': names})
    if snap_eps is None:
        snap_eps = snap_eps_ratio * diagonal
    points, mapping = _snap(coords, snap_eps)

    rings = []
    offset = 0
    for name, ring, _ in polygons:
        ids = mapping[offset:offset + len(ring)]
        offset += len(ring)
        cleaned = [v for i, v in enumerate(ids) if v != ids[i - 1]] if len(ids) > 1 else list(ids)
        if len(set(cleaned)) < 3:
            raise TopologyError("Face %(face)s collapses to fewer than 3 vertices.",
                                code='degenerate_ring', params={'faces': [name], 'face': name})
        if not LinearRing([tuple(points[v]) for v in cleaned]).is_simple:
            raise TopologyError("Face %(face)s intersects itself.",
                                code='self_intersection', params={'faces': [name], 'face': name})
        signed = polygon_signed_area([Point(*points[v]) for v in cleaned])
        if signed == 0:
            raise TopologyError("Face %(face)s has zero area.",
                                code='degenerate_ring', params={'faces': [name], 'face': name})
        if signed < 0:
            cleaned.reverse()
        rings.append(_split_t_junctions(cleaned, points, snap_eps))

    shapes = []
    for name, ring in zip(names, rings):
        shapes.append(ShapelyPolygon([tuple(points[v]) for v in ring]))

    tree = STRtree(shapes)
    for i, j in zip(*tree.query(shapes, predicate='intersects')):
        if i >= j:
            continue
        overlap = shapes[i].intersection(shapes[j]).area
        if overlap > snap_eps * (shapes[i].length + shapes[j].length):
            raise TopologyError(
                "Faces %(first)s and %(second)s overlap.",
                code='overlap',
                params={'faces': [names[i], names[j]], 'first': names[i], 'second': names[j]},
            )

    directed = {}
    for f, ring in enumerate(rings):
        for k, u in enumerate(ring):
            directed[(u, ring[(k + 1) % len(ring)])] = f

    union = unary_union(shapes)
    parts = list(union.geoms) if hasattr(union, 'geoms') else [union]
    gaps = [LineString(interior.coords) for part in parts for interior in part.interiors]
    exterior_edges = [(u, v, f) for (u, v), f in directed.items() if (v, u) not in directed]
    for u, v, f in exterior_edges:
        if f == sea:
            continue
        midpoint = (points[u] + points[v]) / 2
        midline = LineString([tuple(points[u]), tuple(midpoint), tuple(points[v])])
        if any(gap.distance(midline.interpolate(0.5, normalized=True)) <= snap_eps for gap in gaps):
            raise TopologyError(
                "Face %(face)s has a border with nothing on the other side.",
                code='dangling',
                params={'faces': [names[f]], 'face': names[f]},
            )
    if sea is not None and not any(f == sea for _, _, f in exterior_edges):
        raise TopologyError(
            "Sea face %(face)s does not reach the map exterior; a single sea region is supported.",
            code='multiple_sea',
            params={'faces': [names[sea]], 'face': names[sea]},
        )

    vertices = [Point(float(x), float(y)) for x, y in points]
    subdivision = Subdivision.from_rings(vertices, rings, names, weights, sea)
    logger.debug("built subdivision: %d vertices, %d half-edges, %d faces",
                 len(subdivision.vertices), len(subdivision.half_edges), len(subdivision.faces))
    return subdivision


def _connected_components(s):
    parent = {}
    for e in s.half_edges:
        parent.setdefault(e.origin, e.origin)
    for e in s.half_edges:
        a, b = _find(parent, e.origin), _find(parent, s.destination(e.index))
        if a != b:
            parent[max(a, b)] = min(a, b)
    return len({_find(parent, v) for v in parent}), len(parent)


def validate(s, eps=GEOM_EPS):
    """Check every structural invariant; returns a list of Violation (empty when valid)."""
    violations = []
    half_edges = s.half_edges
    count = len(half_edges)

    for e in half_edges:
        entity = f"half-edge {e.index}"
        if not 0 <= e.twin < count or half_edges[e.twin].twin != e.index:
            violations.append(Violation(entity, 'twin', "twin pointer is not symmetric"))
            continue
        if half_edges[e.twin].face == e.face:
            violations.append(Violation(entity, 'twin', "both sides belong to the same face"))

    seas = [face for face in s.faces if face.is_sea]
    if len(seas) > 1:
        violations.append(Violation('map', 'sea', "more than one sea face"))
    for face in seas:
        if face.weight is not None or face.target_area is not None:
            violations.append(Violation(f"face {face.name}", 'sea', "sea face carries a weight"))

    for face in s.land_faces():
        entity = f"face {face.name}"
        boundary = face.boundary
        if len(boundary) < 3:
            violations.append(Violation(entity, 'degenerate', "boundary has fewer than 3 edges"))
            continue
        walk = [boundary[0]]
        while len(walk) <= len(boundary):
            nxt = half_edges[walk[-1]].next
            if nxt is None or nxt == boundary[0]:
                break
            walk.append(nxt)
        if tuple(walk) != tuple(boundary) or any(half_edges[e].face != face.index for e in boundary):
            violations.append(Violation(entity, 'cycle', "boundary is not a closed next-cycle"))
            continue

        points = [s.vertices[half_edges[e].origin] for e in boundary]
        signed = polygon_signed_area(points)
        if signed <= 0:
            violations.append(Violation(entity, 'orientation', "boundary is not counterclockwise"))
        if not LinearRing([p.as_tuple() for p in points]).is_simple:
            violations.append(Violation(entity, 'simplicity', "boundary intersects itself"))
        if abs(face.initial_area - signed) > 1e-9 * max(1.0, abs(signed)):
            violations.append(Violation(entity, 'area', "initial area differs from the shoelace area"))
        if face.target_area is not None and abs(
                face.delta - (face.target_area - face.initial_area)) > 1e-9 * max(1.0, face.target_area):
            violations.append(Violation(entity, 'delta', "delta is not target minus initial area"))

    edges = s.undirected_edges() if not violations or all(v.rule != 'twin' for v in violations) else []
    segments = [LineString([s.chord(e)[0].as_tuple(), s.chord(e)[1].as_tuple()]) for e in edges]
    if segments:
        tree = STRtree(segments)
        for i, j in zip(*tree.query(segments, predicate='intersects')):
            if i >= j:
                continue
            a1, a2 = s.chord(edges[i])
            b1, b2 = s.chord(edges[j])
            if segments_cross(a1, a2, b1, b2, eps):
                faces_i = sorted({s.faces[half_edges[edges[i]].face].name,
                                  s.faces[half_edges[half_edges[edges[i]].twin].face].name})
                faces_j = sorted({s.faces[half_edges[edges[j]].face].name,
                                  s.faces[half_edges[half_edges[edges[j]].twin].face].name})
                violations.append(Violation(
                    f"edges {edges[i]} and {edges[j]}", 'crossing',
                    f"border {'/'.join(faces_i)} crosses border {'/'.join(faces_j)}",
                ))

        components, used_vertices = _connected_components(s)
        euler = used_vertices - len(edges) + len(s.faces)
        if euler != 1 + components:
            violations.append(Violation(
                'map', 'euler', f"V - E + F = {euler}, expected {1 + components}"))
    return violations


def normalize_weights(s, raw_weights):
    """
    Rescale raw weights so the targets sum to the total land area.

    Keys may be face indices or names. Returns {face id: Target}.

    Example:
        areas (1, 3), weights (1, 1)       -> targets (2, 2), deltas (1, -1)
        areas (1, 2, 3), weights (3, 2, 1) -> targets (3, 2, 1), deltas (2, 0, -2)
    """
    weights = _resolve(s, raw_weights)
    for f, weight in weights.items():
        if not math.isfinite(weight) or weight <= 0:
            raise DomainError(
                "Weight of face %(face)s must be positive, got %(weight)s.",
                code='non_positive_weight',
                params={'face': s.faces[f].name, 'weight': weight},
            )
    total_area = sum(face.initial_area for face in s.land_faces())
    total_weight = math.fsum(weights.values())
    targets = {}
    for face in s.land_faces():
        target = weights[face.index] * total_area / total_weight
        targets[face.index] = Target(target, target - face.initial_area)
    return targets


def apply_targets(s, targets):
    """Absolute targets, used verbatim (zero allowed); the sea absorbs any imbalance."""
    values = _resolve(s, targets)
    result = {}
    for face in s.land_faces():
        target = values[face.index]
        if not math.isfinite(target) or target < 0:
            raise DomainError(
                "Target of face %(face)s must be non-negative, got %(target)s.",
                code='negative_target',
                params={'face': face.name, 'target': target},
            )
        result[face.index] = Target(target, target - face.initial_area)
    return result


def _resolve(s, raw):
    resolved = {}
    for key, value in raw.items():
        f = s.face_index(key)
        if s.faces[f].is_sea:
            if value is None:
                continue
            raise DomainError(
                "Sea face %(face)s must not carry a weight.",
                code='sea_weight', params={'face': s.faces[f].name})
        if value is None:
            continue
        resolved[f] = float(value)
    missing = [face.name for face in s.land_faces() if face.index not in resolved]
    if missing:
        raise DomainError(
            "No weight given for faces %(faces)s.",
            code='missing_weight', params={'faces': missing})
    return resolved


@dataclass(frozen=True)
class DualGraph:
    graph: nx.DiGraph = field(default_factory=nx.DiGraph)

    def shared(self, u, v):
        return self.graph.edges[u, v]['half_edges']

    def adjacencies(self):
        return sorted((u, v) for u, v in self.graph.edges if u < v)

    def directed_edges(self):
        return sorted(self.graph.edges)

    @property
    def nodes(self):
        return sorted(self.graph.nodes)


def dual_graph(s):
    """Face graph with both directions per adjacency; each carries u's shared half-edges."""
    shared = {}
    for e in s.half_edges:
        v = s.half_edges[e.twin].face
        shared.setdefault((e.face, v), []).append(e.index)

    graph = nx.DiGraph()
    for face in s.faces:
        graph.add_node(face.index, name=face.name, is_sea=face.is_sea)
    for (u, v), half_edges in sorted(shared.items()):
        graph.add_edge(u, v, half_edges=tuple(sorted(half_edges)))
    return DualGraph(graph)


def _rings(s):
    return [list(face.ring) for face in s.faces if face.ring]


def _rebuild(s, vertices, rings):
    polygon_faces = [face for face in s.faces if face.ring]
    names = [face.name for face in polygon_faces]
    weights = [face.weight for face in polygon_faces]
    sea = s.sea_face if s.sea is not None and s.sea.ring else None
    return Subdivision.from_rings(vertices, rings, names, weights, sea)


def _compacted(vertices, rings):
    """Drop vertices no ring uses and renumber the rest in their old order."""
    used = sorted({v for ring in rings for v in ring})
    index = {old: new for new, old in enumerate(used)}
    return [vertices[i] for i in used], [[index[v] for v in ring] for ring in rings]


def merge_degree2(s, eps=GEOM_EPS):
    """
    Drop degree-2 vertices that sit on the straight line between their two
    neighbours, so a chain of collinear pieces becomes one edge.

    Corners are kept, so face areas stay the same. The rebuilt map carries
    weights but no targets; apply them afterwards.
    """
    rings = _rings(s)
    vertices = list(s.vertices)
    changed = True
    removed = 0
    while changed:
        changed = False
        edges = {frozenset((ring[i], ring[(i + 1) % len(ring)])) for ring in rings for i in range(len(ring))}
        incident = {}
        for edge in edges:
            for v in edge:
                incident.setdefault(v, []).append(edge)
        for v in sorted(incident):
            if len(incident[v]) != 2:
                continue
            (u,) = incident[v][0] - {v}
            (w,) = incident[v][1] - {v}
            a, b = vertices[u], vertices[w]
            if not _on_segment(vertices[v], a, b, eps * max(1.0, a.distance_to(b))):
                continue
            candidate = [[x for x in ring if x != v] for ring in rings]
            if not _merge_keeps_faces(candidate, rings, v, vertices, s):
                continue
            others = [edge for edge in edges if v not in edge]
            if any(segments_cross(a, b, vertices[p], vertices[q], eps) for p, q in map(tuple, others)):
                continue
            if any(x not in (u, w, v) and _on_segment(vertices[x], a, b, eps) for x in incident):
                continue
            rings = candidate
            removed += 1
            changed = True
            break
    logger.debug("merged %d degree-2 vertices", removed)
    return _rebuild(s, *_compacted(vertices, rings))


def _on_segment(point, a, b, eps):
    d = b - a
    length = d.norm()
    if length == 0:
        return False
    t = (point - a).dot(d) / (length * length)
    return 0 < t < 1 and abs(d.cross(point - a)) / length <= eps


def _merge_keeps_faces(candidate, rings, v, vertices, s):
    polygon_faces = [face for face in s.faces if face.ring]
    for face, old, new in zip(polygon_faces, rings, candidate):
        if len(new) == len(old):
            continue
        if len(new) < 3:
            return False
        points = [vertices[i] for i in new]
        if polygon_signed_area(points) <= 0:
            return False
        if not LinearRing([p.as_tuple() for p in points]).is_simple:
            return False
    return True


def refine(s, parts):
    """Split every edge into `parts` equal collinear pieces."""
    if parts < 1:
        raise DomainError("parts must be at least 1.", code='invalid_parts')
    rings = _rings(s)
    vertices = list(s.vertices)
    inserted = {}
    for ring in rings:
        for i, u in enumerate(ring):
            v = ring[(i + 1) % len(ring)]
            key = (min(u, v), max(u, v))
            if key in inserted:
                continue
            a, b = vertices[key[0]], vertices[key[1]]
            ids = []
            for k in range(1, parts):
                t = k / parts
                ids.append(len(vertices))
                vertices.append(Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
            inserted[key] = ids

    refined = []
    for ring in rings:
        out = []
        for i, u in enumerate(ring):
            v = ring[(i + 1) % len(ring)]
            out.append(u)
            ids = inserted[(min(u, v), max(u, v))]
            out.extend(ids if u < v else reversed(ids))
        refined.append(out)
    return _rebuild(s, vertices, refined)
