import logging
import math
from dataclasses import dataclass, field

from shapely import STRtree
from shapely.geometry import box

from cartogram.exceptions import InvariantViolation
from cartogram.utils.config import RunConfig
from cartogram.utils.geometry import (
    arc_crosses_segment, arc_in_polygon, arcs_intersect, face_area_with_arcs,
    sagitta_for_area, segment_area,
)
from cartogram.utils.skeleton import STRONG, compute_skeletons
from cartogram.utils.subdivision import Violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BendingConfiguration:
    """
    One signed sagitta per undirected edge, stored against the edge's
    canonical half-edge (the side of the lower face id). Positive bulges to
    the left of that half-edge.
    """

    s: object
    sagittas: dict = field(default_factory=dict)
    areas: dict = field(default_factory=dict)

    def sagitta(self, half_edge):
        canonical = self.s.canonical(half_edge)
        value = self.sagittas.get(canonical, 0.0)
        return value if canonical == half_edge else -value

    def arc(self, half_edge):
        return self.s.arc(half_edge, self.sagitta(half_edge))

    def bent_edges(self):
        return sorted(e for e, h in self.sagittas.items() if h != 0)

    def loser(self, half_edge):
        """Face the arc of this edge bulges into, or None when straight."""
        h = self.sagitta(half_edge)
        if h == 0:
            return None
        e = self.s.half_edges[half_edge]
        return e.face if h > 0 else self.s.half_edges[e.twin].face


def realize(s, plan, caps, config=None):
    """
    Turn a transfer plan into arcs.

    A transfer from u to v is split over the borders u and v share in
    proportion to their capacities; every border bends into u by the sagitta
    whose segment has the assigned area.

    Example:
        capacities (c, 3c), transfer 2c -> segment areas (0.5c, 1.5c)
    """
    config = config or RunConfig()
    sagittas = {}
    for (u, v), amount in plan:
        capacity = caps.get((u, v))
        total = capacity.total if capacity is not None else 0.0
        if amount > total + 1e-9 * max(1.0, total):
            raise InvariantViolation(
                f"transfer {amount!r} from face {u} to {v} exceeds capacity {total!r}")
        if total <= 0:
            continue
        for bend in capacity.edges:
            if bend.capacity <= 0:
                continue
            share = amount * bend.capacity / total
            if share > bend.capacity + 1e-9 * max(1.0, bend.capacity):
                raise InvariantViolation(
                    f"half-edge {bend.half_edge} asked for {share!r}, holds {bend.capacity!r}")
            share = min(share, segment_area(bend.length, bend.max_sagitta))
            h = sagitta_for_area(bend.length, share, config.bisection_tol,
                                 config.max_sagitta_ratio, config.bisection_max_iter)
            h = min(h, bend.max_sagitta)
            canonical = s.canonical(bend.half_edge)
            sagittas[canonical] = h if canonical == bend.half_edge else -h
    cfg = BendingConfiguration(s, sagittas)
    cfg = BendingConfiguration(s, sagittas, resulting_areas(s, cfg))
    logger.debug("realized %d bent edges", len(cfg.bent_edges()))
    return cfg


def resulting_areas(s, cfg):
    """Face areas after bending. The sea changes by the net segment area of its borders."""
    areas = {}
    for face in s.faces:
        if face.is_sea:
            change = math.fsum(
                -math.copysign(segment_area(s.edge_length(e), abs(cfg.sagitta(e))), cfg.sagitta(e))
                for e in face.boundary if cfg.sagitta(e) != 0
            )
            areas[face.index] = face.initial_area + change
        else:
            polygon = s.face_polygon(face.index)
            areas[face.index] = face_area_with_arcs(polygon, [cfg.sagitta(e) for e in face.boundary])
    return areas


def _padded_box(arc, eps):
    min_x, min_y, max_x, max_y = arc.bounds
    return box(min_x - eps, min_y - eps, max_x + eps, max_y + eps)


def _strong_ok(s, loser, gainer):
    shrinking = s.is_sea(loser) or s.faces[loser].delta < 0
    growing = s.is_sea(gainer) or s.faces[gainer].delta > 0
    return shrinking and growing


def verify(s, cfg, mode, config=None, skeletons=None):
    """
    Validity check of a configuration; returns Violation records.

    Looks for crossing arcs, arcs leaving the skeleton region of the face they
    bulge into (or swallowing a vertex on the sea side) and, in strong mode,
    bends that move area against a face's sign of change.
    """
    config = config or RunConfig()
    eps = config.geom_eps
    violations = []
    edges = s.undirected_edges()
    arcs = [cfg.arc(e) for e in edges]

    if arcs:
        boxes = [_padded_box(arc, eps) for arc in arcs]
        tree = STRtree(boxes)
        for i, j in zip(*tree.query(boxes, predicate='intersects')):
            if i < j and arcs_intersect(arcs[i], arcs[j], eps):
                violations.append(Violation(
                    f"edges {edges[i]} and {edges[j]}", 'crossing', "arcs cross"))

    if skeletons is None:
        skeletons = compute_skeletons(s, eps)
    for e in cfg.bent_edges():
        loser = cfg.loser(e)
        half_edge = e if s.half_edges[e].face == loser else s.half_edges[e].twin
        arc = cfg.arc(half_edge)
        if s.is_sea(loser):
            ends = {s.half_edges[half_edge].origin, s.destination(half_edge)}
            swallowed = [
                i for i, point in enumerate(s.vertices)
                if i not in ends and (arc.b - arc.a).cross(point - arc.a) > eps
                and point.distance_to(arc.center) < arc.radius - eps
            ]
            crossed = [
                other for other in edges if other != e
                and arc_crosses_segment(arc, *s.chord(other), eps)
            ]
            if swallowed or crossed:
                violations.append(Violation(
                    f"edge {e}", 'containment', "sea-side arc swallows a vertex or crosses an edge"))
            continue
        position = s.faces[loser].boundary.index(half_edge)
        region = skeletons[loser].region(position)
        if not arc_in_polygon(arc, region, eps):
            violations.append(Violation(
                f"edge {e}", 'containment',
                f"arc leaves the skeleton region of face {s.faces[loser].name}"))

    if mode == STRONG:
        for e in cfg.bent_edges():
            loser = cfg.loser(e)
            half_edge = s.half_edges[e]
            gainer = half_edge.face if loser != half_edge.face else s.half_edges[half_edge.twin].face
            if not _strong_ok(s, loser, gainer):
                violations.append(Violation(
                    f"edge {e}", 'strong',
                    f"moves area from {s.faces[loser].name} to {s.faces[gainer].name} "
                    f"against their area change"))
    return violations
