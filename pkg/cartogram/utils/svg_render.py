"""
SVG output. Map coordinates have y pointing up, so geometry is drawn inside
a scale(1,-1) group; labels live outside it so their text is not mirrored.
"""

import svgwrite
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import polylabel

UNDERLAY = '#d0d0d0'
FACE_FILL = '#9ecae1'
EDGE_STROKE = '#08306b'
RIDGE_STROKE = '#cb181d'
MARGIN_RATIO = 0.05


def _num(value):
    text = f"{value:.12g}"
    return '0' if text == '-0' else text


def arc_command(arc):
    """Path command drawing arc from its start point (the caller has already moved there)."""
    if arc.is_straight:
        return f"L {_num(arc.b.x)} {_num(arc.b.y)}"
    large = 1 if abs(arc.sagitta) > arc.chord_length / 2 else 0
    sweep = 1 if arc.sweep > 0 else 0
    r = _num(arc.radius)
    return f"A {r} {r} 0 {large} {sweep} {_num(arc.b.x)} {_num(arc.b.y)}"


def arc_path(arc):
    return f"M {_num(arc.a.x)} {_num(arc.a.y)} {arc_command(arc)}"


def _drawing(bounds, width):
    min_x, min_y, max_x, max_y = bounds
    span = max(max_x - min_x, max_y - min_y, 1e-9)
    margin = span * MARGIN_RATIO
    w = max_x - min_x + 2 * margin
    h = max_y - min_y + 2 * margin
    view = f"{_num(min_x - margin)} {_num(-(max_y + margin))} {_num(w)} {_num(h)}"
    return svgwrite.Drawing(size=(width, width * h / w), viewBox=view, debug=False), span


def _face_label(row):
    if row is None:
        return None
    rate = 'n/a' if row.success_rate is None else f"{row.success_rate:.2f}"
    return f"({rate}, {row.cartographic_error:.2f})"


def render_svg(s, cfg, report=None, width=800):
    """Gray input underlay, arc overlay per edge and one "(success, error)" label per face."""
    if not s.vertices:
        return svgwrite.Drawing(size=(width, width), debug=False).tostring().encode('utf-8')
    xs = [p.x for p in s.vertices]
    ys = [p.y for p in s.vertices]
    bounds = [min(xs), min(ys), max(xs), max(ys)]
    for e in cfg.bent_edges():
        min_x, min_y, max_x, max_y = cfg.arc(e).bounds
        bounds = [min(bounds[0], min_x), min(bounds[1], min_y), max(bounds[2], max_x), max(bounds[3], max_y)]
    dwg, span = _drawing(bounds, width)
    stroke = span / 400

    geometry = dwg.g(transform='scale(1,-1)')
    underlay = dwg.g(class_='underlay')
    for face in s.land_faces():
        points = [(p.x, p.y) for p in s.face_polygon(face.index).vertices]
        underlay.add(dwg.polygon(points, fill=UNDERLAY, stroke='none'))
    geometry.add(underlay)

    faces = dwg.g(class_='faces')
    for face in s.land_faces():
        first = s.half_edges[face.boundary[0]]
        start = s.vertices[first.origin]
        commands = [f"M {_num(start.x)} {_num(start.y)}"]
        commands.extend(arc_command(cfg.arc(e)) for e in face.boundary)
        commands.append('Z')
        faces.add(dwg.path(d=' '.join(commands), fill=FACE_FILL, fill_opacity=0.35, stroke='none',
                           id=f"face-{face.index}"))
    geometry.add(faces)

    edges = dwg.g(class_='edges', fill='none', stroke=EDGE_STROKE, stroke_width=_num(stroke))
    for e in s.undirected_edges():
        edges.add(dwg.path(d=arc_path(cfg.arc(e)), class_='edge', id=f"edge-{e}"))
    geometry.add(edges)
    dwg.add(geometry)

    if report is not None:
        rows = {row.name: row for row in report.faces}
        labels = dwg.g(class_='labels', text_anchor='middle', font_family='sans-serif')
        for face in s.land_faces():
            text = _face_label(rows.get(face.name))
            if text is None:
                continue
            shape = ShapelyPolygon(s.face_polygon(face.index).coords())
            anchor = polylabel(shape, tolerance=span / 1000)
            inradius = shape.exterior.distance(anchor)
            size = max(inradius * 0.35, span / 200)
            labels.add(dwg.text(text, insert=(_num(anchor.x), _num(-anchor.y)), font_size=_num(size)))
        dwg.add(labels)
    return dwg.tostring().encode('utf-8')


def render_skeleton_svg(polygon, skeleton, arcs=(), width=600):
    """Face outline, its skeleton ridges and the largest safe arc on every edge."""
    dwg, span = _drawing(polygon.bounds, width)
    stroke = span / 300
    geometry = dwg.g(transform='scale(1,-1)', fill='none')
    geometry.add(dwg.polygon(polygon.coords(), fill=UNDERLAY, stroke=EDGE_STROKE,
                             stroke_width=_num(stroke), class_='outline'))
    ridges = dwg.g(class_='ridges', stroke=RIDGE_STROKE, stroke_width=_num(stroke))
    for p, q in skeleton.ridges:
        ridges.add(dwg.line((_num(p.x), _num(p.y)), (_num(q.x), _num(q.y)), class_='ridge'))
    geometry.add(ridges)
    bends = dwg.g(class_='arcs', stroke=EDGE_STROKE, stroke_width=_num(stroke), stroke_dasharray='4,2')
    for arc in arcs:
        bends.add(dwg.path(d=arc_path(arc), class_='arc'))
    geometry.add(bends)
    dwg.add(geometry)
    return dwg.tostring().encode('utf-8')
