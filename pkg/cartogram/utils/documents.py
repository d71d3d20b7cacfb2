"""
Reading and writing the topological subdivision document.

    {
      "format_version": 1,
      "vertices": [[0, 0], [2, 0], ...],
      "faces": [{"name": "A", "ring": [0, 1, 4, 3], "weight": 1.0}, ...],
      "sea": null,
      "weight_mode": "relative"
    }

Faces share vertex indices, so shared borders exist by construction. A
polygon soup (every face with its own coordinates) is accepted as well and
snapped into the same model.
"""

import csv
import io
import json
from dataclasses import dataclass

from cartogram.exceptions import DocumentError
from cartogram.serializers import (
    FORMAT_VERSION, PolygonSoupSerializer, SubdivisionDocumentSerializer, WeightTableSerializer,
)
from cartogram.utils.subdivision import SNAP_EPS_RATIO, build_from_polygons


@dataclass(frozen=True)
class FaceEntry:
    name: str
    ring: tuple
    weight: float = None


@dataclass(frozen=True)
class SubdivisionDocument:
    vertices: tuple = ()
    faces: tuple = ()
    sea: int = None
    weight_mode: str = 'relative'
    format_version: int = FORMAT_VERSION

    @property
    def weights(self):
        return {face.name: face.weight for face in self.faces if face.weight is not None}

    def with_weights(self, weights):
        """Weights from a separate table replace inline ones; every name must be a face."""
        known = {face.name for face in self.faces}
        unknown = sorted(name for name in weights if name not in known)
        if unknown:
            raise DocumentError(
                "Weight table names unknown regions %(names)s.",
                code='unknown_region', params={'path': '$', 'names': unknown})
        faces = tuple(
            FaceEntry(face.name, face.ring, weights.get(face.name, face.weight))
            for face in self.faces
        )
        return SubdivisionDocument(self.vertices, faces, self.sea, self.weight_mode, self.format_version)


def flatten_errors(detail, path='$'):
    """
    DRF error tree as (JSON path, message) pairs.

    Example:
        {'faces': {1: {'ring': {2: ['out of range']}}}} -> [('$.faces[1].ring[2]', 'out of range')]
    """
    if isinstance(detail, dict):
        pairs = []
        for key, value in detail.items():
            if key == 'non_field_errors':
                child = path
            elif isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
                child = f"{path}[{key}]"
            else:
                child = f"{path}.{key}"
            pairs.extend(flatten_errors(value, child))
        return pairs
    if isinstance(detail, list):
        if all(not isinstance(item, (dict, list)) for item in detail):
            return [(path, str(item)) for item in detail]
        pairs = []
        for i, item in enumerate(detail):
            if item:
                pairs.extend(flatten_errors(item, f"{path}[{i}]"))
        return pairs
    return [(path, str(detail))]


def _decoded(data):
    if not isinstance(data, bytes):
        return data
    try:
        return data.decode('utf-8')
    except UnicodeDecodeError as e:
        raise DocumentError("Input is not UTF-8: %(reason)s", code='encoding',
                            params={'path': '$', 'reason': str(e)})


def _load_json(data):
    data = _decoded(data)
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise DocumentError(
            "Malformed JSON at line %(line)s column %(column)s: %(reason)s",
            code='malformed_json',
            params={'path': '$', 'line': e.lineno, 'column': e.colno, 'reason': e.msg},
        )


def _validated(serializer_class, payload):
    if not isinstance(payload, dict):
        raise DocumentError("Top level must be a JSON object.", code='schema', params={'path': '$'})
    serializer = serializer_class(data=payload)
    if not serializer.is_valid():
        errors = flatten_errors(serializer.errors)
        path, message = errors[0]
        raise DocumentError(
            "%(path)s: %(message)s",
            code='schema',
            params={'path': path, 'message': message, 'errors': errors},
        )
    return serializer.validated_data


def parse_subdivision(data):
    """Schema-checked document from JSON bytes; DocumentError carries the JSON path of the problem."""
    attrs = _validated(SubdivisionDocumentSerializer, _load_json(data))
    return SubdivisionDocument(
        vertices=tuple(tuple(point) for point in attrs['vertices']),
        faces=tuple(
            FaceEntry(face['name'], tuple(face['ring']), face.get('weight'))
            for face in attrs['faces']
        ),
        sea=attrs.get('sea'),
        weight_mode=attrs.get('weight_mode', 'relative'),
        format_version=attrs.get('format_version', FORMAT_VERSION),
    )


def document_as_dict(doc):
    return {
        'format_version': doc.format_version,
        'vertices': [list(point) for point in doc.vertices],
        'faces': [
            {'name': face.name, 'ring': list(face.ring), 'weight': face.weight}
            for face in doc.faces
        ],
        'sea': doc.sea,
        'weight_mode': doc.weight_mode,
    }


def serialize_subdivision(doc):
    return (json.dumps(document_as_dict(doc), indent=2) + "\n").encode('utf-8')


def subdivision_from_document(doc, snap_eps=None, snap_eps_ratio=SNAP_EPS_RATIO):
    polygons = [
        (face.name, [doc.vertices[i] for i in face.ring], face.weight)
        for face in doc.faces
    ]
    return build_from_polygons(polygons, snap_eps=snap_eps, sea=doc.sea, snap_eps_ratio=snap_eps_ratio)


def document_from_subdivision(s, weights=None, weight_mode='relative'):
    """Document for the polygon faces of s; weights are keyed by face name."""
    weights = weights or {}
    polygon_faces = [face for face in s.faces if face.ring]
    sea = None
    for position, face in enumerate(polygon_faces):
        if face.is_sea:
            sea = position
    return SubdivisionDocument(
        vertices=tuple(p.as_tuple() for p in s.vertices),
        faces=tuple(
            FaceEntry(face.name, face.ring, None if face.is_sea else weights.get(face.name, face.weight))
            for face in polygon_faces
        ),
        sea=sea,
        weight_mode=weight_mode,
    )


def parse_polygon_soup(data, snap_eps=None, snap_eps_ratio=SNAP_EPS_RATIO):
    """Soup of independent rings, snapped into a topological document."""
    attrs = _validated(PolygonSoupSerializer, _load_json(data))
    polygons = [
        (polygon['name'], list(polygon['ring']), polygon.get('weight'))
        for polygon in attrs['polygons']
    ]
    if not polygons:
        return SubdivisionDocument(weight_mode=attrs.get('weight_mode', 'relative'))
    names = [name for name, _, _ in polygons]
    sea = names.index(attrs['sea']) if attrs.get('sea') is not None else None
    s = build_from_polygons(polygons, snap_eps=snap_eps, sea=sea, snap_eps_ratio=snap_eps_ratio)
    weights = {name: weight for name, _, weight in polygons if weight is not None}
    return document_from_subdivision(s, weights, attrs.get('weight_mode', 'relative'))


def _number(text, row, path):
    text = text.strip()
    if text == '' or text.lower() in ('null', 'none'):
        return None
    try:
        return float(text)
    except ValueError:
        raise DocumentError(
            "Weight %(value)s in row %(row)s is not a number.",
            code='schema', params={'path': path, 'value': text, 'row': row})


def parse_weights(data, fmt='json'):
    """
    Weight table name -> weight, from a JSON object or a two-column CSV whose
    header row is optional.
    """
    if fmt == 'csv':
        text = _decoded(data)
        rows = [row for row in csv.reader(io.StringIO(text)) if row and any(cell.strip() for cell in row)]
        weights = {}
        for i, row in enumerate(rows):
            path = f"$[{i}]"
            if len(row) != 2:
                raise DocumentError(
                    "Row %(row)s must have two columns.", code='schema', params={'path': path, 'row': i})
            if i == 0:
                try:
                    float(row[1])
                except ValueError:
                    continue
            weights[row[0].strip()] = _number(row[1], i, path)
        return weights

    payload = _load_json(data)
    if isinstance(payload, dict) and 'weights' not in payload:
        payload = {'weights': payload}
    attrs = _validated(WeightTableSerializer, payload)
    return dict(attrs['weights'])


def weights_format(path):
    return 'csv' if str(path).lower().endswith('.csv') else 'json'

