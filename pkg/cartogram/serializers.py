import math

from django.utils.translation import gettext_lazy as _
from rest_framework import serializers

from cartogram.utils.subdivision import SEA_NAME

WEIGHT_MODES = ('relative', 'absolute')
FORMAT_VERSION = 1


class PointField(serializers.ListField):
    child = serializers.FloatField()

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        point = super().to_internal_value(data)
        if not all(math.isfinite(c) for c in point):
            raise serializers.ValidationError(_('Coordinates must be finite.'))
        return tuple(point)


# Topological document Section
class FaceSerializer(serializers.Serializer):
    name = serializers.CharField(max_length=200)
    ring = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=3)
    weight = serializers.FloatField(allow_null=True, required=False, default=None)


class SubdivisionDocumentSerializer(serializers.Serializer):
    format_version = serializers.IntegerField(
        min_value=FORMAT_VERSION, max_value=FORMAT_VERSION, required=False, default=FORMAT_VERSION)
    vertices = serializers.ListField(child=PointField(), allow_empty=True)
    faces = FaceSerializer(many=True, allow_empty=True)
    sea = serializers.IntegerField(min_value=0, allow_null=True, required=False, default=None)
    weight_mode = serializers.ChoiceField(choices=WEIGHT_MODES, required=False, default='relative')

    def validate(self, attrs):
        vertices = attrs['vertices']
        faces = attrs['faces']
        errors = {}

        for i, face in enumerate(faces):
            ring = face['ring']
            bad = {k: [_('Vertex index %(index)s is out of range.') % {'index': v}]
                   for k, v in enumerate(ring) if v >= len(vertices)}
            if bad:
                errors.setdefault('faces', {})[i] = {'ring': bad}
                continue
            if len(set(ring)) < 3 or any(ring[k] == ring[k - 1] for k in range(len(ring))):
                errors.setdefault('faces', {})[i] = {
                    'ring': [_('Ring of %(name)s is degenerate.') % {'name': face['name']}]}

        names = [face['name'] for face in faces]
        for i, name in enumerate(names):
            if names.index(name) != i:
                errors.setdefault('faces', {}).setdefault(i, {})['name'] = [
                    _('Face name %(name)s is used twice.') % {'name': name}]

        sea = attrs.get('sea')
        for i, name in enumerate(names):
            if name == SEA_NAME and i != sea:
                errors.setdefault('faces', {}).setdefault(i, {})['name'] = [
                    _('Face name %(name)s is reserved for the sea.') % {'name': name}]
        if sea is not None:
            if sea >= len(faces):
                errors['sea'] = [_('Sea index %(index)s is out of range.') % {'index': sea}]
            elif faces[sea].get('weight') is not None:
                errors.setdefault('faces', {}).setdefault(sea, {})['weight'] = [
                    _('Sea face %(name)s must not carry a weight.') % {'name': faces[sea]['name']}]

        if errors:
            raise serializers.ValidationError(errors)
        return attrs
# ______________________________________


# Polygon soup Section
class SoupPolygonSerializer(serializers.Serializer):
    name = serializers.CharField(max_length=200)
    ring = serializers.ListField(child=PointField(), min_length=3)
    weight = serializers.FloatField(allow_null=True, required=False, default=None)


class PolygonSoupSerializer(serializers.Serializer):
    polygons = SoupPolygonSerializer(many=True, allow_empty=True)
    sea = serializers.CharField(allow_null=True, required=False, default=None)
    weight_mode = serializers.ChoiceField(choices=WEIGHT_MODES, required=False, default='relative')

    def validate(self, attrs):
        names = [polygon['name'] for polygon in attrs['polygons']]
        sea = attrs.get('sea')
        if sea is not None and sea not in names:
            raise serializers.ValidationError({'sea': [_('No polygon is named %(name)s.') % {'name': sea}]})
        for i, polygon in enumerate(attrs['polygons']):
            if polygon['name'] == SEA_NAME and sea != SEA_NAME:
                raise serializers.ValidationError({'polygons': {i: {'name': [
                    _('Face name %(name)s is reserved for the sea.') % {'name': SEA_NAME}]}}})
            if polygon['name'] == sea and polygon.get('weight') is not None:
                raise serializers.ValidationError({'polygons': {i: {'weight': [
                    _('Sea face %(name)s must not carry a weight.') % {'name': sea}]}}})
        return attrs
# ______________________________________


# Weight table Section
class WeightTableSerializer(serializers.Serializer):
    weights = serializers.DictField(child=serializers.FloatField(allow_null=True), allow_empty=True)
