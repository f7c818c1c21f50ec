import json

from rest_framework import serializers
from rest_framework.renderers import JSONRenderer


class ClassMetricsSerializer(serializers.Serializer):
    """Serializer for one class row of a classification report."""
    label = serializers.IntegerField(min_value=0)
    precision = serializers.FloatField(min_value=0, max_value=100)
    recall = serializers.FloatField(min_value=0, max_value=100)
    f1 = serializers.FloatField(min_value=0, max_value=100)
    support = serializers.IntegerField(min_value=0)


class ClassificationReportSerializer(serializers.Serializer):
    """Serializer for a full classification report."""
    classes = ClassMetricsSerializer(many=True)
    macro_precision = serializers.FloatField(min_value=0, max_value=100)
    macro_recall = serializers.FloatField(min_value=0, max_value=100)
    macro_f1 = serializers.FloatField(min_value=0, max_value=100)
    accuracy = serializers.FloatField(min_value=0, max_value=100)
    total = serializers.IntegerField(min_value=1)
    digits = serializers.IntegerField(allow_null=True)
    warnings = serializers.ListField(child=serializers.CharField())
    confusion = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(
            min_value=0)),
        required=False,
    )


def report_to_json(rep, cm=None):
    """Canonical JSON bytes for a report (and optionally its matrix)."""
    data = ClassificationReportSerializer(rep).data
    if cm is not None:
        data['confusion'] = cm.counts.tolist()
    return JSONRenderer().render(dict(sorted(data.items())))


def report_from_json(payload):
    """Validate a stored report; returns the validated mapping."""
    serializer = ClassificationReportSerializer(data=json.loads(payload))
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data
