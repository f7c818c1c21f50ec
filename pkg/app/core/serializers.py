from django.utils.translation import gettext as _

from rest_framework import serializers

from network.attention import MODES


class RunConfigSerializer(serializers.Serializer):
    """Serializer for the merged run configuration."""
    seed = serializers.IntegerField(min_value=0)
    epochs = serializers.IntegerField(min_value=1)
    batch_size = serializers.IntegerField(min_value=1)
    learning_rate = serializers.FloatField(min_value=0)
    test_fraction = serializers.FloatField(min_value=0, max_value=1)
    validation_fraction = serializers.FloatField(min_value=0, max_value=1)
    attention_mode = serializers.ChoiceField(choices=MODES)
    input_features = serializers.IntegerField(min_value=1)
    num_classes = serializers.IntegerField(min_value=2)
    conv_filters = serializers.IntegerField(min_value=1)
    kernel_size = serializers.IntegerField(min_value=1)
    pool_size = serializers.IntegerField(min_value=1)
    bilstm_units_per_direction = serializers.IntegerField(min_value=1)
    attention_width = serializers.IntegerField(min_value=1)
    dense_units = serializers.IntegerField(min_value=1)
    dropout_rate = serializers.FloatField(min_value=0)
    out_dir = serializers.CharField()

    def validate_learning_rate(self, value):
        if value <= 0:
            raise serializers.ValidationError(_('Must be positive.'))
        return value

    def validate_dropout_rate(self, value):
        if value >= 1:
            raise serializers.ValidationError(_('Must be below 1.'))
        return value

    def validate_validation_fraction(self, value):
        if value >= 1:
            raise serializers.ValidationError(_('Must be below 1.'))
        return value

    def validate_test_fraction(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError(
                _('Must be strictly between 0 and 1.')
            )
        return value

    def validate(self, attrs):
        """Cross-field checks on the architecture."""
        if attrs['input_features'] < attrs['kernel_size']:
            raise serializers.ValidationError(
                {'kernel_size': _('Must not exceed input_features.')},
                code='architecture',
            )
        conv_steps = attrs['input_features'] - attrs['kernel_size'] + 1
        if conv_steps // attrs['pool_size'] < 1:
            raise serializers.ValidationError(
                {'pool_size': _('Leaves no timesteps after pooling.')},
                code='architecture',
            )
        return attrs
