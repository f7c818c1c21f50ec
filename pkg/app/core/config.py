"""
Run configuration: dataclass defaults, overridden by a YAML file, overridden
by command-line flags. The merged result is validated once, before any work.
"""
from dataclasses import asdict, dataclass, fields

import yaml
from django.conf import settings

from core.exceptions import ConfigError
from core.serializers import RunConfigSerializer
from network.model import ModelConfig
from network.training import TrainConfig


@dataclass
class RunConfig:
    seed: int = 0
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    test_fraction: float = 0.2
    validation_fraction: float = 0.1
    attention_mode: str = 'final'
    input_features: int = 57
    num_classes: int = 5
    conv_filters: int = 64
    kernel_size: int = 3
    pool_size: int = 2
    bilstm_units_per_direction: int = 32
    attention_width: int = 64
    dense_units: int = 250
    dropout_rate: float = 0.2
    out_dir: str = ''

    def model_config(self):
        names = {f.name for f in fields(ModelConfig)}
        return ModelConfig(
            **{k: v for k, v in asdict(self).items() if k in names}
        )

    def train_config(self):
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            validation_fraction=self.validation_fraction,
            seed=self.seed,
        )

    def to_yaml(self):
        return yaml.safe_dump(asdict(self), sort_keys=True,
                              default_flow_style=False)


def _read_config_file(path):
    try:
        with open(path) as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigError(f'{path}: not valid YAML: {exc}') from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'{path}: expected a mapping of config keys')
    return data


def _flatten_errors(errors):
    messages = []
    for key, value in errors.items():
        items = value if isinstance(value, list) else [value]
        messages.extend(f'{key}: {item}' for item in items)
    return '; '.join(messages)


def load_run_config(path=None, **overrides):
    """Merge defaults, the optional YAML file and non-None overrides."""
    merged = asdict(RunConfig(out_dir=str(settings.OUT_DIR)))
    if path:
        from_file = _read_config_file(path)
        unknown = sorted(set(from_file) - set(merged))
        if unknown:
            raise ConfigError(f'{path}: unknown config keys {unknown}')
        merged.update(from_file)
    merged.update({k: v for k, v in overrides.items() if v is not None})

    serializer = RunConfigSerializer(data=merged)
    if not serializer.is_valid():
        raise ConfigError(
            f'invalid configuration: {_flatten_errors(serializer.errors)}'
        )
    return RunConfig(**serializer.validated_data)
