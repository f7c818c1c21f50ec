"""Layer-by-layer shape and parameter-count table for a ModelConfig."""
from dataclasses import dataclass


@dataclass
class LayerRow:
    name: str
    output_shape: tuple
    params: int


def _lstm_count(input_size, units):
    return 2 * (4 * units * (input_size + units) + 4 * units)


def summarize_model(config):
    """Rows in forward order; output shapes exclude the batch axis."""
    config.validate()
    k, filters = config.kernel_size, config.conv_filters
    units = config.bilstm_units_per_direction
    state = config.state_width
    queries = config.query_count
    return [
        LayerRow('Input', (config.input_features, 1), 0),
        LayerRow('Conv1D', (config.conv_steps, filters),
                 k * filters + filters),
        LayerRow('MaxPooling1D', (config.pooled_steps, filters), 0),
        LayerRow('BiLSTM', (config.pooled_steps, state),
                 _lstm_count(filters, units)),
        LayerRow('Dropout', (config.pooled_steps, state), 0),
        LayerRow('Attention', (queries, state),
                 2 * config.attention_width * state + config.attention_width),
        LayerRow('BiLSTM', (queries, state), _lstm_count(state, units)),
        LayerRow('Concatenate', (config.combined_width,), 0),
        LayerRow('Dense', (config.dense_units,),
                 (config.combined_width + 1) * config.dense_units),
        LayerRow('Dropout', (config.dense_units,), 0),
        LayerRow('Dense', (config.num_classes,),
                 (config.dense_units + 1) * config.num_classes),
    ]


def render_summary(config):
    rows = summarize_model(config)
    lines = [f'{"Layer":<16}{"Output shape":<18}{"Params":>10}', '-' * 44]
    for row in rows:
        shape = ' x '.join(str(d) for d in row.output_shape)
        lines.append(f'{row.name:<16}{shape:<18}{row.params:>10,}')
    lines.append('-' * 44)
    lines.append(f'{"Total params":<34}{sum(r.params for r in rows):>10,}')
    lines.append(f'attention mode: {config.attention_mode}')
    return '\n'.join(lines) + '\n'
