"""Per-epoch loss/accuracy curve data as CSV."""
import pandas as pd

from core.exceptions import DataError
from network.training import TrainHistory
from tapping.dataset import atomic_write


CURVE_COLUMNS = ['epoch', 'train_loss', 'train_acc', 'val_loss', 'val_acc']


def emit_curves(history, path):
    """One row per epoch; NaN validation values are written empty."""
    if len(history) == 0:
        raise DataError('training history is empty')
    frame = pd.DataFrame({
        'epoch': range(1, len(history) + 1),
        'train_loss': history.train_loss,
        'train_acc': history.train_accuracy,
        'val_loss': history.val_loss,
        'val_acc': history.val_accuracy,
    }, columns=CURVE_COLUMNS)
    atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False))
    return path


def read_curves(path):
    try:
        frame = pd.read_csv(path)
    except ValueError as exc:
        raise DataError(f'{path}: not a readable CSV file: {exc}')
    missing = [c for c in CURVE_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f'{path}: missing curve columns {missing}')
    history = TrainHistory()
    for row in frame.itertuples(index=False):
        history.append(row.train_loss, row.train_acc, row.val_loss,
                       row.val_acc)
    return history
