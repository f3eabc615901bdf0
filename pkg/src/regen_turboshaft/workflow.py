"""Dataset-to-metrics pipeline shared by the command line and the test suite."""

from dataclasses import dataclass

import numpy as np

from .dataset import COLUMNS, TARGETS, split_indices
from .errors import FormatError
from .metrics import build_report
from .surrogate import MlpModel, TrainHistory, build_network, forward, train


@dataclass
class FitResult:
    model: MlpModel
    norm: object
    history: TrainHistory
    train_idx: np.ndarray
    test_idx: np.ndarray


def partition(dataset, train_fraction, split_seed):
    """Indices into ``dataset.modeling()`` for the train and test parts."""
    return split_indices(len(dataset.modeling()), train_fraction, split_seed)


def fit_surrogate(dataset, norm, layers, train_cfg, train_fraction=0.2, split_seed=0, hidden_init="glorot",
                  callback=None):
    """Scale with ``norm``, split, build and train a network; the test part doubles as validation."""
    data = dataset.modeling()
    X, Y = norm.scale_features(data.features), norm.scale_targets(data.targets)
    tr, te = partition(dataset, train_fraction, split_seed)
    model = build_network(layers, seed=train_cfg.seed, hidden_init=hidden_init)
    model, hist = train(model, (X[tr], Y[tr]), (X[te], Y[te]), train_cfg, callback)
    return FitResult(model, norm, hist, tr, te)


def evaluate_surrogate(model, norm, dataset, train_fraction=0.2, split_seed=0):
    """Metrics on both partitions, computed in target units."""
    if tuple(norm.columns) != COLUMNS:
        raise FormatError(f"model was trained on columns {','.join(norm.columns)}, dataset has {','.join(COLUMNS)}")
    data = dataset.modeling()
    pred = norm.unscale_targets(forward(model, norm.scale_features(data.features)))
    tr, te = partition(dataset, train_fraction, split_seed)
    return build_report(
        {"train": (pred[tr], data.targets[tr]), "test": (pred[te], data.targets[te])},
        TARGETS,
    )
