"""Regression error metrics reported per target column."""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ColumnMetrics:
    MSE: float
    MAE: float
    RMSD: float
    R: float
    R2: float  # R squared
    R2_det: float  # 1 - SS_res / SS_tot, kept for comparison


def column_metrics(pred, truth):
    pred, truth = np.asarray(pred, dtype=float), np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"expected equal-length vectors, got {pred.shape} and {truth.shape}")
    if len(truth) < 2:
        raise ValueError("at least two samples are needed")
    err = pred - truth
    # MSE is defined through RMSD so that RMSD**2 == MSE holds bit-exactly.
    rmsd = math.sqrt(float(np.mean(err * err)))
    mse = rmsd * rmsd
    mae = float(np.mean(np.abs(err)))
    dt = truth - truth.mean()
    dp = pred - pred.mean()
    sst = float(np.sum(dt * dt))
    ssp = float(np.sum(dp * dp))
    if sst == 0.0:
        raise DomainError("truth has zero variance; R is undefined")
    if ssp == 0.0:
        raise DomainError("prediction has zero variance; R is undefined")
    r = float(np.sum(dt * dp)) / math.sqrt(sst * ssp)
    r = min(1.0, max(-1.0, r))
    r2_det = 1.0 - float(np.sum(err * err)) / sst
    return ColumnMetrics(mse, mae, rmsd, r, r * r, r2_det)


@dataclass(frozen=True)
class MetricsReport:
    """Metrics keyed by ``(partition, target)``, e.g. ``("test", "eta_th")``."""

    entries: tuple  # ((partition, target, ColumnMetrics), ...)

    def get(self, partition, target):
        for p, t, m in self.entries:
            if (p, t) == (partition, target):
                return m
        raise KeyError((partition, target))

    def to_dict(self):
        return {f"{p}/{t}": asdict(m) for p, t, m in self.entries}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_table(self):
        """Metrics as rows and (partition, target) pairs as columns."""
        heads = [f"{p}:{t}" for p, t, _ in self.entries]
        width = max(14, *(len(h) for h in heads))
        lines = ["metric".ljust(8) + "".join(h.rjust(width + 2) for h in heads)]
        for name in ("MSE", "MAE", "RMSD", "R", "R2", "R2_det"):
            vals = [getattr(m, name) for _, _, m in self.entries]
            lines.append(name.ljust(8) + "".join(f"{v:.6e}".rjust(width + 2) for v in vals))
        return "\n".join(lines) + "\n"


def metrics(pred, truth, names):
    """Per-column metrics of 2-D ``pred`` against ``truth``."""
    pred, truth = np.atleast_2d(pred), np.atleast_2d(truth)
    if pred.shape != truth.shape or pred.shape[1] != len(names):
        raise ValueError("prediction, truth and names disagree in shape")
    return {n: column_metrics(pred[:, j], truth[:, j]) for j, n in enumerate(names)}


def build_report(parts, names):
    """``parts`` maps partition name to ``(pred, truth)`` in target units."""
    entries = []
    for part, (pred, truth) in parts.items():
        for name, m in metrics(pred, truth, names).items():
            entries.append((part, name, m))
    return MetricsReport(tuple(entries))
