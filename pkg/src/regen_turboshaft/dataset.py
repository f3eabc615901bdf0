"""Latin-hypercube design-space datasets: generation, scaling, splitting and CSV I/O."""

import collections
import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .engine import CycleInput, EngineConfig, Envelope, evaluate_many
from .errors import EnvelopeError, FormatError, NormalizationError

FORMAT_VERSION = 1
FEATURES = ("tf_t2", "cr", "tit_K", "rc1", "dt_cool_K", "mach", "alt_m")
TARGETS = ("eta_th", "mdot_nox_kgps")
COLUMNS = FEATURES + TARGETS
HEADER = COLUMNS + ("feasible",)
# CycleInput field for each feature column, in column order
FEATURE_FIELDS = Envelope.names()
VERSION_LINE = (
    f"# regen_turboshaft dataset v{FORMAT_VERSION}; "
    "feature order tf_t2,cr,tit_K,rc1,dt_cool_K,mach,alt_m; "
    "cr stands in for the turbine pressure-fraction input"
)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows of (features, targets, feasible). Arrays are read-only.

    Infeasible rows carry NaN targets and are dropped by :meth:`modeling`.
    """

    features: np.ndarray  # (n, 7)
    targets: np.ndarray  # (n, 2)
    feasible: np.ndarray  # (n,) bool

    def __post_init__(self):
        f = _frozen(self.features).reshape(-1, len(FEATURES))
        t = _frozen(self.targets).reshape(-1, len(TARGETS))
        ok = _frozen(self.feasible, bool).reshape(-1)
        if not (len(f) == len(t) == len(ok)):
            raise ValueError("features, targets and feasible flags differ in length")
        if not np.isfinite(t[ok]).all():
            raise ValueError("feasible rows must have finite targets")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "feasible", ok)

    def __len__(self):
        return len(self.feasible)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.features, other.features)
            and np.array_equal(self.targets, other.targets, equal_nan=True)
            and np.array_equal(self.feasible, other.feasible)
        )

    @property
    def table(self):
        """(n, 9) array of feature and target columns."""
        return np.hstack([self.features, self.targets])

    @classmethod
    def from_table(cls, table, feasible=None):
        table = np.asarray(table, dtype=float)
        if feasible is None:
            feasible = np.ones(len(table), dtype=bool)
        nf = len(FEATURES)
        return cls(table[:, :nf], table[:, nf:], feasible)

    def modeling(self):
        """Feasible rows only."""
        return Dataset(self.features[self.feasible], self.targets[self.feasible], self.feasible[self.feasible])

    def subset(self, idx):
        return Dataset(self.features[idx], self.targets[idx], self.feasible[idx])


def row_to_input(row):
    return CycleInput(**{name: float(v) for name, v in zip(FEATURE_FIELDS, row)})


def input_to_row(inp):
    return [getattr(inp, name) for name in FEATURE_FIELDS]


def generate_sweep(envelope=Envelope(), n_target=4899, seed=0, cfg=EngineConfig(), workers=1, max_attempt_factor=4):
    """Sample the envelope until ``n_target`` feasible points exist.

    Each batch is a fresh Latin hypercube drawn from a child of ``seed``.
    Stops with :class:`EnvelopeError` if the cumulative feasible yield drops
    below one half, or if ``max_attempt_factor * n_target`` attempts do not
    suffice. The returned dataset holds every attempt up to and including the
    ``n_target``-th feasible one.
    """
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    lo, hi = envelope.bounds()
    span = hi > lo
    cap = max_attempt_factor * n_target

    rows, targets, ok = [], [], []
    n_ok = 0
    reasons = collections.Counter()
    batch = 0
    while n_ok < n_target:
        if len(rows) >= cap:
            raise EnvelopeError(f"only {n_ok}/{n_target} feasible points after {len(rows)} attempts")
        size = min(max(n_target - n_ok, 16), cap - len(rows))
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(batch,)))
        sampler = qmc.LatinHypercube(d=int(span.sum()), seed=rng)
        X = np.tile(lo, (size, 1))
        X[:, span] = qmc.scale(sampler.random(size), lo[span], hi[span])
        batch += 1
        for x, p in zip(X, evaluate_many([row_to_input(x) for x in X], cfg, workers)):
            rows.append(x)
            if p.feasible:
                targets.append((p.eta_th, p.mdot_NOx))
                ok.append(True)
                n_ok += 1
            else:
                targets.append((math.nan, math.nan))
                ok.append(False)
                reasons[p.station] += 1
            if n_ok == n_target:
                break
        if n_ok < 0.5 * len(rows):
            detail = ", ".join(f"{k}: {v}" for k, v in reasons.most_common())
            raise EnvelopeError(
                f"feasible yield {n_ok}/{len(rows)} is below 50%; infeasible by station: {detail}"
            )
    return Dataset(np.array(rows), np.array(targets), np.array(ok))


@dataclass(frozen=True, eq=False)
class NormRecord:
    """Per-column minimum and maximum of the 9 feature and target columns."""

    mins: np.ndarray
    maxs: np.ndarray
    columns: tuple = COLUMNS

    def __post_init__(self):
        mins, maxs = _frozen(self.mins), _frozen(self.maxs)
        if mins.shape != (len(self.columns),) or maxs.shape != mins.shape:
            raise NormalizationError(f"NormRecord needs {len(self.columns)} minima and maxima")
        for name, a, b in zip(self.columns, mins, maxs):
            if not (b > a):
                raise NormalizationError(f"column {name!r} is constant; cannot min-max scale it")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)
        object.__setattr__(self, "columns", tuple(self.columns))

    def __eq__(self, other):
        return (
            isinstance(other, NormRecord)
            and self.columns == other.columns
            and np.array_equal(self.mins, other.mins)
            and np.array_equal(self.maxs, other.maxs)
        )

    @property
    def span(self):
        return self.maxs - self.mins

    def scale_features(self, X):
        nf = len(FEATURES)
        return (np.asarray(X, float) - self.mins[:nf]) / self.span[:nf]

    def scale_targets(self, Y):
        nf = len(FEATURES)
        return (np.asarray(Y, float) - self.mins[nf:]) / self.span[nf:]

    def unscale_targets(self, Y01):
        nf = len(FEATURES)
        return np.asarray(Y01, float) * self.span[nf:] + self.mins[nf:]


def fit_norm(values, columns=COLUMNS):
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(columns) or len(values) == 0:
        raise NormalizationError(f"expected a non-empty (n, {len(columns)}) table")
    return NormRecord(values.min(axis=0), values.max(axis=0), columns)


def normalize(dataset):
    """Min-max scale the feasible rows of ``dataset`` to [0, 1]; returns (dataset01, NormRecord)."""
    data = dataset.modeling()
    rec = fit_norm(data.table)
    scaled = (data.table - rec.mins) / rec.span
    return Dataset.from_table(scaled), rec


def denormalize(dataset01, rec):
    return Dataset.from_table(dataset01.table * rec.span + rec.mins, dataset01.feasible)


def split(dataset, train_fraction=0.2, seed=0):
    """Seeded shuffle then partition; the training part has round-half-up(fraction * N) rows."""
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(dataset)
    n_train = int(math.floor(train_fraction * n + 0.5))
    if n_train == 0 or n_train == n:
        raise ValueError(f"split of {n} rows at {train_fraction} leaves an empty partition")
    perm = np.random.default_rng(seed).permutation(n)
    return dataset.subset(np.sort(perm[:n_train])), dataset.subset(np.sort(perm[n_train:]))


def split_indices(n, train_fraction=0.2, seed=0):
    """Index form of :func:`split` (same partition for the same arguments)."""
    n_train = int(math.floor(train_fraction * n + 0.5))
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def _fmt(v):
    return repr(float(v))


def dumps_csv(dataset):
    buf = io.StringIO()
    buf.write(VERSION_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for f, t, ok in zip(dataset.features, dataset.targets, dataset.feasible):
        w.writerow([_fmt(v) for v in f] + [_fmt(v) for v in t] + [int(ok)])
    return buf.getvalue()


def write_csv(dataset, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dumps_csv(dataset))


def loads_csv(text, source="<string>"):
    header_seen = False
    rows, flags = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            if line.startswith("# regen_turboshaft dataset v"):
                version = line.split(" v", 1)[1].split(";", 1)[0]
                if version != str(FORMAT_VERSION):
                    raise FormatError(f"{source}:{lineno}: dataset version {version}, expected {FORMAT_VERSION}")
            continue
        cells = next(csv.reader([line]))
        if not header_seen:
            if tuple(c.strip() for c in cells) != HEADER:
                raise FormatError(f"{source}:{lineno}: header {','.join(cells)!r} does not match {','.join(HEADER)!r}")
            header_seen = True
            continue
        if len(cells) != len(HEADER):
            raise FormatError(f"{source}:{lineno}: expected {len(HEADER)} columns, found {len(cells)}")
        try:
            values = [float(c) for c in cells[:-1]]
        except ValueError as exc:
            raise FormatError(f"{source}:{lineno}: {exc}") from None
        if cells[-1].strip() not in ("0", "1"):
            raise FormatError(f"{source}:{lineno}: feasible flag must be 0 or 1, got {cells[-1]!r}")
        ok = cells[-1].strip() == "1"
        if ok and not all(math.isfinite(v) for v in values):
            raise FormatError(f"{source}:{lineno}: feasible row has a non-finite value")
        rows.append(values)
        flags.append(ok)
    if not header_seen:
        raise FormatError(f"{source}:1: empty file or missing header")
    table = np.array(rows, dtype=float).reshape(-1, len(COLUMNS))
    return Dataset.from_table(table, np.array(flags, dtype=bool))


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return loads_csv(fh.read(), str(path))
