"""INI-style run configuration.

Sections and keys::

    [engine]    any EngineConfig field, e.g. m_c = 50
    [envelope]  field = lo, hi  (TF_T2, CR, TIT, r_c1, dT_cool, Ma, H)
    [train]     any TrainConfig field, plus layers = 7,625,625,2,
                hidden_init = glorot|he, train_fraction = 0.2, split_seed = 0

Unknown sections or keys are errors, so typos fail loudly.
"""

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

from .engine import EngineConfig, Envelope
from .errors import FormatError
from .surrogate import TrainConfig

DEFAULT_LAYERS = (7, 625, 625, 2)


@dataclass(frozen=True)
class RunConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    envelope: Envelope = field(default_factory=Envelope)
    train: TrainConfig = field(default_factory=TrainConfig)
    layers: tuple = DEFAULT_LAYERS
    hidden_init: str = "glorot"
    train_fraction: float = 0.2
    split_seed: int = 0

    def to_dict(self):
        return {
            "engine": asdict(self.engine),
            "envelope": self.envelope.to_dict(),
            "train": asdict(self.train),
            "layers": list(self.layers),
            "hidden_init": self.hidden_init,
            "train_fraction": self.train_fraction,
            "split_seed": self.split_seed,
        }

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _coerce(kind, text, where):
    try:
        if kind is bool:
            return {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}[text.lower()]
        return kind(text)
    except (KeyError, ValueError):
        raise FormatError(f"{where}: cannot read {text!r} as {kind.__name__}") from None


def _dataclass_updates(cls, section, where):
    kinds = {f.name: type(f.default) for f in fields(cls)}
    out = {}
    for key, text in section.items():
        if key not in kinds:
            raise FormatError(f"{where}: unknown key {key!r}")
        out[key] = _coerce(kinds[key], text, f"{where}.{key}")
    return out


def _envelope_updates(section, where):
    names = set(Envelope.names())
    out = {}
    for key, text in section.items():
        if key not in names:
            raise FormatError(f"{where}: unknown field {key!r}")
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise FormatError(f"{where}.{key}: expected 'lo, hi', got {text!r}")
        out[key] = tuple(_coerce(float, p, f"{where}.{key}") for p in parts)
    return out


def parse_config(text, source="<config>", base=None):
    """Build a :class:`RunConfig` from INI text layered over ``base``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive field names
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise FormatError(f"{source}: {exc}") from None
    cfg = base or RunConfig()
    for name in cp.sections():
        sec = cp[name]
        where = f"{source}[{name}]"
        if name == "engine":
            cfg = replace(cfg, engine=replace(cfg.engine, **_dataclass_updates(EngineConfig, sec, where)))
        elif name == "envelope":
            cfg = replace(cfg, envelope=replace(cfg.envelope, **_envelope_updates(sec, where)))
        elif name == "train":
            extra = {}
            items = dict(sec)
            if "layers" in items:
                try:
                    extra["layers"] = tuple(int(v) for v in items.pop("layers").split(","))
                except ValueError:
                    raise FormatError(f"{where}.layers: expected comma-separated integers") from None
            if "hidden_init" in items:
                extra["hidden_init"] = items.pop("hidden_init").strip()
            if "train_fraction" in items:
                extra["train_fraction"] = _coerce(float, items.pop("train_fraction"), f"{where}.train_fraction")
            if "split_seed" in items:
                extra["split_seed"] = _coerce(int, items.pop("split_seed"), f"{where}.split_seed")
            try:
                train = replace(cfg.train, **_dataclass_updates(TrainConfig, items, where))
            except ValueError as exc:
                raise FormatError(f"{where}: {exc}") from None
            cfg = replace(cfg, train=train, **extra)
        else:
            raise FormatError(f"{source}: unknown section [{name}]")
    if cfg.hidden_init not in ("glorot", "he"):
        raise FormatError(f"{source}: hidden_init must be glorot or he")
    return cfg


def load_config(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path), base)
