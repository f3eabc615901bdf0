"""Command-line entry point: ``regen-turboshaft <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible or flagged
result, 3 solver or training failure.
"""

import argparse
import csv
import datetime
import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config, parse_config
from .dataset import FEATURE_FIELDS, FEATURES, TARGETS, dumps_csv, fit_norm, read_csv, row_to_input
from .engine import AXES, REFERENCE_POINT, evaluate_cycle, trend_study
from .errors import (
    DomainError,
    EnvelopeError,
    FormatError,
    InfeasibleError,
    IntegrationError,
    SolverError,
    TrainingDivergedError,
)
from .surrogate import dumps_model, load_model, predict
from .workflow import evaluate_surrogate, fit_surrogate

EXIT_OK, EXIT_USAGE, EXIT_FLAGGED, EXIT_FAILURE = 0, 1, 2, 3

TREND_COLUMNS = ("P_out", "PSFC", "eta_th", "mdot_NO", "mdot_NO2", "mdot_NOx", "W_net1", "W_net2", "m_a", "m_f")


class UsageError(Exception):
    pass


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(path, command, cfg, seeds, inputs, outputs, started):
    manifest = {
        "tool": "regen_turboshaft",
        "version": __version__,
        "command": command,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "seeds": seeds,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
        "started": started,
        "finished": _now(),
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _out_path(args, given, default_name):
    if given:
        return Path(given)
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / default_name


def _run_config(args):
    return load_config(args.config) if args.config else RunConfig()


def _parse_values(values, where):
    try:
        nums = [float(v) for v in values]
    except ValueError:
        raise UsageError(f"{where}: expected numbers, got {' '.join(values)}") from None
    if len(nums) != len(FEATURES):
        raise UsageError(f"{where}: expected {len(FEATURES)} values ({','.join(FEATURES)}), got {len(nums)}")
    return nums


def _read_input_file(path):
    """Either one line of 7 numbers or ``name = value`` lines keyed by feature column names."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines and all("=" in ln for ln in lines):
        kv = {}
        for ln in lines:
            k, v = (s.strip() for s in ln.split("=", 1))
            if k not in FEATURES:
                raise UsageError(f"{path}: unknown input {k!r}; expected {','.join(FEATURES)}")
            kv[k] = v
        missing = [f for f in FEATURES if f not in kv]
        if missing:
            raise UsageError(f"{path}: missing {','.join(missing)}")
        return _parse_values([kv[f] for f in FEATURES], str(path))
    if len(lines) != 1:
        raise UsageError(f"{path}: expected one line of {len(FEATURES)} values")
    return _parse_values(lines[0].replace(",", " ").split(), str(path))


def _cycle_input(args):
    if args.input and args.input_file:
        raise UsageError("give --input or --input-file, not both")
    if args.input:
        return row_to_input(_parse_values(args.input, "--input"))
    if args.input_file:
        return row_to_input(_read_input_file(args.input_file))
    return REFERENCE_POINT


def cmd_simulate(args, out):
    cfg = _run_config(args)
    inp = _cycle_input(args)
    if not args.no_envelope_check:
        cfg.envelope.check(inp)
    try:
        p = evaluate_cycle(inp, cfg.engine)
    except InfeasibleError as exc:
        if args.json:
            out.write(json.dumps({"feasible": False, "station": exc.station, "reason": str(exc)}) + "\n")
        else:
            out.write(f"feasible: no\nstation: {exc.station}\nreason: {exc}\n")
        return EXIT_FLAGGED
    if args.json:
        doc = {
            "feasible": True,
            "inputs": {f: getattr(inp, f) for f in FEATURE_FIELDS},
            **{k: getattr(p, k) for k in TREND_COLUMNS + ("PSFC_raw", "Q_h", "Q1", "Q2", "Q3", "phi")},
            "W_pf": p.accessory.W_pf,
            "stations": [{"station": n, "T_K": T, "P_kPa": P} for n, T, P in p.station_table()],
            "flags": list(p.flags),
        }
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    rows = [
        ("P_out", p.P_out, "kW"),
        ("W_net1", p.W_net1, "kW"),
        ("W_net2", p.W_net2, "kW"),
        ("W_pf", p.accessory.W_pf, "kW"),
        ("PSFC", p.PSFC, "kg/kWh"),
        ("eta_th", p.eta_th, "-"),
        ("Q_h", p.Q_h, "kW"),
        ("Q1", p.Q1, "kW"),
        ("Q2", p.Q2, "kW"),
        ("Q3", p.Q3, "kW"),
        ("m_a", p.m_a, "kg/s"),
        ("m_f", p.m_f, "kg/s"),
        ("phi", p.phi, "-"),
        ("mdot_NO", p.mdot_NO, "kg/s"),
        ("mdot_NO2", p.mdot_NO2, "kg/s"),
        ("mdot_NOx", p.mdot_NOx, "kg/s"),
    ]
    out.write("feasible: yes\n")
    for name, v, unit in rows:
        out.write(f"{name:<10}{v:>16.6g}  {unit}\n")
    out.write("\nstation        T [K]      P [kPa]\n")
    for name, T, P in p.station_table():
        out.write(f"{name:<8}{T:>12.3f}{P:>13.3f}\n")
    out.write(f"\nflags: {', '.join(p.flags) if p.flags else 'none'}\n")
    return EXIT_OK


def _monotone(values, direction):
    d = np.diff(values)
    return bool(np.all(d > 0)) if direction == "up" else bool(np.all(d < 0))


def cmd_trends(args, out):
    cfg = _run_config(args)
    name = AXES.get(args.axis, args.axis)
    if name not in FEATURE_FIELDS:
        raise UsageError(f"unknown axis {args.axis!r}; choose from {', '.join(AXES)}")
    if args.metric not in TREND_COLUMNS:
        raise UsageError(f"unknown metric {args.metric!r}; choose from {', '.join(TREND_COLUMNS)}")
    if args.range:
        try:
            lo, hi = (float(v) for v in args.range.split(","))
        except ValueError:
            raise UsageError(f"--range must be 'lo,hi', got {args.range!r}") from None
    else:
        lo, hi = dict(cfg.envelope.items())[name]
    base = _cycle_input(args)
    values, points = trend_study(name, lo, hi, args.n, base, cfg.engine, workers=args.threads)
    buf = [[args.axis, "feasible", *TREND_COLUMNS, "station"]]
    for v, p in zip(values, points):
        if p.feasible:
            buf.append([repr(float(v)), 1, *(repr(float(getattr(p, c))) for c in TREND_COLUMNS), ""])
        else:
            buf.append([repr(float(v)), 0, *(["nan"] * len(TREND_COLUMNS)), p.station])
    target = open(args.out, "w", newline="", encoding="utf-8") if args.out else out
    try:
        csv.writer(target, lineterminator="\n").writerows(buf)
    finally:
        if args.out:
            target.close()
    if args.assert_monotone:
        if not all(p.feasible for p in points):
            sys.stderr.write("trend contains infeasible points\n")
            return EXIT_FLAGGED
        series = [getattr(p, args.metric) for p in points]
        if not _monotone(series, args.assert_monotone):
            trend = "increasing" if args.assert_monotone == "up" else "decreasing"
            sys.stderr.write(f"{args.metric} is not strictly {trend} along {args.axis}\n")
            return EXIT_FLAGGED
    return EXIT_OK


def cmd_sweep(args, out):
    from .dataset import generate_sweep

    started = _now()
    cfg = _run_config(args)
    if args.envelope:
        text = Path(args.envelope).read_text(encoding="utf-8")
        if "[envelope]" not in text:
            text = "[envelope]\n" + text
        cfg = parse_config(text, args.envelope, cfg)
    seed = args.seed if args.seed is not None else 0
    ds = generate_sweep(cfg.envelope, args.n, seed, cfg.engine, workers=args.threads)
    path = _out_path(args, args.out, "dataset.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dumps_csv(ds))
    manifest = path.with_name(path.name + ".manifest.json")
    inputs = [p for p in (args.config, args.envelope) if p]
    _write_manifest(manifest, "sweep", cfg, {"sweep": seed}, inputs, [path], started)
    n_ok = int(ds.feasible.sum())
    out.write(f"wrote {path} ({n_ok} feasible of {len(ds)} attempts)\n")
    return EXIT_OK


def _train_manifest_path(model_path):
    return Path(model_path).with_name(Path(model_path).name + ".manifest.json")


def cmd_train(args, out):
    started = _now()
    cfg = _run_config(args)
    updates = {}
    if args.epochs is not None:
        updates["epochs"] = args.epochs
    if args.lr is not None:
        updates["lr"] = args.lr
    if args.seed is not None:
        updates["seed"] = args.seed
    if updates:
        cfg = replace(cfg, train=replace(cfg.train, **updates))
    if args.layers:
        cfg = replace(cfg, layers=tuple(int(v) for v in args.layers.split(",")))
    if args.train_fraction is not None:
        cfg = replace(cfg, train_fraction=args.train_fraction)
    if args.split_seed is not None:
        cfg = replace(cfg, split_seed=args.split_seed)
    if cfg.layers[0] != len(FEATURES) or cfg.layers[-1] != len(TARGETS):
        raise UsageError(f"network must map {len(FEATURES)} inputs to {len(TARGETS)} outputs")

    ds = read_csv(args.data)
    norm = fit_norm(ds.modeling().table)

    def report(epoch, tr, va):
        if args.verbose and (epoch == 1 or epoch % 25 == 0):
            out.write(f"epoch {epoch:4d}  train {tr:.4e}  val {va:.4e}\n")
            out.flush()

    fit = fit_surrogate(ds, norm, cfg.layers, cfg.train, cfg.train_fraction, cfg.split_seed, cfg.hidden_init, report)
    model_path = _out_path(args, args.out, "model.bin")
    model_path.parent.mkdir(parents=True, exist_ok=True)
    model_path.write_bytes(dumps_model(fit.model, norm))
    loss_path = model_path.with_name(model_path.name + ".loss.csv")
    loss_path.write_text(fit.history.to_csv(), encoding="utf-8")
    _write_manifest(
        _train_manifest_path(model_path),
        "train",
        cfg,
        {"init_and_shuffle": cfg.train.seed, "split": cfg.split_seed},
        [args.data] + ([args.config] if args.config else []),
        [model_path, loss_path],
        started,
    )
    out.write(
        f"wrote {model_path} after {len(fit.history.train_loss)} epochs "
        f"(best validation loss {min(fit.history.val_loss):.4e} at epoch {fit.history.best_epoch})\n"
    )
    return EXIT_OK


def _split_settings(args):
    """Split fraction and seed: flags win, then the training manifest, then defaults."""
    fraction, seed = 0.2, 0
    mpath = _train_manifest_path(args.model)
    if mpath.exists():
        doc = json.loads(mpath.read_text(encoding="utf-8"))
        fraction = doc["config"]["train_fraction"]
        seed = doc["config"]["split_seed"]
    if args.train_fraction is not None:
        fraction = args.train_fraction
    if args.split_seed is not None:
        seed = args.split_seed
    return fraction, seed


def cmd_eval(args, out):
    model, norm = load_model(args.model)
    ds = read_csv(args.data)
    fraction, seed = _split_settings(args)
    rep = evaluate_surrogate(model, norm, ds, fraction, seed)
    if args.out:
        Path(args.out).write_text(rep.to_json(), encoding="utf-8")
    out.write(rep.to_table())
    return EXIT_OK


def cmd_predict(args, out):
    model, norm = load_model(args.model)
    if model.layer_sizes[0] != len(FEATURES):
        raise FormatError(f"model expects {model.layer_sizes[0]} inputs, not {len(FEATURES)}")
    if args.input_file:
        x = _read_input_file(args.input_file)
    elif args.input:
        x = _parse_values(args.input, "--input")
    else:
        raise UsageError("give --input or --input-file")
    y = predict(model, norm, np.array([x]))[0]
    for name, v in zip(TARGETS, y):
        out.write(f"{name} {float(v)!r}\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--seed", type=int, help="random seed for the command")
    common.add_argument("--threads", type=int, default=1, help="worker processes for cycle sweeps")
    common.add_argument("--out-dir", help="directory for default output names")

    p = argparse.ArgumentParser(prog="regen-turboshaft", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_inputs(sp):
        sp.add_argument("--input", nargs="+", metavar="V", help=f"design point: {' '.join(FEATURES)}")
        sp.add_argument("--input-file", help="file holding the design point")

    s = sub.add_parser("simulate", parents=[common], help="evaluate one design point")
    add_inputs(s)
    s.add_argument("--json", action="store_true")
    s.add_argument("--no-envelope-check", action="store_true", help="skip the configured envelope check")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("trends", parents=[common], help="one-axis sweep as CSV")
    s.add_argument("--axis", required=True, help=f"one of {', '.join(AXES)}")
    s.add_argument("--range", help="lo,hi (defaults to the envelope)")
    s.add_argument("--n", type=int, default=11)
    s.add_argument("--metric", default="P_out", help="column checked by --assert-monotone")
    s.add_argument("--assert-monotone", choices=("up", "down"))
    s.add_argument("--out")
    add_inputs(s)
    s.set_defaults(func=cmd_trends)

    s = sub.add_parser("sweep", parents=[common], help="generate a Latin-hypercube dataset")
    s.add_argument("--n", type=int, default=4899)
    s.add_argument("--envelope", help="file with 'field = lo, hi' lines")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("train", parents=[common], help="train the surrogate on a dataset CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--out")
    s.add_argument("--epochs", type=int)
    s.add_argument("--lr", type=float)
    s.add_argument("--layers", help="comma-separated sizes, e.g. 7,625,625,2")
    s.add_argument("--train-fraction", type=float)
    s.add_argument("--split-seed", type=int)
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", parents=[common], help="metrics on train and test partitions")
    s.add_argument("--data", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--out", help="write the report as JSON")
    s.add_argument("--train-fraction", type=float)
    s.add_argument("--split-seed", type=int)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("predict", parents=[common], help="surrogate prediction for one design point")
    s.add_argument("--model", required=True)
    add_inputs(s)
    s.set_defaults(func=cmd_predict)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args, out)
    except (SolverError, TrainingDivergedError, IntegrationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_FLAGGED
    except (UsageError, FormatError, DomainError, EnvelopeError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
