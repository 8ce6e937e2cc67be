"""Command line front end: gen-data, train, eval, simulate, fit.

Exit codes: 0 success, 1 usage, 2 data/format error, 3 numeric/domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import dataset as ds
from .errors import AmbiguousRoot, DomainError, FormatError, GarchNetError, KindMismatch
from .fit import fit, solve_exact
from .mlp import DESK_HIDDEN, FULL_HIDDEN, MlpArchitecture, TrainConfig, load_model, save_model, train
from .moments import GarchParams
from .params import FeatureSetKind, sample_params
from .pathsim import DEFAULT_BURN_IN, GENERATOR, EmpiricalStats, estimate_stats, read_series_csv, simulate, write_series_csv

log = logging.getLogger("garchnet")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _kind(text: str) -> FeatureSetKind:
    try:
        return FeatureSetKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_provenance(path) -> dict:
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("# "):
        try:
            return json.loads(first[2:])
        except json.JSONDecodeError:
            return {}
    return {}


# -- commands ------------------------------------------------------------------


def cmd_gen_data(args) -> int:
    kind = args.kind
    config = {"command": "gen-data", "kind": str(kind), "count": args.count, "seed": args.seed, "alpha0_scale": args.alpha0_scale}
    params = sample_params(kind, args.count, args.seed, alpha0_scale=args.alpha0_scale)
    rows = ds.build_rows(params, kind)
    split = ds.split_40_40_20(rows, args.seed)
    scaler = ds.fit_scaler(split.train)
    ds.write_dataset_csv(args.out, rows, provenance=config)
    summary = {
        "run_config": config,
        "rows": len(rows),
        "split": {"train": len(split.train), "test": len(split.test), "validate": len(split.validate)},
        "scaler": scaler.to_dict(),
    }
    summary_path = args.summary or str(Path(args.out).with_suffix(".summary.json"))
    _write_json(summary_path, summary)
    print(f"wrote {len(rows)} rows ({len(split.train)}/{len(split.test)}/{len(split.validate)}) to {args.out}")
    return 0


def _resolve_split_seed(args) -> int:
    if args.split_seed is not None:
        return args.split_seed
    seed = _read_provenance(args.data).get("seed")
    if seed is None:
        raise FormatError("dataset records no seed; pass --split-seed", "provenance.seed")
    return int(seed)


def cmd_train(args) -> int:
    rows = ds.read_dataset_csv(args.data)
    kind = rows[0].kind
    split_seed = _resolve_split_seed(args)
    hidden = FULL_HIDDEN if args.full_scale else tuple(args.hidden)
    max_epochs = args.max_epochs if args.max_epochs is not None else (5000 if args.full_scale else 1000)
    arch = MlpArchitecture(3, hidden, 1)
    cfg = TrainConfig(
        learning_rate=args.lr,
        max_epochs=max_epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    split = ds.split_40_40_20(rows, split_seed)
    scaler = ds.fit_scaler(split.train)
    model, trace = train(arch, cfg, split, scaler, kind=kind, progress_every=args.progress)
    model.metadata["split_seed"] = split_seed
    model.metadata["dataset"] = Path(args.data).name
    save_model(model, args.model_out)
    trace_path = args.trace_out or str(Path(args.model_out).with_suffix(".trace.csv"))
    config = {"command": "train", "dataset": Path(args.data).name, "split_seed": split_seed, "hidden_dims": list(hidden), **asdict(cfg)}
    trace.to_csv(trace_path, provenance=config)
    best = trace.best_epoch
    print(f"best epoch {best} of {len(trace.validation_msd)}; validation MSD {trace.validation_msd[best - 1]:.6e} (scaled target)")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    rows = ds.read_dataset_csv(args.data)
    kind = rows[0].kind
    if model.kind != kind:
        raise KindMismatch(f"model was trained on kind {model.kind}, dataset is {kind}")
    split_seed = model.metadata.get("split_seed")
    if split_seed is None:
        raise FormatError("model records no split seed", "metadata.split_seed")
    test = ds.split_40_40_20(rows, int(split_seed)).test
    x, y = ds.rows_to_arrays(test)
    pred = model.predict(x)
    slope, intercept = np.polyfit(y, pred, 1)
    metrics = {
        "run_config": {"command": "eval", "model": Path(args.model).name, "dataset": Path(args.data).name, "split_seed": int(split_seed)},
        "kind": str(kind),
        "n_test": int(len(y)),
        "slope": float(slope),
        "intercept": float(intercept),
        "test_msd": float(np.mean((pred - y) ** 2)),
    }
    scatter = args.scatter_out or str(Path(args.metrics_out).with_suffix(".scatter.csv"))
    with open(scatter, "w") as fh:
        fh.write("# " + json.dumps(metrics["run_config"], sort_keys=True) + "\n")
        fh.write("actual,predicted\n")
        fh.writelines(f"{a:.17g},{p:.17g}\n" for a, p in zip(y, pred))
    _write_json(args.metrics_out, metrics)
    print(f"{kind}: slope {slope:.4f} intercept {intercept:+.4f} test MSD {metrics['test_msd']:.3e} (n={len(y)})")
    return 0


def cmd_simulate(args) -> int:
    p = GarchParams(args.alpha0, args.alpha1, args.beta1)
    config = {
        "command": "simulate",
        "alpha0": args.alpha0,
        "alpha1": args.alpha1,
        "beta1": args.beta1,
        "steps": args.steps,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "lags": args.lags,
        "generator": GENERATOR,
    }
    x = simulate(p, args.steps, args.burn_in, args.seed)
    if args.series_out:
        write_series_csv(args.series_out, x, provenance=config)
    stats = estimate_stats(x, args.lags)
    _write_json(args.stats_out, {**stats.to_dict(), "run_config": config})
    print(f"simulated {x.size} steps: E(x^2)={stats.second_moment:.6e} Gamma_4={stats.gamma4:.4f}")
    return 0


def _load_stats(args) -> EmpiricalStats:
    if args.stats:
        try:
            doc = json.loads(Path(args.stats).read_text())
        except OSError as exc:
            raise FormatError(f"cannot read stats ({exc})", args.stats) from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON ({exc.msg})", Path(args.stats).name) from exc
        if isinstance(doc, dict):
            doc = {k: v for k, v in doc.items() if k != "run_config"}
        return EmpiricalStats.from_dict(doc)
    return estimate_stats(read_series_csv(args.series), args.lags)


def cmd_fit(args) -> int:
    model = load_model(args.model)
    stats = _load_stats(args)
    result = fit(model, stats)
    doc = result.to_dict()
    doc["run_config"] = {
        "command": "fit",
        "model": Path(args.model).name,
        "source": Path(args.stats or args.series).name,
        "oracle": bool(args.oracle),
    }
    if args.oracle:
        try:
            q = solve_exact(stats, model.kind)
            doc.update(oracle_alpha0=q.alpha0, oracle_alpha1=q.alpha1, oracle_beta1=q.beta1)
        except AmbiguousRoot as exc:
            doc["oracle_candidates"] = [list(c.as_tuple()) for c in exc.candidates]
            doc["oracle_error"] = str(exc)
        except DomainError as exc:
            doc["oracle_error"] = f"{type(exc).__name__}: {exc}"
    _write_json(args.out, doc)
    p = result.params
    print(f"alpha0={p.alpha0:.6e} alpha1={p.alpha1:.6f} beta1={p.beta1:.6f}" + (" (clamped)" if result.clamped else ""))
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="garchnet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-data", help="sample parameters and write a feature dataset")
    g.add_argument("--kind", type=_kind, required=True, help="g6, g8, g10 or lagN")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--summary", help="summary JSON path (default: <out>.summary.json)")
    g.add_argument("--alpha0-scale", choices=("linear", "log"), default="linear")
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train the alpha1 network on a dataset")
    t.add_argument("--data", required=True)
    t.add_argument("--seed", type=int, required=True, help="weight init and mini-batch shuffling")
    t.add_argument("--split-seed", type=int, help="default: the seed recorded in the dataset")
    t.add_argument("--model-out", required=True)
    t.add_argument("--trace-out", help="default: <model-out>.trace.csv")
    t.add_argument("--hidden", type=_int_list, default=list(DESK_HIDDEN), help="comma-separated hidden layer sizes")
    t.add_argument("--full-scale", action="store_true", help="hidden 128,2048,2048,128 and 5000 epochs")
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--max-epochs", type=int)
    t.add_argument("--patience", type=int, default=100)
    t.add_argument("--batch-size", type=int, help="mini-batch size (default: full batch)")
    t.add_argument("--progress", type=int, default=0, help="log every N epochs")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score a model on the test partition")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--metrics-out", required=True)
    e.add_argument("--scatter-out", help="default: <metrics-out>.scatter.csv")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("simulate", help="simulate a GARCH(1,1) path and estimate its statistics")
    s.add_argument("--alpha0", type=float, required=True)
    s.add_argument("--alpha1", type=float, required=True)
    s.add_argument("--beta1", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--lags", type=_int_list, default=[1, 2, 6, 10])
    s.add_argument("--series-out")
    s.add_argument("--stats-out", required=True)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit GARCH parameters from statistics or a return series")
    f.add_argument("--model", required=True)
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--stats", help="stats JSON (as written by simulate)")
    src.add_argument("--series", help="single-column CSV of returns")
    f.add_argument("--lags", type=_int_list, default=[1, 2, 6, 10])
    f.add_argument("--out", required=True)
    f.add_argument("--oracle", action="store_true", help="also run the exact root-finding solver")
    f.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GarchNetError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error (I/O): {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
