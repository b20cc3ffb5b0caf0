"""Command-line pipeline: generate, discover, train, predict, eval, qini.

Every run resolves its full configuration (defaults expanded), derives a
stable hash from it, and stamps tool version plus hash into each output
file, so re-running a command with the same inputs is byte-identical.
Exit codes: 0 success, 2 input/validation error, 3 statistical degeneracy
(an empty treatment arm), 1 internal error.

``CAUSALUPLIFT_CONFIG_DIR`` may point to a directory whose ``defaults.json``
maps subcommand names to flag defaults.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import traceback

import numpy as np

from . import __version__
from .classify import (
    ClassifierSpec,
    load_model,
    predict_cctm,
    save_model,
    train_cctm,
)
from .data import Dataset, write_schema
from .datagen import (
    GroundTruth,
    SynthConfig,
    dataset_from_codes,
    generate_group,
    sample,
    sample_with_ground_truth,
)
from .bif import parse_bif
from .discovery import DiscoveryConfig, discover_parents
from .errors import CausalUpliftError, EmptyArm
from .evaluation import causal_accuracy, kfold_split, qini_coefficient, qini_curve


def _config_hash(config):
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _tool_block(config):
    return {
        "name": "causaluplift",
        "version": __version__,
        "config_hash": _config_hash(config),
        "config": config,
    }


def _meta_line(config):
    return f"causaluplift={__version__} config={_config_hash(config)}"


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _load_dataset(args):
    schema = args.schema
    if schema is None:
        schema = os.path.join(os.path.dirname(os.path.abspath(args.data)), "schema.json")
    return Dataset.read_csv(args.data, schema)


def _classifier_spec(args):
    hp = {}
    if args.classifier == "forest":
        hp["seed"] = args.seed
        if args.n_trees is not None:
            hp["n_trees"] = args.n_trees
        if args.max_depth is not None:
            hp["max_depth"] = args.max_depth
        if args.min_leaf is not None:
            hp["min_leaf"] = args.min_leaf
        if args.feature_subsample is not None:
            hp["feature_subsample"] = args.feature_subsample
    else:
        if args.max_iterations is not None:
            hp["max_iterations"] = args.max_iterations
        if args.l2_penalty is not None:
            hp["l2_penalty"] = args.l2_penalty
    return ClassifierSpec(args.classifier, hp)


def _discovery_config(args):
    return DiscoveryConfig(
        alpha=args.alpha,
        max_cond_size=args.max_cond_size,
        symmetric=not args.no_symmetric,
    )


# ---------------------------------------------------------------- generate


def cmd_generate(args):
    os.makedirs(args.out, exist_ok=True)
    if args.bif:
        with open(args.bif, "r", encoding="utf-8") as fh:
            net = parse_bif(fh.read())
        if args.treatment and args.outcome:
            rng = np.random.default_rng(args.seed)
            codes, truth = sample_with_ground_truth(
                net, args.treatment, args.outcome, args.samples, rng
            )
            dataset = dataset_from_codes(
                net, codes, {args.treatment: "treatment", args.outcome: "outcome"}
            )
        else:
            dataset = sample(net, args.samples, args.seed)
            truth = None
        config = {
            "command": "generate",
            "bif": os.path.basename(args.bif),
            "samples": args.samples,
            "seed": args.seed,
            "split": args.split,
        }
    else:
        cfg = SynthConfig(
            group=args.group,
            seed=args.seed,
            n_samples=args.samples,
            n_noise_vars=args.noise_vars,
            continuous_fraction=args.continuous_fraction,
        )
        dataset, truth, net = generate_group(cfg)
        config = {
            "command": "generate",
            "group": cfg.group,
            "samples": cfg.n_samples,
            "noise_vars": cfg.n_noise_vars,
            "continuous_fraction": cfg.continuous_fraction,
            "seed": cfg.seed,
            "split": args.split,
        }

    meta = _meta_line(config)
    dataset.write_csv(os.path.join(args.out, "data.csv"), meta=meta)
    write_schema(
        os.path.join(args.out, "schema.json"), dataset, extra={"tool": _tool_block(config)}
    )
    with open(os.path.join(args.out, "net.json"), "w", encoding="utf-8") as fh:
        fh.write(net.to_json())
    if truth is not None:
        truth.write_csv(os.path.join(args.out, "ground_truth.csv"), meta=meta)

    if args.split is not None:
        if not 0.0 < args.split < 1.0:
            raise ValueError("--split must be in (0, 1)")
        rng = np.random.default_rng([args.seed, 1])
        perm = rng.permutation(dataset.n_rows)
        n_train = int(round(args.split * dataset.n_rows))
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])
        dataset.take(train_idx).write_csv(os.path.join(args.out, "train.csv"), meta=meta)
        dataset.take(test_idx).write_csv(os.path.join(args.out, "test.csv"), meta=meta)
        if truth is not None:
            truth.take(train_idx).write_csv(
                os.path.join(args.out, "train_truth.csv"), meta=meta
            )
            truth.take(test_idx).write_csv(
                os.path.join(args.out, "test_truth.csv"), meta=meta
            )
    print(f"wrote {dataset.n_rows} rows x {len(dataset.columns)} columns to {args.out}")
    return 0


# ---------------------------------------------------------------- discover


def cmd_discover(args):
    from .stats import discretize_dataset

    data = _load_dataset(args)
    cfg = _discovery_config(args)
    config = {
        "command": "discover",
        "target": args.target,
        "alpha": cfg.alpha,
        "max_cond_size": cfg.max_cond_size,
        "symmetric": cfg.symmetric,
        "bins": args.bins,
    }
    found = discover_parents(discretize_dataset(data, args.bins), args.target, cfg)
    payload = {
        "tool": _tool_block(config),
        "target": found.target,
        "members": list(found.members),
        "n_tests": len(found.trace),
    }
    if args.explain:
        payload["trace"] = [r.to_dict() for r in found.trace]
    if args.out:
        _write_json(args.out, payload)
    print(json.dumps({"target": found.target, "members": list(found.members)}))
    return 0


# ---------------------------------------------------------------- train


def cmd_train(args):
    data = _load_dataset(args)
    spec = _classifier_spec(args)
    cfg = _discovery_config(args)
    parents = args.parents.split(",") if args.parents else None
    config = {
        "command": "train",
        "treatment": args.treatment,
        "outcome": args.outcome,
        "classifier": spec.kind,
        "hyperparameters": spec.resolved(),
        "parents": parents,
        "alpha": cfg.alpha,
        "max_cond_size": cfg.max_cond_size,
        "symmetric": cfg.symmetric,
        "bins": args.bins,
    }
    pair = train_cctm(
        data,
        args.treatment,
        args.outcome,
        parents=parents,
        spec=spec,
        cfg=cfg,
        bins=args.bins,
    )
    save_model(pair, args.out, extra={"tool": _tool_block(config)})
    print(
        json.dumps(
            {
                "model": args.out,
                "parents_excl_t": pair.parents_excl_t,
                "n_treated": pair.metadata["n_treated"],
                "n_control": pair.metadata["n_control"],
            }
        )
    )
    return 0


# ---------------------------------------------------------------- predict


def cmd_predict(args):
    data = _load_dataset(args)
    pair = load_model(args.model)
    preds = predict_cctm(pair, data, theta=args.theta)
    config = {
        "command": "predict",
        "model": os.path.basename(args.model),
        "theta": args.theta,
    }
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {_meta_line(config)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", "p1", "p0", "effect", "assign"])
        for i, p in enumerate(preds):
            writer.writerow([i, repr(p.p1), repr(p.p0), repr(p.effect), p.assign])
    print(f"wrote {len(preds)} predictions to {args.out}")
    return 0


def read_predictions(path):
    """Load a predictions CSV back into (p1, p0, effect, assign) arrays."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh.read().splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    p1, p0, effect, assign = [], [], [], []
    for row in reader:
        p1.append(float(row["p1"]))
        p0.append(float(row["p0"]))
        effect.append(float(row["effect"]))
        assign.append(int(row["assign"]))
    return (
        np.array(p1),
        np.array(p0),
        np.array(effect),
        np.array(assign, dtype=np.int64),
    )


# ---------------------------------------------------------------- eval


def cmd_eval(args):
    p1, p0, effect, assign = read_predictions(args.predictions)
    if args.ground_truth is None and args.data is None:
        raise ValueError("eval needs --ground-truth or --data")
    config = {
        "command": "eval",
        "predictions": os.path.basename(args.predictions),
        "theta": args.theta,
        "points": args.points,
    }
    payload = {"tool": _tool_block(config), "n_rows": int(effect.shape[0])}
    if args.ground_truth is not None:
        truth = GroundTruth.read_csv(args.ground_truth)
        payload["causal_accuracy"] = causal_accuracy(assign, truth, theta=args.theta)
        payload["theta"] = args.theta
    if args.data is not None:
        data = _load_dataset(args)
        outcomes = data.values(args.outcome)
        treatments = data.values(args.treatment)
        curve = qini_curve(effect, outcomes, treatments, n_points=args.points)
        payload["qini_coefficient"] = qini_coefficient(outcomes, treatments)
        payload["coefficient_area"] = curve.coefficient_area
        payload["curve"] = [[f, u] for f, u in curve.points]
        if args.curve_out:
            _write_curve_csv(args.curve_out, curve.points, config)
    if args.out:
        _write_json(args.out, payload)
    summary = {k: v for k, v in payload.items() if k in ("causal_accuracy", "qini_coefficient", "coefficient_area")}
    print(json.dumps(summary))
    return 0


def _write_curve_csv(path, points, config, fold=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {_meta_line(config)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        header = ["fraction", "uplift"] if fold is None else ["fold", "fraction", "uplift"]
        writer.writerow(header)
        for row in points:
            writer.writerow([_fmt(c) for c in row])


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


# ---------------------------------------------------------------- qini (CV)


def cmd_qini(args):
    data = _load_dataset(args)
    spec = _classifier_spec(args)
    cfg = _discovery_config(args)
    parents = args.parents.split(",") if args.parents else None
    config = {
        "command": "qini",
        "treatment": args.treatment,
        "outcome": args.outcome,
        "classifier": spec.kind,
        "hyperparameters": spec.resolved(),
        "parents": parents,
        "folds": args.folds,
        "points": args.points,
        "seed": args.seed,
        "alpha": args.alpha,
        "max_cond_size": args.max_cond_size,
        "bins": args.bins,
    }
    os.makedirs(args.out_dir, exist_ok=True)
    folds = kfold_split(data.n_rows, args.folds, args.seed)
    rows = []
    per_point = {}
    areas = []
    for fold_id, (train_idx, test_idx) in enumerate(folds):
        train = data.take(train_idx)
        test = data.take(test_idx)
        pair = train_cctm(
            train,
            args.treatment,
            args.outcome,
            parents=parents,
            spec=spec,
            cfg=cfg,
            bins=args.bins,
        )
        preds = predict_cctm(pair, test, theta=0.0)
        curve = qini_curve(
            preds,
            test.values(args.outcome),
            test.values(args.treatment),
            n_points=args.points,
        )
        areas.append(curve.coefficient_area)
        for j, (frac, uplift) in enumerate(curve.points):
            rows.append((fold_id, frac, uplift))
            if uplift is not None:
                per_point.setdefault(j, []).append(uplift)

    _write_curve_csv(os.path.join(args.out_dir, "folds.csv"), rows, config, fold=True)
    mean_points = [
        (j / args.points, float(np.mean(per_point[j]))) for j in sorted(per_point)
    ]
    _write_curve_csv(os.path.join(args.out_dir, "mean_curve.csv"), mean_points, config)
    payload = {
        "tool": _tool_block(config),
        "folds": args.folds,
        "areas": areas,
        "mean_area": float(np.mean(areas)),
    }
    _write_json(os.path.join(args.out_dir, "metrics.json"), payload)
    print(json.dumps({"mean_area": payload["mean_area"]}))
    return 0


# ---------------------------------------------------------------- parser


def _add_discovery_flags(sp):
    sp.add_argument("--alpha", type=float, default=0.01)
    sp.add_argument("--max-cond-size", type=int, default=3)
    sp.add_argument("--no-symmetric", action="store_true")
    sp.add_argument("--bins", type=int, default=3, help="bins for continuous columns")


def _add_classifier_flags(sp):
    sp.add_argument("--classifier", choices=["logistic", "forest"], default="logistic")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n-trees", type=int)
    sp.add_argument("--max-depth", type=int)
    sp.add_argument("--min-leaf", type=int)
    sp.add_argument("--feature-subsample", type=float)
    sp.add_argument("--max-iterations", type=int)
    sp.add_argument("--l2-penalty", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="causaluplift",
        description="Causal classification: parent discovery, paired arm models, Qini evaluation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="synthesize benchmark data with ground truth")
    sp.add_argument("--group", choices=["group1", "group2"], default="group1")
    sp.add_argument("--bif", help="sample from a BIF network instead of a bundled group")
    sp.add_argument("--treatment")
    sp.add_argument("--outcome")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--noise-vars", type=int, default=90)
    sp.add_argument("--continuous-fraction", type=float, default=0.5)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--split", type=float)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("discover", help="find the outcome's parent set")
    sp.add_argument("--data", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--target", required=True)
    _add_discovery_flags(sp)
    sp.add_argument("--explain", action="store_true", help="include all CI test records")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_discover)

    sp = sub.add_parser("train", help="fit the two-model pair")
    sp.add_argument("--data", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--treatment", required=True)
    sp.add_argument("--outcome", required=True)
    sp.add_argument("--parents", help="comma-separated; skips discovery")
    _add_discovery_flags(sp)
    _add_classifier_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="score rows with a trained model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("eval", help="score predictions against truth or outcomes")
    sp.add_argument("--predictions", required=True)
    sp.add_argument("--ground-truth")
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--data")
    sp.add_argument("--schema")
    sp.add_argument("--treatment", default="T")
    sp.add_argument("--outcome", default="Y")
    sp.add_argument("--points", type=int, default=10)
    sp.add_argument("--curve-out")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("qini", help="cross-validated Qini curves")
    sp.add_argument("--data", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--treatment", required=True)
    sp.add_argument("--outcome", required=True)
    sp.add_argument("--parents")
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--points", type=int, default=10)
    _add_discovery_flags(sp)
    _add_classifier_flags(sp)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_qini)

    _apply_config_dir(parser, sub)
    return parser


def _apply_config_dir(parser, sub):
    config_dir = os.environ.get("CAUSALUPLIFT_CONFIG_DIR")
    if not config_dir:
        return
    path = os.path.join(config_dir, "defaults.json")
    if not os.path.exists(path):
        return
    with open(path, "r", encoding="utf-8") as fh:
        defaults = json.load(fh)
    for name, overrides in defaults.items():
        if name in sub.choices:
            sub.choices[name].set_defaults(
                **{k.replace("-", "_"): v for k, v in overrides.items()}
            )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmptyArm as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CausalUpliftError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
