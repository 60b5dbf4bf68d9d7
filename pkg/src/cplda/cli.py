"""Command-line entry point: simulate, fit, classify, bench.

Every subcommand reads an optional JSON config document; a handful of
flags override top-level scalar fields so one manifest can drive seed
or size sweeps.  Exit codes: 0 on success, 1 when the computation
reports a numeric degeneracy, 2 for usage, config, or file problems.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, classify, io as cpio, sampling
from .estimator import CpLdaClassifier
from .exceptions import (
    DegenerateComponentError,
    DegenerateVarianceError,
    NotPositiveDefiniteError,
    ProjectionPoolError,
    SingularMatrixError,
)

_COMPUTE_ERRORS = (
    SingularMatrixError,
    NotPositiveDefiniteError,
    DegenerateVarianceError,
    DegenerateComponentError,
    ProjectionPoolError,
    RuntimeError,
)

_USAGE_ERRORS = (OSError, KeyError, ValueError, TypeError)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cplda",
        description="low-rank tensor discriminant analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("simulate", "draw a labeled tensor-normal dataset"),
        ("fit", "fit a discriminant rule from a dataset directory"),
        ("classify", "score a dataset with a fitted model"),
        ("bench", "run benchmark scenarios and aggregate metrics"),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", type=Path, help="JSON config file")
        cmd.add_argument("--seed", type=int, help="override config seed")
        cmd.add_argument("--out", type=Path, help="override output directory")
        cmd.add_argument(
            "--reps", type=int, help="override replication count (bench)"
        )
        cmd.add_argument("--preset", help="scenario preset name (bench)")
        cmd.add_argument(
            "--rank", type=int, help="decomposition rank (fit)"
        )
        cmd.add_argument(
            "--cv-ranks",
            help="comma-separated candidate ranks for cross validation (fit)",
        )
    return parser


def load_config(args):
    """Merge the JSON config (if any) with flag overrides."""
    config = {}
    if args.config is not None:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise ValueError("config root must be a JSON object")
    if args.seed is not None:
        config["seed"] = args.seed
    if args.out is not None:
        config["out"] = str(args.out)
    if args.reps is not None:
        config["reps"] = args.reps
    if args.preset is not None:
        config["preset"] = args.preset
    if args.rank is not None:
        config["rank"] = args.rank
    if args.cv_ranks is not None:
        config["cv_ranks"] = [int(r) for r in args.cv_ranks.split(",")]
    return config


def _require_out(config):
    if "out" not in config:
        raise ValueError("missing output path: set --out or config 'out'")
    return Path(config["out"])


def _simulate_scenario(config):
    fields = dict(
        scenario_id="simulate",
        dims=tuple(config["dims"]),
        rank=int(config["rank"]),
        n1=int(config.get("n1", 20)),
        n2=int(config.get("n2", 20)),
        weight_schedule=config.get("weight_schedule", "equal"),
        w_max=float(config.get("w_max", 2.5)),
        ratio=float(config.get("ratio", 1.25)),
        basis_kind=config.get("basis", "orthogonal"),
        delta=float(config.get("delta", 0.1)),
        theta_rule=config.get("theta_rule", "per-component"),
        cov_kind=config.get("covariance", "identity"),
        seed=int(config.get("seed", 0)),
    )
    return bench.Scenario(**fields)


def cmd_simulate(config):
    out = _require_out(config)
    scn = _simulate_scenario(config)
    rng = sampling.make_rng(scn.seed)
    truth, population = bench.make_scenario_params(scn, rng)
    x1 = sampling.sample_tensor_normal(
        rng, population.mean1, population.covs, scn.n1
    )
    x2 = sampling.sample_tensor_normal(
        rng, population.mean2, population.covs, scn.n2
    )
    cpio.write_dataset(out, x1, x2)
    doc = {
        "dims": list(scn.dims),
        "rank": scn.rank,
        "weights": truth.weights.tolist(),
        "factors": [a.tolist() for a in truth.factors],
        "basis_kind": scn.basis_kind,
        "cov_kind": scn.cov_kind,
        "seed": scn.seed,
    }
    (out / "truth.json").write_text(json.dumps(doc, indent=2) + "\n")
    print("wrote %d samples to %s" % (scn.n1 + scn.n2, out))
    return 0


def cmd_fit(config):
    if "data" not in config:
        raise ValueError("missing dataset path: set config 'data'")
    out = _require_out(config)
    samples, labels = cpio.read_dataset(Path(config["data"]))
    clf = CpLdaClassifier(
        rank=config.get("rank"),
        cv_ranks=config.get("cv_ranks"),
        n_folds=int(config.get("n_folds", 10)),
        eigengap_c0=float(config.get("eigengap_c0", 0.1)),
        split=tuple(config["split"]) if config.get("split") else None,
        n_projections=config.get("n_projections"),
        overlap=float(config.get("overlap", 0.5)),
        tol=float(config.get("tol", 1e-6)),
        max_iter=int(config.get("max_iter", 50)),
        ridge=config.get("ridge"),
        random_state=int(config.get("seed", 0)),
    )
    clf.fit(samples, labels)
    out.mkdir(parents=True, exist_ok=True)
    cpio.save_estimate(out / "estimate", clf.estimate_)
    if clf.model_ is not None:
        cpio.save_model(out / "cp_model.json", clf.model_)
        cpio.write_fit_report_csv(out / "fit_report.csv", clf.report_)
    doc = {
        "rank": clf.rank_,
        "cv_ranks": config.get("cv_ranks"),
        "cv_errors": None
        if clf.cv_errors_ is None
        else list(clf.cv_errors_),
        "converged": None if clf.report_ is None else clf.report_.converged,
        "seed": int(config.get("seed", 0)),
    }
    (out / "fit.json").write_text(json.dumps(doc, indent=2) + "\n")
    print("fitted rank: %s" % clf.rank_)
    return 0


def _load_rule(model_dir):
    model_dir = Path(model_dir)
    est = cpio.load_estimate(model_dir / "estimate")
    model_path = model_dir / "cp_model.json"
    model = cpio.load_model(model_path) if model_path.exists() else None
    return classify.rule_from_estimate(est, model)


def cmd_classify(config):
    if "model" not in config or "data" not in config:
        raise ValueError("classify needs config 'model' and 'data' paths")
    out = _require_out(config)
    rule = _load_rule(config["model"])
    samples, labels = cpio.read_dataset(Path(config["data"]))
    stats = classify.decision_values(rule, samples)
    preds = classify.predict(rule, samples)
    out.mkdir(parents=True, exist_ok=True)
    cpio.write_predictions_csv(out / "predictions.csv", stats, preds)
    rate = float(np.mean(preds != labels))
    print("error rate: %.4f" % rate)
    return 0


def cmd_bench(config):
    out = _require_out(config)
    overrides = {}
    if "reps" in config:
        overrides["replications"] = int(config["reps"])
    if "seed" in config:
        overrides["seed"] = int(config["seed"])
    if "preset" in config:
        scn = bench.preset_scenario(config["preset"], **overrides)
    elif "scenario" in config:
        fields = dict(config["scenario"])
        fields["dims"] = tuple(fields.get("dims", (30, 30, 30)))
        fields.update(overrides)
        scn = bench.Scenario(**fields)
    else:
        raise ValueError("bench needs config 'preset' or 'scenario'")
    result = bench.run_scenario(scn)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_bench_csv(out / "bench.csv", [result])
    for name in bench.METRIC_NAMES:
        print(
            "%s %s: %.4f (%.4f)"
            % (scn.scenario_id, name, result.means[name], result.stds[name])
        )
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "classify": cmd_classify,
    "bench": cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](load_config(args))
    except _COMPUTE_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
