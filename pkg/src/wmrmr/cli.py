"""Command-line interface.

Subcommands mirror the library stages: ``synth`` makes data, ``mi`` and
``rank`` expose the criterion inputs and orderings, ``select`` runs the full
protocol (report, curves CSV and figures), ``eval`` measures one explicit
subset on a held-out split and ``pca`` fits the baseline projection.

Exit codes: 0 on success, 2 when inputs or flags fail validation, 1 on an
unexpected runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .baseline_pca import pca_fit, pca_to_dict, pca_transform
from .dataset import (
    DEFAULT_LABEL_VALUES,
    generate_synthetic,
    load_csv,
    load_recipe,
    discretize_equal_frequency,
    write_csv,
    zscore_normalize,
)
from .mrmr import MrmrConfig, incremental_rank, ranking_to_dict
from .mutinfo import mi_matrix_to_dict, pairwise_mi_matrix
from .pipeline import (
    DEFAULT_ALPHAS,
    PipelineConfig,
    evaluate_final,
    report_to_dict,
    select_features,
    write_curves_csv,
)


def _parse_float_token(token: str) -> float:
    token = token.strip()
    if not token:
        raise ValueError("empty value in a numeric list")
    if "^" in token:
        base, _, exponent = token.partition("^")
        return float(base) ** float(exponent)
    return float(token)


def _parse_float_list(text: str, flag: str) -> tuple:
    try:
        values = tuple(_parse_float_token(t) for t in text.split(","))
    except ValueError as exc:
        raise ValueError(f"{flag}: {exc}") from None
    if not values:
        raise ValueError(f"{flag}: no values given")
    return values


def _parse_label_values(text: str) -> tuple:
    values = tuple(t.strip() for t in text.split(","))
    if len(values) != 2 or not all(values) or values[0] == values[1]:
        raise ValueError(
            f"--label-values needs two distinct non-empty strings, got {text!r}"
        )
    return values


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _provenance(args: argparse.Namespace) -> dict:
    skip = {"handler"}
    flags = {key: value for key, value in sorted(vars(args).items())
             if key not in skip}
    return {
        "tool": f"wmrmr {__version__}",
        "command": args.handler.__name__.removeprefix("_cmd_"),
        "flags": flags,
        "timestamp": _timestamp(),
    }


def _write_json(payload: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _load_input(args: argparse.Namespace):
    return load_csv(args.input, args.label_col, args.label_values)


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    kwargs = {
        "bins": getattr(args, "bins", 10),
        "folds": args.folds,
        "seed": args.seed,
    }
    if getattr(args, "subset_c_grid", None) is not None:
        kwargs["subset_c_grid"] = _parse_float_list(
            args.subset_c_grid, "--subset-c-grid")
    if getattr(args, "subset_gamma_grid", None) is not None:
        kwargs["subset_gamma_grid"] = _parse_float_list(
            args.subset_gamma_grid, "--subset-gamma-grid")
    if getattr(args, "c_grid", None) is not None:
        kwargs["final_c_grid"] = _parse_float_list(args.c_grid, "--c-grid")
    if getattr(args, "gamma_grid", None) is not None:
        kwargs["final_gamma_grid"] = _parse_float_list(
            args.gamma_grid, "--gamma-grid")
    if hasattr(args, "variance"):
        kwargs["variance_threshold"] = args.variance
    if hasattr(args, "threads"):
        kwargs["threads"] = args.threads
    return PipelineConfig(**kwargs)


def _cmd_synth(args: argparse.Namespace) -> int:
    recipe = load_recipe(args.recipe)
    dataset = generate_synthetic(args.samples, recipe, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(dataset, out, label_column=args.label_col,
              label_values=args.label_values)
    print(f"wrote {dataset.n_samples} samples x {dataset.n_features} features "
          f"to {out}")
    counts = [int((dataset.labels == c).sum()) for c in (0, 1)]
    print(f"class balance: {counts[0]} stable / {counts[1]} unstable")
    return 0


def _cmd_mi(args: argparse.Namespace) -> int:
    dataset = _load_input(args)
    discretized = discretize_equal_frequency(dataset, args.bins)
    mi = pairwise_mi_matrix(discretized, dataset.labels, dataset.feature_names)
    payload = mi_matrix_to_dict(mi)
    payload["provenance"] = _provenance(args)
    _write_json(payload, Path(args.out))
    ranked = sorted(zip(mi.class_relevance, dataset.feature_names), reverse=True)
    print(f"MI matrix over {dataset.n_features} features written to {args.out}")
    print("top class relevance (bits):")
    for value, name in ranked[:5]:
        print(f"  {name}: {max(value, 0.0):.4f}")
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    dataset = _load_input(args)
    alphas = _parse_float_list(args.alphas, "--alphas")
    discretized = discretize_equal_frequency(dataset, args.bins)
    mi = pairwise_mi_matrix(discretized, dataset.labels, dataset.feature_names)
    rankings = [incremental_rank(mi, MrmrConfig(alpha=a)) for a in alphas]
    payload = {
        "feature_names": list(dataset.feature_names),
        "rankings": [ranking_to_dict(r, dataset.feature_names)
                     for r in rankings],
        "provenance": _provenance(args),
    }
    _write_json(payload, Path(args.out))
    for ranking in rankings:
        head = ", ".join(dataset.feature_names[i] for i in ranking.order[:8])
        tail = " ..." if len(ranking.order) > 8 else ""
        print(f"alpha={ranking.alpha:g}: {head}{tail}")
    print(f"rankings written to {args.out}")
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    dataset = _load_input(args)
    test = None
    if args.test is not None:
        test = load_csv(args.test, args.label_col, args.label_values)
    alphas = _parse_float_list(args.alphas, "--alphas")
    config = _pipeline_config(args)
    report = select_features(dataset, alphas=alphas, config=config, test=test)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = report_to_dict(report)
    payload["provenance"].update(_provenance(args))
    _write_json(payload, out_dir / "report.json")
    write_curves_csv(report, out_dir / "curves.csv")

    from .plots import plot_accuracy_curves, plot_criterion_curves

    plot_accuracy_curves(report, out_dir / "accuracy_curves.png")
    plot_criterion_curves(report, out_dir / "criterion_curves.png")

    for result in report.alpha_results:
        print(f"alpha={result.ranking.alpha:g}: best J={result.best_score:.4f} "
              f"with {result.best_size} features")
    names = [report.feature_names[i] for i in report.global_best_subset]
    print(f"selected ({len(names)} features, alpha={report.global_best_alpha:g}, "
          f"J={report.global_best_score:.4f}): {', '.join(names)}")
    for key, bundle in report.final_metrics.items():
        print(f"test[{key}]: a_test={bundle.a_test:.4f} kappa={bundle.kappa:.4f} "
              f"auc={bundle.auc:.4f} eta={bundle.eta:.4f}")
    print(f"report, curves and figures written to {out_dir}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    dataset = _load_input(args)
    test = load_csv(args.test, args.label_col, args.label_values)
    subset_names = [t.strip() for t in args.subset.split(",") if t.strip()]
    if not subset_names:
        raise ValueError("--subset: no feature names given")
    subset = tuple(dataset.feature_index(name) for name in subset_names)
    config = _pipeline_config(args)
    bundle, details = evaluate_final(dataset, test, subset, config,
                                     return_details=True)
    payload = {
        "subset": subset_names,
        "metrics": bundle.to_dict(),
        "tuning": details,
        "provenance": _provenance(args),
    }
    _write_json(payload, Path(args.out))
    chosen = details["chosen_config"]
    print(f"tuned C={chosen['c_param']:g} gamma={chosen['gamma']:g} "
          f"(cv J={details['cv_j_score']:.4f})")
    print(f"a_test={bundle.a_test:.4f} kappa={bundle.kappa:.4f} "
          f"auc={bundle.auc:.4f} eta={bundle.eta:.4f}")
    print(f"metrics written to {args.out}")
    return 0


def _cmd_pca(args: argparse.Namespace) -> int:
    dataset = _load_input(args)
    normalized, _ = zscore_normalize(dataset)
    projection = pca_fit(normalized, args.variance)
    transformed = pca_transform(projection, normalized)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = pca_to_dict(projection)
    payload["provenance"] = _provenance(args)
    _write_json(payload, out_dir / "projection.json")
    write_csv(transformed, out_dir / "transformed.csv",
              label_column=args.label_col, label_values=args.label_values)
    ratios = ", ".join(f"{r:.4f}" for r in projection.explained_ratio)
    print(f"retained {projection.retained_k} of {dataset.n_features} components "
          f"at threshold {args.variance:g}")
    print(f"explained variance ratios: {ratios}")
    print(f"projection and transformed data written to {out_dir}")
    return 0


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="training CSV path")
    parser.add_argument("--label-col", default="label",
                        help="label column name (default: label)")
    parser.add_argument("--label-values", type=_parse_label_values,
                        default=DEFAULT_LABEL_VALUES, metavar="STABLE,UNSTABLE",
                        help="cell values for the two classes (default: 0,1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmrmr",
        description="Weighted relevance/redundancy feature selection "
                    "with SVM wrapper validation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"wmrmr {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser(
        "synth", help="generate a synthetic labelled dataset")
    synth.add_argument("--recipe", default="default",
                       help="preset name or recipe JSON path (default: default)")
    synth.add_argument("--samples", type=int, default=600)
    synth.add_argument("--seed", type=int, default=42)
    synth.add_argument("--label-col", default="label")
    synth.add_argument("--label-values", type=_parse_label_values,
                       default=DEFAULT_LABEL_VALUES, metavar="STABLE,UNSTABLE")
    synth.add_argument("--out", required=True, help="output CSV path")
    synth.set_defaults(handler=_cmd_synth)

    mi = commands.add_parser(
        "mi", help="write the mutual information matrix as JSON")
    _add_io_flags(mi)
    mi.add_argument("--bins", type=int, default=10)
    mi.add_argument("--out", required=True, help="output JSON path")
    mi.set_defaults(handler=_cmd_mi)

    rank = commands.add_parser(
        "rank", help="greedy feature orderings, one per alpha")
    _add_io_flags(rank)
    rank.add_argument("--bins", type=int, default=10)
    rank.add_argument("--alphas", default="0,0.25,0.5,0.75,1",
                      help="comma-separated weights in [0,1]")
    rank.add_argument("--out", required=True, help="output JSON path")
    rank.set_defaults(handler=_cmd_rank)

    select = commands.add_parser(
        "select", help="full selection run: report, curves CSV and figures")
    _add_io_flags(select)
    select.add_argument("--test", help="held-out CSV for final metrics")
    select.add_argument("--bins", type=int, default=10)
    select.add_argument("--folds", type=int, default=5)
    select.add_argument("--seed", type=int, default=42)
    select.add_argument("--alphas", default="0,0.25,0.5,0.75,1",
                        help="comma-separated weights in [0,1]")
    select.add_argument("--subset-c-grid", metavar="LIST",
                        help="per-subset C values, e.g. 2^-1,2^3,2^7,2^11")
    select.add_argument("--subset-gamma-grid", metavar="LIST",
                        help="per-subset gamma values, e.g. 2^-7,2^-3,2^1")
    select.add_argument("--c-grid", metavar="LIST",
                        help="final C grid (default: 2^-5..2^15 step 2^2)")
    select.add_argument("--gamma-grid", metavar="LIST",
                        help="final gamma grid (default: 2^-15..2^3 step 2^2)")
    select.add_argument("--variance", type=float, default=0.95,
                        help="PCA baseline variance threshold")
    select.add_argument("--threads", type=int, default=1,
                        help="parallel subset evaluations")
    select.add_argument("--out-dir", required=True)
    select.set_defaults(handler=_cmd_select)

    evaluate = commands.add_parser(
        "eval", help="tune and score one explicit feature subset")
    _add_io_flags(evaluate)
    evaluate.add_argument("--test", required=True,
                          help="held-out CSV for final metrics")
    evaluate.add_argument("--subset", required=True,
                          help="comma-separated feature names")
    evaluate.add_argument("--folds", type=int, default=5)
    evaluate.add_argument("--seed", type=int, default=42)
    evaluate.add_argument("--c-grid", metavar="LIST")
    evaluate.add_argument("--gamma-grid", metavar="LIST")
    evaluate.add_argument("--out", required=True, help="output JSON path")
    evaluate.set_defaults(handler=_cmd_eval)

    pca = commands.add_parser(
        "pca", help="fit the PCA baseline projection on z-scored data")
    _add_io_flags(pca)
    pca.add_argument("--variance", type=float, default=0.95)
    pca.add_argument("--out-dir", required=True)
    pca.set_defaults(handler=_cmd_pca)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
