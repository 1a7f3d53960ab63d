"""Command-line surface: phantom synthesis, decomposition, labeling, metrics.

Every command resolves its settings up front (defaults, then config
file, then explicit flags), computes all results in memory, and only
then writes outputs through atomic renames, so interrupted runs never
leave partial artifacts. Exit codes: 0 success, 1 runtime failure, 2
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import imgio
from .decompose import DecompositionResult, decompose
from .metrics import cv, jaccard
from .synth import generate
from .threshold import SegmentationResult, segment


def _read_grid_auto(path) -> np.ndarray:
    """Dispatch on extension: .pgm through the image reader, else CSV."""
    if str(path).lower().endswith((".pgm", ".pnm")):
        return imgio.read_image(path)
    return imgio.read_float_grid(path)


def _prepare_prefix(prefix: str) -> str:
    # "out/run" names files out/run_f.csv etc.; a trailing separator
    # (slash, underscore, dash, dot) is kept as given
    if prefix and prefix[-1] not in "/_-.":
        prefix += "_"
    parent = Path(prefix + "x").parent
    parent.mkdir(parents=True, exist_ok=True)
    return prefix


_FLAG_KEYS = [
    ("alpha", "alpha"),
    ("beta", "beta"),
    ("gamma", "gamma"),
    ("rho", "rho"),
    ("p", "p"),
    ("r", "r"),
    ("tol_in", "tol_in"),
    ("tol_out", "tol_out"),
    ("maxit_in", "maxit_in"),
    ("maxit_out", "maxit_out"),
    ("k", "K"),
    ("log_domain", "log_domain"),
    ("seed", "seed"),
]


def _add_config_flags(parser: argparse.ArgumentParser, with_k: bool) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--alpha", type=float, help="gradient penalty weight")
    parser.add_argument("--beta", type=float, help="smoothness weight")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--rho", type=float)
    parser.add_argument("--p", type=float, help="penalty exponent in (0,1)")
    parser.add_argument("--r", type=float, help="splitting penalty weight")
    parser.add_argument("--tol-in", dest="tol_in", type=float)
    parser.add_argument("--tol-out", dest="tol_out", type=float)
    parser.add_argument("--maxit-in", dest="maxit_in", type=int)
    parser.add_argument("--maxit-out", dest="maxit_out", type=int)
    if with_k:
        parser.add_argument("-K", "--phases", dest="k", type=int, help="phase count")
    parser.add_argument(
        "--log-domain",
        dest="log_domain",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="decompose the log of the clamped input, exponentiate outputs",
    )
    parser.add_argument("--seed", type=int)
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="echo the fully resolved configuration as JSON and exit",
    )


def _resolve_config(args: argparse.Namespace) -> imgio.RunConfig:
    payload: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            loaded = json.load(handle)
        if not isinstance(loaded, dict):
            raise ValueError("config must be a JSON object")
        payload.update(loaded)
    for attr, key in _FLAG_KEYS:
        value = getattr(args, attr, None)
        if value is not None:
            payload[key] = value
    return imgio.config_from_dict(payload)


def _write_decomposition(
    prefix: str, result: DecompositionResult, u: np.ndarray, v: np.ndarray
) -> None:
    imgio.write_float_grid(u, prefix + "u.csv")
    imgio.write_float_grid(v, prefix + "v.csv")
    imgio.write_image(u, prefix + "u.pgm")
    imgio.write_image(v, prefix + "v.pgm")
    imgio.write_trace(result.trace, prefix + "trace.csv")


def _phase_report(
    u: np.ndarray, seg: SegmentationResult, truth: np.ndarray
) -> list[dict]:
    phases = []
    for phase in range(1, seg.k + 1):
        truth_mask = truth == phase
        entry: dict = {"phase": phase}
        entry["js"] = jaccard(seg.labels == phase, truth_mask)
        entry["cv"] = cv(u, truth_mask) if truth_mask.any() else None
        phases.append(entry)
    return phases


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = imgio.read_phantom_spec(args.spec_json)
    phantom = generate(spec)
    prefix = _prepare_prefix(args.out_prefix)
    imgio.write_float_grid(phantom.f, prefix + "f.csv")
    imgio.write_image(phantom.f, prefix + "f.pgm")
    imgio.write_labels(phantom.truth_labels, prefix + "truth.csv")
    imgio.write_float_grid(phantom.clean_u, prefix + "clean.csv")
    imgio.write_float_grid(phantom.bias_v, prefix + "bias.csv")
    return 0


def _decompose_pipeline(
    f: np.ndarray, config: imgio.RunConfig
) -> tuple[DecompositionResult, np.ndarray, np.ndarray]:
    """Stage one, optionally through the log transform; returns intensities."""
    work = imgio.to_log_domain(f) if config.log_domain else f
    result = decompose(
        work, config.model_params(), config.outer_params(), config.admm_params()
    )
    if config.log_domain:
        return result, imgio.from_log_domain(result.u), imgio.from_log_domain(result.v)
    return result, result.u, result.v


def _base_report(config: imgio.RunConfig, result: DecompositionResult) -> dict:
    return {
        "converged": result.converged,
        "outer_iters": result.outer_iters,
        "final_energy": result.trace[-1].energy,
        "log_domain": config.log_domain,
    }


def _cmd_decompose(args: argparse.Namespace) -> int:
    config = args.resolved_config
    if args.print_config:
        print(json.dumps(imgio.config_to_dict(config), indent=2))
        return 0
    f = _read_grid_auto(args.input)
    result, u, v = _decompose_pipeline(f, config)
    prefix = _prepare_prefix(args.out_prefix)
    _write_decomposition(prefix, result, u, v)
    imgio.write_report(_base_report(config, result), prefix + "report.json")
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    u = _read_grid_auto(args.input_u)
    seg = segment(u, args.k)
    prefix = _prepare_prefix(args.out_prefix)
    imgio.write_labels(seg.labels, prefix + "labels.csv")
    imgio.write_image(imgio.label_image(seg.labels, seg.k), prefix + "labels.pgm")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = args.resolved_config
    if args.print_config:
        print(json.dumps(imgio.config_to_dict(config), indent=2))
        return 0
    f = _read_grid_auto(args.input)
    result, u, v = _decompose_pipeline(f, config)
    seg = segment(u, config.k)
    report = _base_report(config, result)
    report["k"] = config.k
    if args.truth:
        truth = imgio.read_labels(args.truth)
        report["phases"] = _phase_report(u, seg, truth)

    prefix = _prepare_prefix(args.out_prefix)
    imgio.write_image(f, prefix + "f.pgm")
    _write_decomposition(prefix, result, u, v)
    imgio.write_labels(seg.labels, prefix + "labels.csv")
    imgio.write_image(imgio.label_image(seg.labels, seg.k), prefix + "labels.pgm")
    imgio.write_report(report, prefix + "report.json")
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    truth = imgio.read_labels(args.truth_labels)
    k = args.k or int(truth.max())
    try:
        labels = imgio.read_labels(args.input)
        u = None
    except ValueError:
        u = _read_grid_auto(args.input)
        labels = segment(u, k).labels
    if labels.shape != truth.shape:
        raise ValueError("label shapes disagree")

    report: dict = {"k": k, "phases": []}
    for phase in range(1, k + 1):
        entry: dict = {"phase": phase}
        entry["js"] = jaccard(labels == phase, truth == phase)
        if u is not None:
            entry["cv"] = cv(u, truth == phase)
        report["phases"].append(entry)
    imgio.write_report(report, args.report_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shrinkseg",
        description="Two-stage segmentation of intensity-inhomogeneous images",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a ground-truthed phantom")
    p_synth.add_argument("spec_json")
    p_synth.add_argument("out_prefix")
    p_synth.set_defaults(func=_cmd_synth)

    p_dec = sub.add_parser("decompose", help="stage one only")
    p_dec.add_argument("input", help="PGM or float CSV image")
    p_dec.add_argument("out_prefix")
    _add_config_flags(p_dec, with_k=False)
    p_dec.set_defaults(func=_cmd_decompose)

    p_seg = sub.add_parser("segment", help="stage two only, on a corrected image")
    p_seg.add_argument("input_u", help="float CSV or PGM of the corrected image")
    p_seg.add_argument("k", type=int, help="number of phases")
    p_seg.add_argument("out_prefix")
    p_seg.set_defaults(func=_cmd_segment)

    p_run = sub.add_parser("run", help="full two-stage pipeline")
    p_run.add_argument("input", help="PGM or float CSV image")
    p_run.add_argument("out_prefix")
    _add_config_flags(p_run, with_k=True)
    p_run.add_argument("--truth", help="truth label CSV; adds JS/CV to the report")
    p_run.set_defaults(func=_cmd_run)

    p_met = sub.add_parser("metrics", help="JS/CV report against truth labels")
    p_met.add_argument("input", help="label CSV, float CSV, or PGM")
    p_met.add_argument("truth_labels", help="label CSV")
    p_met.add_argument("report_path")
    p_met.add_argument("-K", "--phases", dest="k", type=int, default=None)
    p_met.set_defaults(func=_cmd_metrics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if hasattr(args, "config"):
        # bad settings are usage errors, distinct from runtime failures
        try:
            args.resolved_config = _resolve_config(args)
        except (OSError, ValueError, TypeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2

    try:
        return args.func(args)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
