"""
Command-line entry point: ``track``, ``eval``, ``synth`` and ``ablate``.

Exit codes: 0 on success, 2 for input or configuration errors, 3 when the
tracker itself fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

from .bench import (
    SynthSpec,
    ablation_suite,
    evaluate,
    load_sequence,
    read_boxes,
    run_ablation,
    synth_sequence,
    track_sequence,
    write_curve,
    write_predictions,
)
from .bench.runner import ABLATION_PROFILES
from .config import (
    DEFAULT_PROFILE,
    RunConfig,
    build_tracker_config,
    load_run_config,
    write_effective_config,
)
from .errors import (
    IngestionError,
    InvalidConfigError,
    InvalidInputError,
    SpecValidationError,
    SRDCFError,
)
from .utils.logging import configure_logging

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3

_INPUT_ERRORS = (IngestionError, InvalidConfigError, InvalidInputError, SpecValidationError)


def _pair(text: str) -> Tuple[float, float]:
    try:
        dx, dy = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected dx,dy, got {text!r}") from None
    return dx, dy


def _resolve_run_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        run_config = load_run_config(args.config, profile=args.profile)
    else:
        profile = args.profile or DEFAULT_PROFILE
        run_config = RunConfig(profile=profile, tracker=build_tracker_config(profile))
    updates: Dict[str, Path] = {}
    for field, value in (("sequence", args.seq), ("output", args.out), ("ground_truth", args.gt), ("curve", args.curve)):
        if value is not None:
            updates[field] = Path(value)
    return run_config.model_copy(update=updates)


def cmd_track(args: argparse.Namespace) -> int:
    run_config = _resolve_run_config(args)
    if run_config.sequence is None:
        raise InvalidConfigError("sequence: no sequence directory given (--seq or config)")
    if run_config.output is None:
        raise InvalidConfigError("output: no predictions path given (--out or config)")

    sequence = load_sequence(run_config.sequence)
    if run_config.ground_truth is not None:
        ground_truth = read_boxes(run_config.ground_truth, one_indexed=not args.gt_zero_indexed)
        sequence = replace(sequence, ground_truth=ground_truth)

    init_box = None
    if sequence.ground_truth is None:
        if args.init is None:
            raise IngestionError(f"{run_config.sequence} has no ground truth; pass --init x,y,w,h")
        init_box = args.init

    run_config.output.parent.mkdir(parents=True, exist_ok=True)
    write_effective_config(run_config, run_config.output.with_name(run_config.output.name + ".config.json"))
    result = track_sequence(sequence, run_config.tracker, init_box=init_box)
    write_predictions(run_config.output, result.boxes)

    print(f"{sequence.name}: {len(result.boxes)} frames at {result.fps:.1f} fps")
    if result.report is not None:
        print(f"op50={result.report.op_at_half:.4f} auc={result.report.auc:.4f}")
        if run_config.curve is not None:
            write_curve(run_config.curve, result.report)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    predictions = read_boxes(args.pred)
    ground_truth = read_boxes(args.gt, one_indexed=not args.gt_zero_indexed)
    report = evaluate(predictions, ground_truth)
    if args.curve:
        write_curve(args.curve, report)
    print(f"op50={report.op_at_half:.4f} auc={report.auc:.4f} precision20={report.precision20:.4f}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    defaults = SynthSpec()
    spec = SynthSpec(
        frames=args.frames,
        box=tuple(args.box) if args.box else defaults.box,
        motion=args.motion,
        scale_rate=args.scale_rate,
        clutter=args.clutter,
        noise=args.noise,
        seed=args.seed,
    )
    sequence = synth_sequence(spec, args.out)
    print(f"wrote {len(sequence)} frames to {args.out}")
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    root = Path(args.dir)
    if args.generate:
        directories = ablation_suite(root, seed=args.seed, count=args.count, frames=args.frames)
    else:
        directories = sorted(path for path in root.iterdir() if path.is_dir())
        if not directories:
            raise IngestionError(f"{root} contains no sequence directories")
    profiles = args.profile or list(ABLATION_PROFILES)
    report = run_ablation(directories, profiles, jobs=args.jobs)
    summary = report.summary()
    for profile in profiles:
        print(f"{profile}: mean IoU {summary.get(profile, 0.0):.4f}")
    if args.out:
        Path(args.out).write_text(json.dumps(report.per_sequence, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def _box(text: str) -> Tuple[float, float, float, float]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,w,h, got {text!r}") from None
    if len(values) != 4:
        raise argparse.ArgumentTypeError(f"expected x,y,w,h, got {text!r}")
    return values  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    synth_defaults = SynthSpec()
    parser = argparse.ArgumentParser(prog="srdcf", description="Spatially regularized correlation filter tracker")
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="track one sequence directory")
    track.add_argument("--seq", help="OTB-layout sequence directory")
    track.add_argument("--config", help="JSON run config")
    track.add_argument("--profile", help="named preset from configs/profiles.yaml")
    track.add_argument("--out", help="predictions file (0-indexed x,y,w,h per line)")
    track.add_argument("--gt", help="ground-truth file overriding the sequence's own")
    track.add_argument("--gt-zero-indexed", action="store_true", help="--gt boxes are 0-indexed")
    track.add_argument("--curve", help="success-curve CSV, written when ground truth exists")
    track.add_argument("--init", type=_box, help="initial box x,y,w,h when there is no ground truth")
    track.set_defaults(handler=cmd_track)

    ev = sub.add_parser("eval", help="score predictions against ground truth")
    ev.add_argument("--pred", required=True, help="predictions file (0-indexed)")
    ev.add_argument("--gt", required=True, help="ground-truth file (1-indexed, OTB convention)")
    ev.add_argument("--gt-zero-indexed", action="store_true", help="ground truth is 0-indexed")
    ev.add_argument("--curve", help="success-curve CSV output")
    ev.set_defaults(handler=cmd_eval)

    synth = sub.add_parser("synth", help="write a synthetic sequence")
    synth.add_argument("--out", required=True, help="output sequence directory")
    synth.add_argument("--frames", type=int, default=synth_defaults.frames)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--motion", type=_pair, default=synth_defaults.motion, help="per-frame displacement dx,dy")
    synth.add_argument("--scale-rate", type=float, default=0.0, help="per-frame relative size change")
    synth.add_argument("--box", type=_box, help="initial box x,y,w,h")
    synth.add_argument("--clutter", type=int, default=0, help="number of target-like distractors")
    synth.add_argument("--noise", type=float, default=0.0, help="Gaussian pixel noise sigma")
    synth.set_defaults(handler=cmd_synth)

    ablate = sub.add_parser("ablate", help="compare profiles over a set of sequences")
    ablate.add_argument("--dir", required=True, help="directory of sequence directories")
    ablate.add_argument("--generate", action="store_true", help="write the synthetic clutter suite into --dir first")
    ablate.add_argument("--profile", action="append", help="profile to compare (repeatable)")
    ablate.add_argument("--jobs", type=int, default=1, help="worker processes (across sequences)")
    ablate.add_argument("--seed", type=int, default=0)
    ablate.add_argument("--count", type=int, default=10)
    ablate.add_argument("--frames", type=int, default=48)
    ablate.add_argument("--out", help="per-sequence mean IoU JSON")
    ablate.set_defaults(handler=cmd_ablate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging()
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except _INPUT_ERRORS as exc:
        LOG.debug("Input error", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SRDCFError as exc:
        LOG.exception("Tracking failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def run(argv: Optional[list[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
