"""Command-line interface: track, synth, eval, plot."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import TrackerConfig
from .evaluate import (
    compute_metrics,
    curves_to_csv,
    gt_boxes_of,
    metrics_to_json,
    read_curves_csv,
    read_results_csv,
)
from .parts import SequenceParseError, SequenceValidationError, read_sequence, write_sequence
from .plotting import render_metrics_svg
from .synth import GenSpec, generate_sequence
from .tracker import records_to_csv, track_sequence


def _cmd_track(args: argparse.Namespace) -> int:
    frames, meta = read_sequence(args.seq)
    config = TrackerConfig.from_json_file(args.config) if args.config else TrackerConfig()
    records, tracker = track_sequence(
        frames,
        meta,
        config,
        collect_graph=args.dump_graph is not None,
        collect_modes=args.dump_modes is not None,
    )
    Path(args.out).write_text(records_to_csv(records), encoding="utf-8")
    if args.dump_graph is not None:
        with Path(args.dump_graph).open("w", encoding="utf-8") as fh:
            for entry in tracker.graph_dump:
                fh.write(json.dumps(entry, sort_keys=True, separators=(",", ":")) + "\n")
    if args.dump_modes is not None:
        with Path(args.dump_modes).open("w", encoding="utf-8") as fh:
            for entry in tracker.mode_dump:
                fh.write(json.dumps(entry, sort_keys=True, separators=(",", ":")) + "\n")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = GenSpec.from_json_file(args.spec)
    frames, meta = generate_sequence(spec)
    write_sequence(frames, meta, args.out)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    rows = read_results_csv(args.results)
    frames, _meta = read_sequence(args.seq)
    metrics = compute_metrics([row["box"] for row in rows], gt_boxes_of(frames))
    out = Path(args.out)
    out.write_text(metrics_to_json(metrics), encoding="utf-8")
    out.with_suffix(".curves.csv").write_text(curves_to_csv(metrics), encoding="utf-8")
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    series = [(Path(path).stem, read_curves_csv(path)) for path in args.metrics]
    Path(args.out).write_text(render_metrics_svg(series), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypertrack",
        description="Part-based tracking with geometric hypergraph correspondence modes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="track a part sequence and write a results CSV")
    p_track.add_argument("--seq", required=True, help="part-sequence file (JSONL)")
    p_track.add_argument("--config", default=None, help="tracker config JSON (defaults used when omitted)")
    p_track.add_argument("--out", required=True, help="output results CSV")
    p_track.add_argument("--dump-graph", default=None, help="write per-frame hypergraph dumps (JSONL)")
    p_track.add_argument("--dump-modes", default=None, help="write per-frame mode dumps (JSONL)")
    p_track.set_defaults(func=_cmd_track)

    p_synth = sub.add_parser("synth", help="generate a synthetic part sequence")
    p_synth.add_argument("--spec", required=True, help="generator spec JSON")
    p_synth.add_argument("--out", required=True, help="output sequence file")
    p_synth.set_defaults(func=_cmd_synth)

    p_eval = sub.add_parser("eval", help="score a results CSV against ground truth")
    p_eval.add_argument("--results", required=True, help="results CSV from `track`")
    p_eval.add_argument("--seq", required=True, help="sequence file with ground-truth boxes")
    p_eval.add_argument("--out", required=True, help="metrics JSON; curves CSV lands next to it")
    p_eval.set_defaults(func=_cmd_eval)

    p_plot = sub.add_parser("plot", help="render precision/success plots as SVG")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.add_argument("metrics", nargs="+", help="curves CSV files from `eval`")
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SequenceParseError, SequenceValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
