"""Command-line entry point for video ingestion."""

from __future__ import annotations

import argparse
import sys

from .ingest import DEFAULT_COUNT_RANGE, IngestError, ingest_video


def _parse_box(text: str) -> tuple[float, float, float, float]:
    fields = text.split(",")
    if len(fields) != 4:
        raise argparse.ArgumentTypeError("box must be cx,cy,w,h")
    return tuple(float(v) for v in fields)


def _parse_range(text: str) -> tuple[int, int]:
    fields = text.split(",")
    if len(fields) != 2:
        raise argparse.ArgumentTypeError("count range must be lo,hi")
    lo, hi = int(fields[0]), int(fields[1])
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("count range must satisfy 1 <= lo <= hi")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypertrack-ingest",
        description="Over-segment a video into a part-sequence file for the tracker.",
    )
    parser.add_argument("--video", required=True, help="input video file")
    parser.add_argument("--box", required=True, type=_parse_box, help="initial target box as cx,cy,w,h")
    parser.add_argument("--sp-size", type=float, default=50.0, help="nominal pixels per superpixel (default 50)")
    parser.add_argument("--bins", type=int, default=8, help="histogram bins per HSV channel (default 8)")
    parser.add_argument(
        "--count-range",
        type=_parse_range,
        default=DEFAULT_COUNT_RANGE,
        help="allowed superpixels per frame as lo,hi (default 100,450)",
    )
    parser.add_argument("--out", required=True, help="output sequence file (JSONL)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = ingest_video(
            args.video,
            args.box,
            args.out,
            pixels_per_superpixel=args.sp_size,
            bins=args.bins,
            count_range=args.count_range,
        )
    except (IngestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    counts = summary.part_counts
    print(f"wrote {summary.n_frames} frames, {min(counts)}-{max(counts)} parts/frame, canvas {summary.canvas}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
