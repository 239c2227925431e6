"""traceplots render --trace PATH --report PATH --kind KIND --out PATH"""
from __future__ import annotations

import argparse
import sys

from .reader import TraceFormatError
from .render import KINDS, PlotJob, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="traceplots", description="Figures from simulator trace/report files")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--trace", required=True, help="trace CSV path")
    p.add_argument("--report", required=True, help="report key-value file path")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True, help="output image path (.svg or .png)")
    args = parser.parse_args(argv)

    try:
        out = render(PlotJob(trace_path=args.trace, report_path=args.report,
                             kind=args.kind, out_path=args.out))
    except (TraceFormatError, RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
