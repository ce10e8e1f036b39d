"""Command-line entry point: one figure per invocation.

    nvsync-figs KIND INPUT.csv [INPUT.csv ...] -o OUT.png

Exit codes follow the simulator CLI: 0 success, 1 I/O failure, 2 bad
arguments or an input file that does not match the figure kind.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureRecipe, render
from .tables import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nvsync-figs",
        description="render one figure from simulator CSV output",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+", metavar="csv", help="input file(s)")
    parser.add_argument("-o", "--output", required=True, help="image path (.png or .svg)")
    parser.add_argument("--threshold", type=float, default=0.99, help="marked-region level")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)

    try:
        recipe = FigureRecipe(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.output,
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            threshold=args.threshold,
            dpi=args.dpi,
        )
        render(recipe)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
