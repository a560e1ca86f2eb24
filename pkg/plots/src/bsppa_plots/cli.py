"""Render convergence figures from solver traces.

    plot --spec figure.json

The spec file lists trace CSVs with labels, the metric to plot, and the
output image path. Exit codes: 0 on success, 2 on a bad spec or unreadable
trace.
"""

import argparse
import sys

from .render import BadFigureSpec, load_spec, render_convergence
from .traces import EmptyTrace, SchemaMismatch


def main(argv=None):
    parser = argparse.ArgumentParser(prog="plot", description=__doc__)
    parser.add_argument("--spec", required=True, help="figure spec JSON")
    parser.add_argument("--base-dir", default=".",
                        help="directory trace and output paths are relative to")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        meta = render_convergence(spec, base_dir=args.base_dir)
    except (BadFigureSpec, SchemaMismatch, EmptyTrace, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {meta['image']} ({meta['curve_count']} curves, {meta['y_scale']} y)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
