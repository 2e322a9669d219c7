"""Command line front end: `iabplots render --spec <file>`."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .render import RenderError, load_figure_spec, render_figure

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_IO = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="iabplots", description="Render sweep CSVs into figures")
    parser.add_argument("--version", action="version", version=f"iabplots {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    render_p = sub.add_parser("render", help="render one figure from a spec file")
    render_p.add_argument("--spec", required=True, help="figure spec JSON")
    args = parser.parse_args(argv)
    try:
        spec = load_figure_spec(args.spec)
        print(render_figure(spec))
        return EXIT_OK
    except RenderError as exc:
        print(f"iabplots: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"iabplots: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
