"""Command-line front end: ``butterfly-atlas <subcommand> ...``.

Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

from .curves import DEFAULT_GRID, classify_symmetry, diagonal_segments, trace_curve
from .errors import InvalidInput, NumericalFailure
from .gaps import label_gap
from .ids import ids_F, trace_below
from .moebius import ProjMat, Rational, factor_word
from .render import RenderConfig, butterfly_rows, fmt, render_butterfly, render_curve, render_similarity_overlay
from .similarity import Similarity, map_point
from .spectrum import band_edges, charpoly_coeffs

__all__ = ["cli_dispatch", "main", "build_parser"]

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # route usage errors to exit code 2 without SystemExit
        raise _ArgumentError(f"{self.prog}: {message}")


def _num(v: float) -> float:
    return float(fmt(v))


def _resolve(path: str) -> str:
    base = os.environ.get("ATLAS_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = _resolve(out)
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _typed(parse: Callable[[str], object], name: str) -> Callable[[str], object]:
    def convert(text: str) -> object:
        try:
            return parse(text)
        except InvalidInput as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    convert.__name__ = name
    return convert


_fraction = _typed(Rational.parse, "fraction")
_matrix = _typed(ProjMat.parse, "matrix")


def _format(args: argparse.Namespace, default: str) -> str:
    return args.format or default


def _cmd_spectrum(args: argparse.Namespace) -> None:
    spec = band_edges(args.theta, method=args.method)
    if _format(args, "json") == "csv":
        rows = [[str(args.theta), k, fmt(lo), fmt(hi)] for k, (lo, hi) in enumerate(spec.bands, start=1)]
        _emit(_csv(["theta", "k", "lo", "hi"], rows), args.out)
    else:
        _emit(_json({
            "theta": str(args.theta),
            "edges": [_num(e) for e in spec.edges],
            "bands": [[_num(lo), _num(hi)] for lo, hi in spec.bands],
        }), args.out)


def _cmd_charpoly(args: argparse.Namespace) -> None:
    poly = charpoly_coeffs(args.theta)
    coeffs = [c if isinstance(c, int) else _num(c) for c in poly.coeffs]
    if _format(args, "json") == "csv":
        rows = [[poly.degree - i, c if isinstance(c, int) else fmt(c)] for i, c in enumerate(poly.coeffs)]
        _emit(_csv(["power", "coefficient"], rows), args.out)
    else:
        _emit(_json({
            "theta": str(args.theta),
            "coefficients": coeffs,
            "integral": poly.integral,
            "polynomial": str(poly),
        }), args.out)


def _cmd_butterfly(args: argparse.Namespace) -> None:
    cfg = RenderConfig(width=args.width, height=args.height, qmax=args.qmax, workers=args.workers)
    fmt_ = _format(args, "svg")
    if fmt_ == "svg":
        _emit(render_butterfly(cfg), args.out)
        return
    rows = butterfly_rows(args.qmax, args.workers)
    if fmt_ == "csv":
        data = [[str(r.theta), k, fmt(lo), fmt(hi)] for r in rows for k, (lo, hi) in enumerate(r.bands, 1)]
        _emit(_csv(["theta", "k", "lo", "hi"], data), args.out)
    else:
        _emit(_json([
            {"theta": str(r.theta), "bands": [[_num(lo), _num(hi)] for lo, hi in r.bands]} for r in rows
        ]), args.out)


def _cmd_similarity(args: argparse.Namespace) -> None:
    sim = Similarity(args.matrix, args.r, args.sign)
    if args.render:
        cfg = RenderConfig(qmax=args.qmax, workers=args.workers)
        _emit(render_similarity_overlay(sim, cfg), args.render)
    if args.theta is None or args.x is None:
        if not args.render:
            raise InvalidInput("similarity needs --theta and --x, or --render")
        return
    res = map_point(sim, args.theta, args.x)
    _emit(_json({
        "theta_out": str(res.theta_out),
        "points": [_num(p) for p in res.points],
        "bands": list(res.band_index_out),
    }), args.out)


def _cmd_factor(args: argparse.Namespace) -> None:
    word = factor_word(args.matrix)
    if _format(args, "text") == "json":
        _emit(_json({"matrix": str(args.matrix), "word": str(word)}), args.out)
    else:
        _emit(f"{word}\n", args.out)


def _cmd_gaps(args: argparse.Namespace) -> None:
    spec = band_edges(args.theta)
    rows = []
    for k in range(1, args.theta.q):
        lab = label_gap(args.theta, k)
        lo, hi = spec.gap(k)
        rows.append([k, lab.s, lab.t, fmt(lo), fmt(hi)])
    if _format(args, "csv") == "json":
        _emit(_json([
            {"k": k, "s": s, "t": t, "lo": _num(lo), "hi": _num(hi)} for k, s, t, lo, hi in rows
        ]), args.out)
    else:
        _emit(_csv(["k", "s", "t", "lo", "hi"], rows), args.out)


def _cmd_curve(args: argparse.Namespace) -> None:
    curve = trace_curve(args.theta_from, args.theta_to, sign=args.sign, N=args.grid,
                        restricted=args.restricted, workers=args.workers)
    summary = {
        "from": str(args.theta_from),
        "to": str(args.theta_to),
        "grid": args.grid,
        "restricted": args.restricted,
        "segments": int(len(curve.segments)),
        "component_count": curve.component_count,
        "symmetry": classify_symmetry(curve),
        "diagonal_segments": diagonal_segments(curve),
    }
    if args.out:
        _emit(render_curve(curve.segments, curve.components), args.out)
    if args.csv:
        rows = [[fmt(a), fmt(b), fmt(c), fmt(d), int(comp)]
                for (a, b, c, d), comp in zip(curve.segments, curve.components)]
        _emit(_csv(["x1", "y1", "x2", "y2", "component_id"], rows), args.csv)
    sys.stdout.write(_json(summary))


def _cmd_ids(args: argparse.Namespace) -> None:
    _emit(f"{fmt(ids_F(args.x))}\n", args.out)


def _cmd_trace(args: argparse.Namespace) -> None:
    _emit(f"{fmt(trace_below(args.theta, args.x))}\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (relative paths resolve against $ATLAS_OUT_DIR)")
    common.add_argument("--format", choices=["json", "csv", "svg", "text"], help="output format")

    parser = _Parser(prog="butterfly-atlas", description="Rational Hofstadter butterfly atlas")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    handlers: Dict[str, Callable[[argparse.Namespace], None]] = {}

    def add(name: str, fn: Callable[[argparse.Namespace], None], help_: str) -> argparse.ArgumentParser:
        handlers[name] = fn
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("spectrum", _cmd_spectrum, "band edges at theta = p/q")
    p.add_argument("--theta", type=_fraction, required=True)
    p.add_argument("--method", choices=["eig", "bisect"], default="eig")

    p = add("charpoly", _cmd_charpoly, "coefficients of P_theta")
    p.add_argument("--theta", type=_fraction, required=True)

    p = add("butterfly", _cmd_butterfly, "Farey sweep of the whole butterfly")
    p.add_argument("--qmax", type=int, default=30)
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=800)
    p.add_argument("--workers", type=int, default=None)

    p = add("similarity", _cmd_similarity, "apply S_{M,r,sign} to a point or render its image")
    p.add_argument("--matrix", type=_matrix, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--theta", type=_fraction)
    p.add_argument("--x", type=float)
    p.add_argument("--render", help="write the overlay SVG to this file")
    p.add_argument("--qmax", type=int, default=20)
    p.add_argument("--workers", type=int, default=None)

    p = add("factor", _cmd_factor, "factor a semigroup matrix into A and B")
    p.add_argument("--matrix", type=_matrix, required=True)

    p = add("gaps", _cmd_gaps, "gap labels (s, t) with gap intervals")
    p.add_argument("--theta", type=_fraction, required=True)

    p = add("curve", _cmd_curve, "trace P_from(x) + sign P_to(y) = 0")
    p.add_argument("--from", dest="theta_from", type=_fraction, required=True)
    p.add_argument("--to", dest="theta_to", type=_fraction, required=True)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--restricted", action="store_true")
    p.add_argument("--csv")
    p.add_argument("--workers", type=int, default=None)

    p = add("ids", _cmd_ids, "integrated density of states F(x)")
    p.add_argument("--x", type=float, required=True)

    p = add("trace", _cmd_trace, "trace of the spectral projection below x")
    p.add_argument("--theta", type=_fraction, required=True)
    p.add_argument("--x", type=float, required=True)

    parser.set_defaults(_handlers=handlers)
    return parser


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args._handlers[args.command](args)
    except (_ArgumentError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
