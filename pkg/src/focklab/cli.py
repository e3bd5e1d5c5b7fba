"""Command-line surface.

Structured results go to JSON, scans and series to CSV; every run with an
output path also writes a manifest (command line, resolved config and its
hash, seed, library versions) so the run can be replayed bit-exactly with
the ``rerun`` subcommand.  Errors are emitted to stderr as single-line JSON.

Exit codes: 0 success, 1 usage error, 2 numerical diagnostic failure,
3 inconclusive verdict under --strict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy
import scipy

from . import __version__
from .berezin import berezin_from_matrix, heat_transform_measure, heat_transform_symbol
from .config import DEFAULTS
from .errors import DiagnosticError, SymbolParseError
from .fock import FockParams, polar_grid
from .parallel import parallel_map
from .spectra import (ess_positivity_limitops, ess_positivity_radial,
                      ess_positivity_vo, hermitian_eigs, report_to_json_dict)
from .toeplitz import assemble, load_matrix, matrix_to_json_dict, operator_norm
from .experiments import (counterexample_note, counterexample_table,
                          search_minimize, search_result_to_json_dict)
from . import selftest as selftest_mod
from . import symbols as sym

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIAGNOSTIC = 2
EXIT_INCONCLUSIVE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # route argparse failures through the single-line JSON error channel
    def error(self, message):
        raise _UsageError(message)


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": message, "type": kind}) + "\n")
    return code


def _config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()


def _write_manifest(out_path: Path, command: str, argv: list[str], config: dict,
                    seed: int | None, outputs: list[str], notes: str | None = None) -> None:
    manifest = {
        "tool": "focklab",
        "tool_version": __version__,
        "command": command,
        "argv": argv,
        "config": config,
        "config_hash": _config_hash(config),
        "seed": seed,
        "outputs": outputs,
        "versions": {
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
    }
    if notes is not None:
        manifest["notes"] = notes
    path = out_path.with_suffix(out_path.suffix + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _parse_floats(raw: str) -> list[float]:
    return [float(x) for x in raw.replace("−", "-").split(",") if x.strip()]


def _parse_points(raw: str) -> list[float]:
    if raw.startswith("lin:"):
        parts = raw.split(":")
        if len(parts) != 4:
            raise ValueError("grid spec is lin:<start>:<stop>:<count>")
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        return [float(x) for x in numpy.linspace(start, stop, count)]
    path = Path(raw)
    if path.exists():
        return [float(line) for line in path.read_text().split() if line.strip()]
    return _parse_floats(raw)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="focklab", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--threads", type=int, default=1,
                        help="cap on worker threads for scans (outputs are thread-count independent)")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("assemble", help="assemble a truncated operator matrix")
    s.add_argument("--symbol", required=True)
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--dim", type=int, default=64)
    s.add_argument("--radial", type=int, default=None, help="radial quadrature order")
    s.add_argument("--angular", type=int, default=None, help="angular point count")
    s.add_argument("--out", default=None)

    s = subs.add_parser("eigs", help="eigenvalues of a stored hermitian matrix")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", default=None)

    s = subs.add_parser("berezin", help="Berezin/heat transform scan along the real axis")
    s.add_argument("--symbol", default=None)
    s.add_argument("--in", dest="infile", default=None)
    s.add_argument("--points", required=True,
                   help="comma list, lin:<start>:<stop>:<count>, or a file of radii")
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--dim", type=int, default=64)
    s.add_argument("--out", default=None)

    s = subs.add_parser("esspos", help="essential-positivity verdict")
    s.add_argument("--symbol", required=True)
    s.add_argument("--mode", choices=["radial", "vo", "limitops"], required=True)
    s.add_argument("--tau", type=float, default=DEFAULTS.tau)
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--dim", type=int, default=None)
    s.add_argument("--radii", default=None, help="comma-separated probe radii")
    s.add_argument("--theta-count", type=int, default=DEFAULTS.theta_count)
    s.add_argument("--strict", action="store_true",
                   help="exit 3 when the verdict is inconclusive")
    s.add_argument("--out", default=None)

    s = subs.add_parser("counterexample",
                        help="essential norm vs Berezin sup for phase symbols")
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--radii", default="0,1,2,3")
    s.add_argument("--dim", type=int, default=100)
    s.add_argument("--out", default=None)

    s = subs.add_parser("search", help="seeded ratio-objective search over ring profiles")
    s.add_argument("--rings", type=int, required=True)
    s.add_argument("--rmax", type=float, required=True)
    s.add_argument("--iters", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--t", type=float, default=2.0)
    s.add_argument("--dim", type=int, default=DEFAULTS.search_dim)
    s.add_argument("--out", default=None)

    subs.add_parser("selftest", help="run the quick invariant suite")

    s = subs.add_parser("rerun", help="replay a recorded manifest")
    s.add_argument("--manifest", required=True)

    return parser


def _emit(text: str, out: str | None) -> list[str]:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return []
    Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    return [out]


def _cmd_assemble(args, argv) -> int:
    symbol = sym.parse_symbol(args.symbol)
    p = FockParams(t=args.t, dim=args.dim)
    grid = None
    if args.radial is not None or args.angular is not None:
        grid = polar_grid(args.radial or DEFAULTS.n_radial,
                          args.angular or DEFAULTS.angular_factor * args.dim)
    A = assemble(symbol, p, grid)
    text = json.dumps(matrix_to_json_dict(A))
    outputs = _emit(text, args.out)
    if args.out:
        config = {"symbol": args.symbol, "t": args.t, "dim": args.dim,
                  "radial": args.radial, "angular": args.angular}
        _write_manifest(Path(args.out), "assemble", argv, config, None, outputs)
    return EXIT_OK


def _cmd_eigs(args, argv) -> int:
    A = load_matrix(args.infile)
    if not A.hermitian:
        raise ValueError("input matrix is not hermitian")
    eigs = hermitian_eigs(A)
    lines = ["m,lambda"] + [f"{m},{float(v)!r}" for m, v in enumerate(eigs)]
    outputs = _emit("\n".join(lines), args.out)
    if args.out:
        _write_manifest(Path(args.out), "eigs", argv, {"infile": args.infile}, None, outputs)
    return EXIT_OK


def _cmd_berezin(args, argv, threads: int) -> int:
    if (args.symbol is None) == (args.infile is None):
        raise ValueError("give exactly one of --symbol or --in")
    points = _parse_points(args.points)
    rows: list[tuple[float, float, float, float]] = []
    if args.infile is not None:
        A = load_matrix(args.infile)
        norm = operator_norm(A)

        def eval_point(s: float):
            bv = berezin_from_matrix(A, complex(s), op_norm=norm)
            return (s, bv.value.real, bv.value.imag, bv.tail_bound)

        rows = parallel_map(eval_point, points, threads)
    else:
        symbol = sym.parse_symbol(args.symbol)
        p = FockParams(t=args.t, dim=args.dim)
        if isinstance(symbol, sym.AtomicMeasure):
            def eval_point(s: float):
                value = heat_transform_measure(symbol.measure, complex(s), p)
                return (s, value, 0.0, 0.0)
        else:
            def eval_point(s: float):
                value = complex(heat_transform_symbol(symbol, complex(s), p))
                return (s, value.real, value.imag, DEFAULTS.refine_tol)

        rows = parallel_map(eval_point, points, threads)
    lines = ["s,re,im,tail_bound"]
    lines += [f"{s!r},{re!r},{im!r},{tb!r}" for s, re, im, tb in rows]
    outputs = _emit("\n".join(lines), args.out)
    if args.out:
        config = {"symbol": args.symbol, "infile": args.infile,
                  "points": args.points, "t": args.t, "dim": args.dim}
        _write_manifest(Path(args.out), "berezin", argv, config, None, outputs)
    return EXIT_OK


def _cmd_esspos(args, argv, threads: int) -> int:
    symbol = sym.parse_symbol(args.symbol)
    tau = args.tau
    if args.mode == "radial":
        if not isinstance(symbol, sym.Radial):
            raise ValueError("radial mode needs a radial symbol")
        dim = args.dim or 128
        report = ess_positivity_radial(symbol.profile, FockParams(t=args.t, dim=dim), tau)
    elif args.mode == "vo":
        dim = args.dim or 64
        radii = tuple(_parse_floats(args.radii)) if args.radii else DEFAULTS.vo_radii
        report = ess_positivity_vo(symbol, FockParams(t=args.t, dim=dim), radii, tau)
    else:
        dim = args.dim or 80
        radii = tuple(_parse_floats(args.radii)) if args.radii else DEFAULTS.limitop_radii
        report = ess_positivity_limitops(symbol, FockParams(t=args.t, dim=dim),
                                         theta_count=args.theta_count, radii=radii,
                                         tau=tau, threads=threads)
    text = json.dumps(report_to_json_dict(report))
    outputs = _emit(text, args.out)
    if args.out:
        config = {"symbol": args.symbol, "mode": args.mode, "tau": tau,
                  "t": args.t, "dim": dim, "radii": args.radii,
                  "theta_count": args.theta_count}
        _write_manifest(Path(args.out), "esspos", argv, config, None, outputs)
    if args.strict and report.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_counterexample(args, argv, threads: int) -> int:
    radii = _parse_floats(args.radii)
    rows = counterexample_table(args.t, radii, args.dim, threads=threads)
    note = counterexample_note(rows, args.t)
    lines = ["absz,ess_exact,ess_numeric,berezin_sup,ratio"]
    lines += [f"{r.absz!r},{r.ess_norm_exact!r},{r.ess_norm_numeric!r},"
              f"{r.berezin_sup!r},{r.ratio!r}" for r in rows]
    outputs = _emit("\n".join(lines), args.out)
    sys.stdout.write(note + "\n")
    if args.out:
        config = {"t": args.t, "radii": args.radii, "dim": args.dim}
        _write_manifest(Path(args.out), "counterexample", argv, config, None,
                        outputs, notes=note)
    return EXIT_OK


def _cmd_search(args, argv, threads: int) -> int:
    p = FockParams(t=args.t, dim=args.dim)
    result = search_minimize(args.rings, args.rmax, args.iters, args.seed,
                             p=p, threads=threads)
    text = json.dumps(search_result_to_json_dict(result), indent=2, sort_keys=True)
    outputs = _emit(text, args.out)
    if args.out:
        config = {k: (list(v) if isinstance(v, tuple) else v) for k, v in result.config}
        _write_manifest(Path(args.out), "search", argv, config, args.seed, outputs)
    return EXIT_OK


def _cmd_rerun(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    return run(list(manifest["argv"]))


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "assemble":
            return _cmd_assemble(args, argv)
        if args.command == "eigs":
            return _cmd_eigs(args, argv)
        if args.command == "berezin":
            return _cmd_berezin(args, argv, args.threads)
        if args.command == "esspos":
            return _cmd_esspos(args, argv, args.threads)
        if args.command == "counterexample":
            return _cmd_counterexample(args, argv, args.threads)
        if args.command == "search":
            return _cmd_search(args, argv, args.threads)
        if args.command == "selftest":
            return selftest_mod.run_selftest()
        if args.command == "rerun":
            return _cmd_rerun(args)
        return _fail("usage", f"unknown command {args.command!r}", EXIT_USAGE)
    except SymbolParseError as exc:
        return _fail("parse", str(exc), EXIT_USAGE)
    except (ValueError, TypeError, OSError, KeyError) as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except DiagnosticError as exc:
        return _fail("diagnostic", str(exc), EXIT_DIAGNOSTIC)


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
