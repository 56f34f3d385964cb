"""Command line entry point.

    crossdiff run --config exp1.ini [--method both] [--preset exp1] [--n 200] [--out results]
    crossdiff validate --config exp1.ini
    crossdiff presets

Exit codes: 0 success, 1 invalid configuration, 2 solver failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import config as _config
from .errors import CrossDiffError, NonConvergenceError, ParseError, SolverFailure, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3


def _load(args) -> _config.RunConfig:
    raw = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = _config._parse_text(fh.read())
    elif not getattr(args, "preset", None):
        raise ValidationError("either --config or --preset is required", ["config"])
    for flag, key in (("preset", ("run", "preset")), ("method", ("run", "method")),
                      ("n", ("run", "n")), ("out", ("run", "out"))):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    return _config.resolve(raw)


def cmd_run(args) -> int:
    from .pipeline import run

    cfg = _load(args)
    result = run(cfg)
    for key, rows in result.reports.items():
        final = rows[-1]
        print(f"{key}: t={final['time']:.6g} e1={final['e1']:.4e} e2={final['e2']:.4e} "
              f"mrse={final['mrse']:.4e}")
    for key, value in result.extras.items():
        print(f"{key}: {value:.6g}")
    print(f"wrote {len(result.files)} files to {cfg.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    print(_config.dump_config(cfg), end="")
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in _config.PRESETS[:-1]:
        cfg = _config.preset_config(name, n=args.n)
        print(f"# preset {name} (n = {args.n})")
        print(_config.dump_config(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crossdiff", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulation")
    p.add_argument("--config")
    p.add_argument("--method", choices=_config.METHODS)
    p.add_argument("--preset", choices=_config.PRESETS)
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="resolve and print a configuration")
    p.add_argument("--config")
    p.add_argument("--preset", choices=_config.PRESETS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list resolved preset defaults")
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, ParseError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NonConvergenceError, SolverFailure) as exc:
        step = getattr(exc, "step", None)
        where = f" at step {step}" if step is not None else ""
        print(f"solver failure{where}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CrossDiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
