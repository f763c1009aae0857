"""Command-line front end: ``elitmus check FILE`` and ``elitmus suite DIR``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, ModelConfig
from .harness import DEFAULT_MATRIX, check, run_suite
from .isa import BoundExceeded, ElaborationError
from .litmus import ParseError, load_test

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elitmus", description="Axiomatic checker for exception and SGI litmus tests.")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="check one test")
    c.add_argument("file")
    c.add_argument("--exs", action="store_true", help="implement FEAT_ExS (clears EIS and EOS unless given)")
    c.add_argument("--eis", action="store_true", help="with --exs: exception entry stays context synchronising")
    c.add_argument("--eos", action="store_true", help="with --exs: exception return stays context synchronising")
    c.add_argument("--sea-r", action="store_true")
    c.add_argument("--sea-w", action="store_true")
    c.add_argument("--no-ets2", action="store_true")
    c.add_argument("--eoimode", type=int, choices=(0, 1), default=0)
    c.add_argument("--gic", action="store_true", help="force the GIC extension on")
    c.add_argument("--json", action="store_true")
    c.add_argument("--witness", action="store_true", help="print an allowing execution")
    c.add_argument("--max-candidates", type=int, default=ModelConfig.max_candidates)

    s = sub.add_parser("suite", help="check every .elitmus file in a directory")
    s.add_argument("dir")
    s.add_argument("--matrix", default=",".join(DEFAULT_MATRIX))
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--json", action="store_true")
    return p


def _config(args) -> ModelConfig:
    if (args.eis or args.eos) and not args.exs:
        raise ConfigError("--eis/--eos require --exs")
    return ModelConfig(
        feat_exs=args.exs, eis=args.eis or not args.exs, eos=args.eos or not args.exs,
        sea_r=args.sea_r, sea_w=args.sea_w, ets2=not args.no_ets2, eoimode=args.eoimode,
        gic_extension=True if args.gic else None, max_candidates=args.max_candidates,
    )


def _variant_name(cfg: ModelConfig) -> str:
    flags = []
    if cfg.feat_exs:
        flags.append({(False, False): "exs", (True, False): "eis", (False, True): "eos"}.get((cfg.eis, cfg.eos), "exs"))
    if cfg.sea_r and cfg.sea_w:
        flags.append("sea_rw")
    elif cfg.sea_r or cfg.sea_w:
        flags.append("sea_r" if cfg.sea_r else "sea_w")
    if not cfg.ets2:
        flags.append("no_ets2")
    if cfg.eoimode:
        flags.append("eoimode1")
    return "+".join(flags) or "default"


def cmd_check(args) -> int:
    try:
        cfg = _config(args)
        test = load_test(args.file)
    except (ConfigError, OSError) as e:
        print(f"elitmus: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        for d in e.diagnostics:
            print(f"{args.file}:{d}", file=sys.stderr)
        return EXIT_USAGE
    try:
        v = check(test, cfg)
    except BoundExceeded as e:
        print(f"elitmus: resource bound: {e}", file=sys.stderr)
        return EXIT_BOUND
    except ElaborationError as e:
        print(f"elitmus: {e}", file=sys.stderr)
        return EXIT_USAGE
    variant = _variant_name(cfg)
    expected = test.expectation(variant)
    out = v.to_json(variant, expected)
    if args.json:
        if args.witness and v.witness is not None:
            out["witness"] = v.witness.describe()
        print(json.dumps(out, indent=2))
    else:
        print(f"{test.name} [{variant}]: {v.outcome}"
              f" (expected {expected or '-'}; {v.candidates_consistent}/{v.candidates_total} consistent,"
              f" {v.time_ms:.1f} ms)")
        if args.witness and v.witness is not None:
            print("\n".join("  " + line for line in v.witness.describe()))
    return EXIT_OK if out["match"] else EXIT_MISMATCH


def cmd_suite(args) -> int:
    matrix = [m.strip() for m in args.matrix.split(",") if m.strip()]
    try:
        for m in matrix:
            ModelConfig.variant(m)
    except ConfigError as e:
        print(f"elitmus: {e}", file=sys.stderr)
        return EXIT_USAGE
    report = run_suite(args.dir, matrix, jobs=max(1, args.jobs))
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.table())
    return report.exit_code


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    return cmd_check(args) if args.cmd == "check" else cmd_suite(args)


if __name__ == "__main__":
    sys.exit(main())
