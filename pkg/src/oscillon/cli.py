"""Command-line front end.

Exit codes: 0 success or pass, 2 validation suite failed, 3 budget exhausted
(or the source ran out of bits), 4 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, fields

from .bitstream import CsprngSource, FileSource, IndexBeyondFile
from .exactnum import Dyadic, parse_dyadic
from .gauss import CutoffExceeded
from .harness import (SuiteConfig, ks_arcsine, validate_distinct_minima, validate_symmetry,
                      validate_walks)
from .levypath import PathEvaluator, TailBoundViolation, TruncatedXi
from .minimizers import Exhausted, enumerate_minimizers, locate_minimizer
from .oracle import Budget, Verdict
from .walks import code_of_path, sup_distance

EXIT_OK, EXIT_FAIL, EXIT_EXHAUSTED, EXIT_USAGE = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dyadic(text: str) -> Dyadic:
    try:
        return parse_dyadic(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _levels(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a, b = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected j1..j2, got {text!r}") from None
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")
    return range(a, b + 1)


@dataclass
class RunConfig:
    seed_hex: str | None = None
    seed_file: str | None = None
    cyclic: bool = False
    truncated: str | None = None
    budget_bits: int = 64
    format: str = "json"
    output: str | None = None

    def source_count(self) -> int:
        return sum(x is not None for x in (self.seed_hex, self.seed_file, self.truncated))

    def evaluator(self) -> PathEvaluator:
        if self.source_count() != 1:
            raise UsageError("exactly one of --seed-hex, --seed-file, --truncated is required")
        if self.seed_hex is not None:
            if len(self.seed_hex) != 64:
                raise UsageError("--seed-hex needs exactly 64 hex characters")
            try:
                return PathEvaluator.stochastic(CsprngSource.from_hex(self.seed_hex))
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        if self.seed_file is not None:
            return PathEvaluator.stochastic(FileSource.open(self.seed_file, cyclic=self.cyclic))
        with open(self.truncated) as fh:
            return PathEvaluator.truncated(TruncatedXi.from_json(fh.read()))

    def budget(self) -> Budget:
        return Budget(self.budget_bits, max(64, 2 * self.budget_bits))


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("source and output")
    g.add_argument("--seed-hex", help="32-byte csprng seed as 64 hex characters")
    g.add_argument("--seed-file", help="raw bit file, MSB first within each byte")
    g.add_argument("--cyclic", action="store_true", help="let a seed file wrap around")
    g.add_argument("--truncated", help="JSON file with an explicit finite coefficient lattice")
    g.add_argument("--budget-bits", type=int, help="precision cap in bits (>= 8, default 64)")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--output", "-o", help="write here instead of stdout")
    g.add_argument("--config", help="key=value file mirroring the long flags")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="oscillon", description="Certified Brownian paths from bit sources.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", parents=[common], help="dump path enclosures on a dyadic grid")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--eps", type=_dyadic, default=Dyadic(1, -30))

    p = sub.add_parser("minimize", parents=[common], help="localize the minimizer on an interval")
    p.add_argument("--interval", nargs=2, type=_dyadic, default=[Dyadic(0), Dyadic(1)],
                   metavar=("A", "B"))
    p.add_argument("--width", type=_dyadic, default=Dyadic(1, -20))

    p = sub.add_parser("enumerate", parents=[common], help="staged enumeration of local minimizers")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--width", type=_dyadic)

    p = sub.add_parser("walks", parents=[common], help="walk codes and sup distances")
    p.add_argument("--levels", type=_levels, required=True, help="j1..j2")
    p.add_argument("--eps", type=_dyadic, default=Dyadic(1, -10))

    p = sub.add_parser("validate", parents=[common], help="Monte Carlo validation suites")
    p.add_argument("suite", choices=("arcsine", "distinct", "symmetry", "walks"))
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--level", type=int)
    p.add_argument("--levels", type=_levels)
    p.add_argument("--base-seed", type=int, default=0)
    for f in fields(SuiteConfig):
        p.add_argument("--" + f.name.replace("_", "-"), type=float, dest=f.name)
    return parser


def _read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key=value")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _config_argv(path: str) -> list[str]:
    argv = []
    for key, value in _read_config(path).items():
        flag = "--" + key.replace("_", "-")
        if key == "cyclic":
            if value.lower() in ("1", "true", "yes"):
                argv.append(flag)
        elif key == "interval":
            argv += [flag, *value.split()]
        else:
            argv += [flag, value]
    return argv


def _run_config(args) -> RunConfig:
    cfg = RunConfig(args.seed_hex, args.seed_file, args.cyclic, args.truncated,
                    args.budget_bits if args.budget_bits is not None else 64,
                    args.format or "json", args.output)
    if cfg.budget_bits < 8:
        raise UsageError("--budget-bits must be >= 8")
    if cfg.source_count() > 1:
        raise UsageError("give only one of --seed-hex, --seed-file, --truncated")
    return cfg


def _emit_rows(rows: list[dict], fmt: str, out) -> None:
    if fmt == "csv":
        if rows:
            w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    else:
        for r in rows:
            out.write(json.dumps(r) + "\n")


def _cmd_sample(args, cfg: RunConfig, out) -> int:
    if args.level < 0:
        raise UsageError("--level must be >= 0")
    _emit_rows(cfg.evaluator().dump(args.level, args.eps), cfg.format, out)
    return EXIT_OK


def _cmd_minimize(args, cfg: RunConfig, out) -> int:
    a, b = args.interval
    if not (0 <= a < b <= 1):
        raise UsageError("--interval needs 0 <= A < B <= 1")
    rec = locate_minimizer(cfg.evaluator(), (a, b), args.width, cfg.budget())
    if isinstance(rec, Exhausted):
        print(f"budget exhausted at {rec.precision} bits; surviving span {rec.span}",
              file=sys.stderr)
        return EXIT_EXHAUSTED
    _emit_rows([rec.as_json()], cfg.format, out)
    return EXIT_OK


def _cmd_enumerate(args, cfg: RunConfig, out) -> int:
    if args.stages < 0:
        raise UsageError("--stages must be >= 0")
    res = enumerate_minimizers(cfg.evaluator(), args.stages, cfg.budget(), args.width)
    _emit_rows([r.as_json() for r in res.records], cfg.format, out)
    if not res.complete:
        print(f"budget exhausted at stage {res.exhausted_stage}", file=sys.stderr)
        return EXIT_EXHAUSTED
    return EXIT_OK


def _cmd_walks(args, cfg: RunConfig, out) -> int:
    ev = cfg.evaluator()
    rows = []
    for j in args.levels:
        code = code_of_path(ev, j, cfg.budget())
        if isinstance(code, Verdict):
            _emit_rows(rows, cfg.format, out)
            print(f"walk code at level {j} exhausted the budget", file=sys.stderr)
            return EXIT_EXHAUSTED
        d = sup_distance(ev, code, args.eps)
        rows.append({"j": j, "n": code.n, "sup_lo": str(d.lo), "sup_hi": str(d.hi),
                     "code": code.bits})
    _emit_rows(rows, cfg.format, out)
    return EXIT_OK


def _cmd_validate(args, cfg: RunConfig, out) -> int:
    overrides = {f.name: getattr(args, f.name) for f in fields(SuiteConfig)
                 if getattr(args, f.name) is not None}
    conf = SuiteConfig(**overrides)
    N = args.trials
    try:
        if args.suite == "arcsine":
            rep = ks_arcsine(N, args.level if args.level is not None else 12, args.base_seed,
                             budget_bits=cfg.budget_bits, config=conf)
        elif args.suite == "distinct":
            rep = validate_distinct_minima(N, cfg.budget_bits if args.budget_bits else 60,
                                           args.base_seed, conf)
        elif args.suite == "symmetry":
            rep = validate_symmetry(N, args.level if args.level is not None else 8,
                                    args.base_seed, config=conf)
        else:
            rep = validate_walks(N, args.levels or range(6, 13), args.base_seed,
                                 cfg.budget_bits, config=conf)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.format == "csv":
        rep.write_csv(out)
    else:
        out.write(rep.to_json() + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"sample": _cmd_sample, "minimize": _cmd_minimize, "enumerate": _cmd_enumerate,
            "walks": _cmd_walks, "validate": _cmd_validate}


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    try:
        known, _ = pre.parse_known_args(argv)
        if known.config and argv and not argv[0].startswith("-"):
            # config values go right after the subcommand so explicit flags win
            argv = argv[:1] + _config_argv(known.config) + argv[1:]
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, OSError) as exc:
        print(f"oscillon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _run_config(args)
        if args.command != "validate" and cfg.source_count() != 1:
            raise UsageError("a source is required: --seed-hex, --seed-file or --truncated")
        out = open(cfg.output, "w", newline="") if cfg.output else sys.stdout
        try:
            return COMMANDS[args.command](args, cfg, out)
        finally:
            if cfg.output:
                out.close()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"oscillon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"oscillon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IndexBeyondFile, TailBoundViolation, CutoffExceeded) as exc:
        print(f"oscillon: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
