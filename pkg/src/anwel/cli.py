"""Command-line front end: ``anwel table | count | invariance``.

Exit codes: 0 success, 2 mathematical mismatch or non-invariance,
3 numerical failure, 64 usage error, 74 output file error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

from anwel.counts import (
    closed_form_table,
    count_stratum,
    invariance_experiment,
    report_to_dict,
    row_matches,
    verdict_to_dict,
    REAL_TOL,
)
from anwel.errors import AnwelError, BadIndices
from anwel.singularity import AnFamily, delta_invariant

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64
EXIT_IO = 74

TABLE_COLUMNS = ("n", "form", "stratum", "mt_computed", "mt_formula", "W_computed", "W_formula")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    i: int | None = None
    k: int | None = None
    form: str | None = None
    stratum: str | None = None
    trials: int = 20
    epsilon: float = 1e-3
    seed: int = 0
    tol: float = REAL_TOL
    output_format: str = "json"
    output_path: str | None = None
    trial: int = 0


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".eE"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return _fmt_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(rows: list, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt_float(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument handling


def _family(n: int, form: str | None) -> AnFamily:
    if form is None:
        return AnFamily.default(n)
    try:
        return AnFamily(n, form)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _seed_default() -> int:
    raw = os.environ.get("ANWEL_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise UsageError(f"ANWEL_SEED is not an integer: {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anwel", description="Signed real counts on strata of A_n deformations.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials_default=None):
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (default: $ANWEL_SEED or 0)")
        sp.add_argument("--epsilon", type=float, default=1e-3, help="slice scale")
        sp.add_argument("--format", dest="output_format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("-o", "--output", dest="output_path", default=None)
        if trials_default is not None:
            sp.add_argument("--trials", type=int, default=trials_default)

    t = sub.add_parser("table", help="computed multiplicities and W beside the closed forms")
    t.add_argument("--n-max", type=int, default=6)
    common(t, trials_default=3)

    for name, trials in (("count", None), ("invariance", 20)):
        sp = sub.add_parser(name)
        sp.add_argument("--stratum", choices=("eg", "ec", "discr"), required=True)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--i", type=int, default=None)
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--form", choices=("h", "e", "even"), default=None)
        sp.add_argument("--tol", type=float, default=REAL_TOL, help="realness tolerance")
        if name == "count":
            sp.add_argument("--trial", type=int, default=0, help="slice index within the seed stream")
        common(sp, trials_default=trials)
    return p


def parse_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    seed = args.seed if args.seed is not None else _seed_default()
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be in [0, 2^64)")
    if not (args.epsilon > 0 and math.isfinite(args.epsilon)):
        raise UsageError("epsilon must be > 0")
    base = dict(command=args.command, seed=seed, epsilon=args.epsilon,
                output_format=args.output_format, output_path=args.output_path)
    if args.command == "table":
        if args.n_max < 1:
            raise UsageError("--n-max must be >= 1")
        if args.trials < 2:
            raise UsageError("--trials must be >= 2")
        return RunConfig(n=args.n_max, trials=args.trials, **base)

    n, k = args.n, args.k
    if args.stratum == "ec":
        if k is None and n is None:
            raise UsageError("ec needs --k or --n")
        if k is None:
            if n % 2:
                raise UsageError("EC is only defined separately for even n")
            k = n // 2
        if k < 1:
            raise UsageError("--k must be >= 1")
        if n is not None and n != 2 * k:
            raise UsageError("--n must equal 2k")
        n = 2 * k
    if n is None:
        raise UsageError("--n is required")
    if n < 1:
        raise UsageError("--n must be >= 1")
    i = args.i
    if args.stratum == "eg":
        if i is None:
            i = delta_invariant(n)
        if not 1 <= i <= delta_invariant(n):
            raise UsageError(f"--i must satisfy 1 <= i <= {delta_invariant(n)}")
    elif i is not None:
        raise UsageError("--i only applies to the eg stratum")
    trials = getattr(args, "trials", None)
    if args.command == "invariance" and trials < 2:
        raise UsageError("--trials must be >= 2")
    if args.tol <= 0:
        raise UsageError("--tol must be > 0")
    _family(n, args.form)
    extra = dict(trial=args.trial) if args.command == "count" else dict(trials=trials)
    if args.command == "count" and args.trial < 0:
        raise UsageError("--trial must be >= 0")
    return RunConfig(n=n, i=i, k=k if args.stratum == "ec" else None, form=args.form,
                     stratum=args.stratum, tol=args.tol, **extra, **base)


# ---------------------------------------------------------------------------
# commands


def _table_text(rows: list) -> str:
    cells = [[str(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(c), *(len(row[j]) for row in cells)) for j, c in enumerate(TABLE_COLUMNS)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(TABLE_COLUMNS, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines)


def cmd_table(cfg: RunConfig) -> int:
    rows = closed_form_table(cfg.n, seed=cfg.seed, trials=cfg.trials, epsilon=cfg.epsilon)
    if cfg.output_format == "json":
        _emit(dumps(rows), cfg)
    elif cfg.output_format == "csv":
        _emit(_csv(rows, TABLE_COLUMNS), cfg)
    else:
        _emit(_table_text(rows), cfg)
    bad = [r for r in rows if not row_matches(r)]
    for r in bad:
        print(f"mismatch: {r}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def _count_text(d: dict) -> str:
    lines = [
        f"{d['stratum']} of A_{d['n']} (form {d['form']}), seed {d['seed']}, epsilon {d['epsilon']}",
        f"complex solutions: {d['complex_count']} (expected {d['expected_multiplicity']})",
        f"real solutions: {len(d['real_solutions'])}",
    ]
    for s in d["real_solutions"]:
        kinds = ", ".join(rec["kind"] for rec in s["inventory"])
        lines.append(f"  sign {s['sign']:+d}: {kinds}")
    lines.append(f"W = {d['W']}  (resamples: {d['resamples']})")
    return "\n".join(lines)


def cmd_count(cfg: RunConfig) -> int:
    fam = _family(cfg.n, cfg.form)
    report = count_stratum(fam, cfg.stratum, i=cfg.i, seed=cfg.seed, epsilon=cfg.epsilon,
                           trial=cfg.trial, tol=cfg.tol)
    d = report_to_dict(report)
    if cfg.output_format == "json":
        _emit(dumps(d), cfg)
    elif cfg.output_format == "csv":
        row = {k: v for k, v in d.items() if k != "real_solutions"}
        row["real_count"] = len(d["real_solutions"])
        _emit(_csv([row], list(row)), cfg)
    else:
        _emit(_count_text(d), cfg)
    return EXIT_OK


def cmd_invariance(cfg: RunConfig) -> int:
    fam = _family(cfg.n, cfg.form)
    verdict = invariance_experiment(fam, cfg.stratum, i=cfg.i, trials=cfg.trials,
                                    epsilon=cfg.epsilon, seed=cfg.seed, tol=cfg.tol)
    d = verdict_to_dict(verdict)
    if cfg.output_format == "json":
        _emit(dumps(d), cfg)
    elif cfg.output_format == "csv":
        rows = [dict(trial=t, W=w, real_count=r.real_count, resamples=r.resamples)
                for t, (w, r) in enumerate(zip(verdict.W_values, verdict.reports))]
        _emit(_csv(rows, ("trial", "W", "real_count", "resamples")), cfg)
    else:
        hist = ", ".join(f"{k} real: {c}" for k, c in verdict.real_count_histogram.items())
        _emit("\n".join([
            f"{d['stratum']} of A_{d['n']} (form {d['form']}), {d['trials']} trials, epsilon {d['epsilon']}",
            f"W values: {d['W_values']}",
            f"invariant: {'yes' if d['invariant'] else 'no'}",
            f"real-count histogram: {hist}",
        ]), cfg)
    if not verdict.invariant:
        print("non-invariant trials:", json.dumps(d["offending"]), file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


COMMANDS = {"table": cmd_table, "count": cmd_count, "invariance": cmd_invariance}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, BadIndices) as exc:
        print(f"anwel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except (UsageError, BadIndices) as exc:
        print(f"anwel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AnwelError, ArithmeticError) as exc:
        print(f"anwel: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"anwel: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
