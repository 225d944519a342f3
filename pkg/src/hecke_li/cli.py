"""Command-line front end.

Subcommands: dim, trace, tau, tau-f, tau-zeros, selfcheck, precompute.
Configuration comes from an optional `key = value` file (--config),
overridden by flags; the cache directory may also come from the
HECKE_LI_CACHE environment variable.  Exit codes: 0 success, 1 usage,
2 internal inconsistency, 3 missing resources.  All floats print with 12
significant digits so regression diffs stay meaningful.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

from . import checks, li, modforms as mf, quadform, trace as tr, zeros as zs
from .errors import (
    DomainError,
    InternalInconsistencyError,
    ResourceLimitError,
    ZeroFileParseError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_MISSING = 3

CONFIG_KEYS = {
    "level",
    "nmax",
    "cutoff",
    "cache_dir",
    "format",
    "zeros",
    "jobs",
    "mu_convention",
    "tau_convention",
}


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _json_ready(obj):
    """Round floats to 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def load_config(path: str) -> dict:
    """Plain `key = value` lines; '#' comments; unknown keys are rejected."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in CONFIG_KEYS:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value.strip()
    return out


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument(
        "--cache-dir", help="cache directory (or $HECKE_LI_CACHE)"
    )
    common.add_argument(
        "--format", choices=("text", "json", "csv"), default=None
    )
    common.add_argument(
        "--jobs", type=int, default=None, help="worker processes"
    )
    common.add_argument(
        "--mu-convention",
        choices=("A", "B", "auto"),
        default=None,
        help="residue-counting convention (auto = suite-selected default)",
    )

    p = _Parser(
        prog="hecke-li",
        parents=[common],
        description=(
            "Workbench for Li-type coefficients of weight-2 Hecke "
            "L-products: traces, class numbers, eta oracles, zeros."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser(
        "dim", parents=[common], help="dimension g and newform count nu"
    )
    d.add_argument("level_range", help="level N or range A-B (<= 10000)")

    t = sub.add_parser(
        "trace", parents=[common], help="Hecke trace with term breakdown"
    )
    t.add_argument("level", type=int)
    t.add_argument("index", help="Hecke index n, or p^k form like 2^5")

    for name, helptext in (
        ("tau", "arithmetic tau for the full level-N product"),
        ("tau-f", "arithmetic tau for the newform at an eta-oracle level"),
    ):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("level", type=int)
        q.add_argument("--nmax", type=int, default=None)
        q.add_argument("--cutoff", type=float, default=None)

    z = sub.add_parser(
        "tau-zeros", parents=[common], help="tau partial sums from a zero file"
    )
    z.add_argument("zero_file")
    z.add_argument("--nmax", type=int, default=None)
    z.add_argument(
        "--tau-convention", choices=("plus", "minus"), default=None
    )

    s = sub.add_parser(
        "selfcheck", parents=[common], help="run the acceptance suite"
    )
    s.add_argument("scope", choices=("quick", "full"))

    pc = sub.add_parser(
        "precompute",
        parents=[common],
        help="populate class-number and trace caches",
    )
    pc.add_argument("--level", type=int, required=True)
    pc.add_argument("--cutoff", type=float, required=True)
    pc.add_argument(
        "--max-chunks", type=int, default=None,
        help="stop after this many chunks (resume later)",
    )
    return p


def _merged(args, config: dict, key: str, default=None):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def cmd_dim(args, config) -> int:
    spec = args.level_range
    if "-" in spec.strip("-"):
        a, _, b = spec.partition("-")
        lo, hi = int(a), int(b)
    else:
        lo = hi = int(spec)
    if not (1 <= lo <= hi <= 10**4):
        raise DomainError(f"level range {spec!r} outside [1, 10^4]")
    fmt_kind = _merged(args, config, "format", "text") or "text"
    rows = [(n, mf.dim_S2(n), mf.newform_dim(n)) for n in range(lo, hi + 1)]
    if fmt_kind == "json":
        print(json.dumps([{"N": n, "g": g, "nu": nu} for n, g, nu in rows]))
    else:
        for n, g, nu in rows:
            print(f"{n},{g},{nu}")
    return EXIT_OK


def cmd_trace(args, config) -> int:
    convention = _merged(args, config, "mu_convention", "auto")
    if convention in (None, "auto"):
        convention = tr.DEFAULT_CONVENTION
    level = args.level
    spec = args.index
    if "^" in spec:
        p_str, _, k_str = spec.partition("^")
        p, k = int(p_str), int(k_str)
        total = tr.trace_T_primepower(level, p, k, convention)
        terms = tr.trace_T(level, p**k, convention)
        n = p**k
    else:
        n = int(spec)
        terms = tr.trace_T(level, n, convention)
        total = terms.total
    fmt_kind = _merged(args, config, "format", "text") or "text"
    if fmt_kind == "json":
        print(
            json.dumps(
                {
                    "N": level,
                    "n": n,
                    "identity": str(terms.identity),
                    "divisor": str(terms.divisor),
                    "elliptic": str(terms.elliptic),
                    "hyperbolic": str(terms.hyperbolic),
                    "trace": total,
                }
            )
        )
    elif fmt_kind == "csv":
        print(f"{level},{n},{total}")
    else:
        print(f"trace T({n}) on S2({level}) = {total}")
        print(f"  identity   {terms.identity}")
        print(f"  divisor    {terms.divisor}")
        print(f"  elliptic   -{terms.elliptic}")
        print(f"  hyperbolic -{terms.hyperbolic}")
    return EXIT_OK


def _emit_reports(reports, fmt_kind: str) -> None:
    if fmt_kind == "json":
        print(json.dumps([_json_ready(r.to_json_dict()) for r in reports]))
    elif fmt_kind == "csv":
        print("N,n,X,tau")
        for r in reports:
            print(f"{r.N},{r.n},{fmt(r.cutoff_X)},{fmt(r.tau)}")
    else:
        for r in reports:
            print(
                f"tau({r.n}) at level {r.N}, cutoff {fmt(r.cutoff_X)}: "
                f"{fmt(r.tau)}  [budget {fmt(r.budget)}]"
            )
            print(
                f"  conductor {fmt(r.term_conductor)}  prime_sum "
                f"{fmt(r.term_prime_sum)}  linear {fmt(r.term_linear)}  "
                f"binomial_tail {fmt(r.term_binomial_tail)}"
            )


def cmd_tau(args, config) -> int:
    level = args.level
    n_max = int(_merged(args, config, "nmax", 5))
    cutoff = float(_merged(args, config, "cutoff", 1e4))
    cache_dir = _merged(args, config, "cache_dir")
    jobs = int(_merged(args, config, "jobs", 1) or 1)
    convention = _merged(args, config, "mu_convention", "auto")
    if convention in (None, "auto"):
        convention = tr.DEFAULT_CONVENTION
    if mf.dim_S2(level) == 0:
        provider = lambda p, k: 0  # zero-dimensional space, all traces vanish
    else:
        provider = tr.load_or_build_b_provider(
            level,
            int(math.ceil(cutoff)),
            cache_dir,
            convention,
            jobs,
            progress=lambda msg: print(f"# {msg}", file=sys.stderr),
        )
    reports = [
        li.tau_N_arithmetic(level, n, cutoff, b_provider=provider)
        for n in range(1, n_max + 1)
    ]
    _emit_reports(reports, _merged(args, config, "format", "text") or "text")
    return EXIT_OK


def cmd_tau_f(args, config) -> int:
    level = args.level
    n_max = int(_merged(args, config, "nmax", 5))
    cutoff = float(_merged(args, config, "cutoff", 1e4))
    qexp = mf.eta_product_qexp(level, max(2, int(math.ceil(cutoff))))
    reports = [
        li.tau_f_arithmetic(level, n, cutoff, qexp=qexp)
        for n in range(1, n_max + 1)
    ]
    _emit_reports(reports, _merged(args, config, "format", "text") or "text")
    return EXIT_OK


def cmd_tau_zeros(args, config) -> int:
    n_max = int(_merged(args, config, "nmax", 5))
    convention = _merged(args, config, "tau_convention", "minus") or "minus"
    if not os.path.exists(args.zero_file):
        print(f"error: zero file {args.zero_file} not found", file=sys.stderr)
        return EXIT_MISSING
    zlist = zs.load_zeros(args.zero_file)
    fmt_kind = _merged(args, config, "format", "text") or "text"
    reports = [
        zs.tau_zeros_report(zlist, n, convention) for n in range(1, n_max + 1)
    ]
    if fmt_kind == "json":
        print(json.dumps([_json_ready(r) for r in reports]))
    elif fmt_kind == "csv":
        print("n,partial_value,pairs_used")
        for r in reports:
            print(f"{r['n']},{fmt(r['partial_value'])},{r['pairs_used']}")
    else:
        for r in reports:
            print(
                f"tau({r['n']}) from zeros: {fmt(r['partial_value'])} "
                f"({r['pairs_used']} pairs; {r['tail_note']})"
            )
    return EXIT_OK


def cmd_selfcheck(args, config) -> int:
    results = checks.run_suite(args.scope, log=print)
    if args.scope == "full":
        for r in results:
            if r.criterion == 4:
                print(f"INFO mu-convention: {r.info}")
            if r.criterion in (10, 11):
                print(f"INFO diagnostic: {r.info}")
    failed = [r for r in results if not r.passed]
    print(
        f"{len(results) - len(failed)}/{len(results)} criteria passed"
        + (f"; FAILED: {[r.criterion for r in failed]}" if failed else "")
    )
    return EXIT_OK if not failed else EXIT_INCONSISTENT


def cmd_precompute(args, config) -> int:
    cache_dir = _merged(args, config, "cache_dir")
    jobs = int(_merged(args, config, "jobs", 1) or 1)
    convention = _merged(args, config, "mu_convention", "auto")
    if convention in (None, "auto"):
        convention = tr.DEFAULT_CONVENTION
    level = args.level
    cutoff = int(math.ceil(args.cutoff))
    class_bound = min(4 * cutoff, quadform.MAX_BATCH_BOUND)
    print(f"building class-number table to |D| <= {class_bound} ...")
    table = quadform.batch_class_data(-class_bound, cache_dir, write=True)
    print(
        f"class cache: {len(table)} entries -> "
        f"{quadform.cache_path(cache_dir)}"
    )
    path = tr.precompute_traces(
        level,
        cutoff,
        cache_dir,
        convention,
        jobs,
        progress=lambda msg: print(f"  {msg}"),
        max_chunks_this_run=args.max_chunks,
    )
    if os.path.exists(path):
        _, table2 = tr.load_trace_table_csv(path)
        print(f"trace cache: {len(table2)} rows -> {path}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        if args.cache_dir is None and "cache_dir" in config:
            args.cache_dir = config["cache_dir"]
        if args.cache_dir:
            os.environ[quadform.CACHE_ENV_VAR] = args.cache_dir
        handler = {
            "dim": cmd_dim,
            "trace": cmd_trace,
            "tau": cmd_tau,
            "tau-f": cmd_tau_f,
            "tau-zeros": cmd_tau_zeros,
            "selfcheck": cmd_selfcheck,
            "precompute": cmd_precompute,
        }[args.command]
        return handler(args, config)
    except (DomainError, ZeroFileParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ResourceLimitError, FileNotFoundError) as exc:
        print(f"missing resource: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
