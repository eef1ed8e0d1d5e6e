"""
multicharlier command line.

    main.py eval   --r 2 --sigma 1,2 --n 1,1 --k 3
    main.py verify --suite all --r 2 --sigma 1,2 --nmax 5 --kmax 5 --cutoff 8
    main.py table  --nmax 2 --kmax 4 --format csv
    main.py bench  --strategies recurrence,explicit,genfunc --nmax 6

stdout carries only the report; logs go to stderr.

Exit codes:
    0: every requested assertion passed
    1: verification failure (failed suite, method disagreement)
    2: configuration, parse or I/O error
"""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))
from benchstore import BenchStore  # noqa: E402
from charlier import (  # noqa: E402
    CharlierParams,
    CharlierTable,
    build_table,
    check_backward,
    check_classical_reduction,
    check_combined_difference,
    check_compatibility,
    check_forward,
    check_method_agreement,
    check_monicity,
    check_normalization,
    check_orthogonality,
    check_path_independence,
    check_rij_polynomial,
    eval_explicit,
    inject_corruption,
)
from deserializer import table_from_json  # noqa: E402
from drift import check_drift  # noqa: E402
from errors import ConfigError, MultiCharlierError, ParameterError, VerificationError  # noqa: E402
from fock import (  # noqa: E402
    check_canonical,
    check_commutator_HH,
    check_eigen,
    check_ladder_X,
    check_ladder_Y,
    check_norm_bookkeeping,
    check_number_operator,
    check_psi,
    check_R,
    check_S_independence,
    check_similarity,
    check_state_symmetry,
    check_state_table_agreement,
)
from polycore import MultiIndex, iter_indices, max_bit_length, parse_rational  # noqa: E402
from serializer import render_report, table_to_csv, table_to_json  # noqa: E402
from series import check_generating_function, coeff, gen_lhs  # noqa: E402

logger = logging.getLogger("multicharlier")

FORMATS = ("json", "csv", "text")
STRATEGIES = ("recurrence", "explicit", "genfunc")
SUITES = (
    "orthogonality",
    "compatibility",
    "backward",
    "forward",
    "difference",
    "rij",
    "agreement",
    "fock",
    "psi",
    "drift",
)
DEFAULT_CUTOFF = 8


def default_sigma(r: int) -> tuple[Fraction, ...]:
    """sigma_j = (2j - 1)/2; (1/2, 3/2) for r = 2."""
    return tuple(Fraction(2 * j - 1, 2) for j in range(1, r + 1))


# ============================================================================
# Configuration
# Priority: CLI flag > MULTICHARLIER_* env var > default
# ============================================================================

@dataclass
class RunConfig:
    r: int = 2
    sigma: tuple = (Fraction(1, 2), Fraction(3, 2))
    nmax: int = 5
    kmax: int = 6
    cutoff: int = DEFAULT_CUTOFF
    format: str = "json"
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    history: str | None = None

    @property
    def params(self) -> CharlierParams:
        try:
            return CharlierParams(self.r, tuple(self.sigma))
        except ParameterError as e:
            raise ConfigError(str(e)) from e

    def validate(self) -> None:
        self.params
        for name in ("nmax", "kmax", "cutoff", "seed"):
            if getattr(self, name) < 0:
                raise ConfigError(f"--{name} must be natural, got {getattr(self, name)}")
        if self.cutoff < self.nmax:
            raise ConfigError(f"--cutoff ({self.cutoff}) must be at least --nmax ({self.nmax})")
        if self.kmax > self.cutoff:
            raise ConfigError(f"--kmax ({self.kmax}) must not exceed --cutoff ({self.cutoff})")
        if self.format not in FORMATS:
            raise ConfigError(f"Unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be at least 1, got {self.jobs}")

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "sigma": [str(s) for s in self.sigma],
            "nmax": self.nmax,
            "kmax": self.kmax,
            "cutoff": self.cutoff,
            "seed": self.seed,
        }


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{what} must be a comma list of integers, got {text!r}") from None


def parse_index(text: str, r: int) -> MultiIndex:
    values = _parse_int_list(text, "--n")
    if len(values) != r:
        raise ConfigError(f"--n {text!r} has {len(values)} components, expected {r}")
    try:
        return MultiIndex(values)
    except ParameterError as e:
        raise ConfigError(str(e)) from e


def parse_injection(text: str, r: int) -> tuple[MultiIndex, int, Fraction]:
    """INDEX:POWER:DELTA, e.g. "1,1:0:1"."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--inject expects INDEX:POWER:DELTA, got {text!r}")
    n = parse_index(parts[0], r)
    try:
        power = int(parts[1])
    except ValueError:
        raise ConfigError(f"--inject power must be an integer, got {parts[1]!r}") from None
    if power < 0:
        raise ConfigError(f"--inject power must be natural, got {power}")
    delta = parse_rational(parts[2])
    if delta == 0:
        raise ConfigError("--inject delta must be nonzero")
    return n, power, delta


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.sigma is not None:
        sigma = tuple(parse_rational(part) for part in args.sigma.split(","))
    else:
        sigma = default_sigma(args.r)
    cutoff = args.cutoff if args.cutoff is not None else max(DEFAULT_CUTOFF, args.nmax, args.kmax)
    return RunConfig(
        r=args.r,
        sigma=sigma,
        nmax=args.nmax,
        kmax=args.kmax,
        cutoff=cutoff,
        format=args.format,
        seed=args.seed,
        jobs=args.jobs if args.jobs is not None else _env_int("MULTICHARLIER_JOBS", 1),
        out=args.out,
        history=getattr(args, "history", None) or os.environ.get("MULTICHARLIER_BENCH_DB") or None,
    )


def configure_logging(verbose: bool) -> None:
    level_name = "DEBUG" if verbose else os.environ.get("MULTICHARLIER_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _emit(text: str, config: RunConfig) -> None:
    if config.out:
        Path(config.out).write_text(text)
        logger.info(f"Wrote {len(text)} bytes to {config.out}")
    else:
        sys.stdout.write(text)


def _fan_out(fn, items, jobs: int) -> list:
    """map(fn, items) with at most `jobs` threads; results keep input order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ============================================================================
# eval
# ============================================================================

def evaluate_all_methods(n: MultiIndex, k: int, params: CharlierParams) -> dict:
    """C_n(k) by recurrence, explicit formula and generating-function coefficient."""
    return {
        "recurrence": build_table(params, n.total)[n].evaluate(k),
        "explicit": eval_explicit(n, params).evaluate(k),
        "genfunc": n.factorial() * coeff(gen_lhs(k, params, n.total), n),
    }


def cmd_eval(config: RunConfig, n: MultiIndex, k: int) -> int:
    if n.total > config.nmax:
        raise ConfigError(f"|n| = {n.total} exceeds --nmax {config.nmax}")
    if not 0 <= k <= config.kmax:
        raise ConfigError(f"--k {k} must lie in 0..{config.kmax}")
    values = evaluate_all_methods(n, k, config.params)
    agree = len(set(values.values())) == 1
    value = values["recurrence"]

    if config.format == "json":
        text = json.dumps({
            "command": "eval",
            "params": config.params.to_dict(),
            "index": list(n),
            "k": k,
            "value": str(value),
            "methods": {name: str(v) for name, v in values.items()},
            "agree": agree,
        }, indent=2) + "\n"
    elif config.format == "csv":
        text = "method,value\n" + "".join(f"{name},{v}\n" for name, v in values.items())
    else:
        verdict = "methods agree" if agree else "METHODS DISAGREE"
        text = f"C_{tuple(n)}({k}) = {value}  [{verdict}]\n"
    _emit(text, config)

    if not agree:
        raise VerificationError(f"Methods disagree for n={tuple(n)}, k={k}: {', '.join(f'{a}={b}' for a, b in values.items())}")
    return 0


# ============================================================================
# verify
# ============================================================================

def _suite_orthogonality(table: CharlierTable, config: RunConfig) -> list[dict]:
    return _fan_out(lambda n: check_orthogonality(n, table), table.indices(), config.jobs)


def _suite_rij(table: CharlierTable, config: RunConfig) -> list[dict]:
    pairs = permutations(range(1, table.params.r + 1), 2)
    return _fan_out(lambda ij: check_rij_polynomial(table, *ij), pairs, config.jobs)


def _suite_agreement(table: CharlierTable, config: RunConfig) -> list[dict]:
    return [
        check_method_agreement(table),
        check_path_independence(table),
        check_classical_reduction(table),
        check_generating_function(table, config.kmax, table.max_total_degree),
        check_monicity(table),
    ]


def _suite_fock(table: CharlierTable, config: RunConfig) -> list[dict]:
    if config.cutoff < 4:
        raise ConfigError(f"The fock suite needs --cutoff >= 4, got {config.cutoff}")
    params, D, r = config.params, config.cutoff, config.r
    pairs = list(combinations(range(1, r + 1), 2))
    k_states = list(range(min(config.kmax, D) + 1))

    tasks = [
        lambda: check_canonical(r, D),
        lambda: check_number_operator(r, D),
        lambda: check_state_symmetry(r, D),
        lambda: check_S_independence(params, D),
    ]
    tasks += [lambda i=i, j=j: check_commutator_HH(i, j, params, D) for i, j in pairs]
    tasks += [
        lambda i=i, k=k: check_eigen(i, k, params, D)
        for i in range(1, r + 1)
        for k in range(min(config.kmax, D - 1) + 1)
    ]
    tasks += [lambda i=i: check_similarity(i, params, D) for i in range(1, r + 1)]
    tasks += [
        lambda j=j, k=k: check_ladder_X(j, k, params, D)
        for j in range(1, r + 1)
        for k in range(1, min(config.kmax, D) + 1)
    ]
    tasks += [lambda k=k: check_ladder_Y(k, params, D) for k in range(min(config.kmax, D - 1) + 1)]
    tasks += [lambda i=i, j=j: check_R(i, j, k_states, params, D, seed=config.seed) for i, j in pairs]

    reports = [rep.to_dict() for rep in _fan_out(lambda task: task(), tasks, config.jobs)]
    reports.append(check_state_table_agreement(table, D, config.kmax))
    reports.append(check_norm_bookkeeping(r, config.kmax))
    reports.append(check_normalization(r, config.kmax))
    return reports


def run_suite(name: str, table: CharlierTable, reference: CharlierTable | None, config: RunConfig) -> dict:
    logger.debug(f"running suite {name}")
    if name == "orthogonality":
        checks = _suite_orthogonality(table, config)
    elif name == "compatibility":
        checks = [check_compatibility(table)]
    elif name == "backward":
        checks = [check_backward(table)]
    elif name == "forward":
        checks = [check_forward(table)]
    elif name == "difference":
        checks = [check_combined_difference(table)]
    elif name == "rij":
        checks = _suite_rij(table, config)
    elif name == "agreement":
        checks = _suite_agreement(table, config)
    elif name == "fock":
        checks = _suite_fock(table, config)
    elif name == "psi":
        checks = [check_psi(config.nmax, config.kmax, config.params.sigma[0])]
    elif name == "drift":
        if reference is None:
            raise ConfigError("The drift suite needs --table-in")
        checks = [check_drift(table, reference)]
    else:
        raise ConfigError(f"Unknown suite {name!r}")
    return {"suite": name, "pass": all(c["pass"] for c in checks), "checks": checks}


def resolve_suites(names: list[str], with_import: bool) -> list[str]:
    resolved = []
    for name in names:
        if name == "all":
            resolved += [s for s in SUITES if s != "drift" or with_import]
        elif name in SUITES:
            resolved.append(name)
        else:
            raise ConfigError(f"Unknown suite {name!r}; expected one of {', '.join(SUITES + ('all',))}")
    return list(dict.fromkeys(resolved))


def cmd_verify(config: RunConfig, suites: list[str], table_in: str | None = None, inject: str | None = None) -> int:
    reference = None
    if table_in:
        table = table_from_json(Path(table_in).read_text())
        reference = build_table(table.params, table.max_total_degree)
        logger.info(f"Loaded {len(table.entries)} entries from {table_in}")
    else:
        table = build_table(config.params, config.nmax)

    if inject:
        n, power, delta = parse_injection(inject, table.params.r)
        if n not in table:
            raise ConfigError(f"--inject index {tuple(n)} is not in the table")
        table = inject_corruption(table, n, power, delta)
        logger.info(f"Injected delta {delta} into k^{power} of C_{tuple(n)}")

    names = resolve_suites(suites, with_import=reference is not None)
    started = time.perf_counter()
    results = [run_suite(name, table, reference, config) for name in names]
    logger.info(f"Ran {len(results)} suite(s) in {time.perf_counter() - started:.2f}s")

    report = {
        "command": "verify",
        "config": config.to_dict(),
        "pass": all(s["pass"] for s in results),
        "suites": results,
    }
    _emit(render_report(report, config.format), config)
    return 0 if report["pass"] else 1


# ============================================================================
# table
# ============================================================================

def cmd_table(config: RunConfig) -> int:
    table = build_table(config.params, config.nmax)
    if config.format == "json":
        text = table_to_json(table)
    elif config.format == "csv":
        text = table_to_csv(table, config.kmax)
    else:
        text = "".join(f"{tuple(n)}: {table[n]}\n" for n in table.indices())
    _emit(text, config)
    return 0


# ============================================================================
# bench
# ============================================================================

def _run_strategy(strategy: str, params: CharlierParams, nmax: int, kmax: int) -> tuple[dict, list]:
    """Returns ({(n, k): value}, coefficients or values produced)."""
    if strategy == "recurrence":
        table = build_table(params, nmax)
        polys = {n: table[n] for n in table.indices()}
    elif strategy == "explicit":
        polys = {n: eval_explicit(n, params) for n in iter_indices(params.r, nmax)}
    else:
        values = {}
        for k in range(kmax + 1):
            series = gen_lhs(k, params, nmax)
            for n in iter_indices(params.r, nmax):
                values[n, k] = n.factorial() * coeff(series, n)
        return values, list(values.values())
    values = {(n, k): p.evaluate(k) for n, p in polys.items() for k in range(kmax + 1)}
    return values, [c for p in polys.values() for c in p.coeffs]


def run_bench(config: RunConfig, strategies: list[str]) -> list[dict]:
    """One row per (nmax', strategy) for nmax' = 1..nmax; aborts on disagreement."""
    params = config.params
    ladder = []
    for nm in range(1, config.nmax + 1):
        baseline = None
        for strategy in strategies:
            started = time.perf_counter()
            values, produced = _run_strategy(strategy, params, nm, config.kmax)
            seconds = time.perf_counter() - started
            if baseline is None:
                baseline = (strategy, values)
            elif values != baseline[1]:
                bad = next(key for key in baseline[1] if baseline[1][key] != values.get(key))
                raise VerificationError(
                    f"{strategy} disagrees with {baseline[0]} at nmax={nm}: "
                    f"n={tuple(bad[0])}, k={bad[1]}"
                )
            ladder.append({
                "strategy": strategy,
                "r": params.r,
                "sigma": [str(s) for s in params.sigma],
                "nmax": nm,
                "seconds": round(seconds, 6),
                "peak_bits": max_bit_length(produced),
                "entries": len({n for n, _ in values}),
            })
        logger.debug(f"bench nmax={nm}: {len(strategies)} strategies agree")
    return ladder


def cmd_bench(config: RunConfig, strategies: list[str]) -> int:
    if not strategies:
        raise ConfigError("--strategies must name at least one strategy")
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        raise ConfigError(f"Unknown strategies {unknown}; expected a subset of {', '.join(STRATEGIES)}")
    if config.nmax < 1:
        raise ConfigError("bench needs --nmax of at least 1")
    strategies = list(dict.fromkeys(strategies))

    ladder = run_bench(config, strategies)
    rows = [row for row in ladder if row["nmax"] == config.nmax]

    history = []
    if config.history:
        store = BenchStore(config.history)
        store.connect()
        try:
            store.record(ladder)
            history = store.history(limit=len(ladder))
        finally:
            store.close()

    if config.format == "json":
        text = json.dumps({
            "command": "bench",
            "params": config.params.to_dict(),
            "kmax": config.kmax,
            "strategies": strategies,
            "agree": True,
            "rows": rows,
            "ladder": ladder,
            "history_recorded": len(history),
        }, indent=2) + "\n"
    elif config.format == "csv":
        header = "strategy,nmax,seconds,peak_bits,entries\n"
        text = header + "".join(
            f"{row['strategy']},{row['nmax']},{row['seconds']},{row['peak_bits']},{row['entries']}\n" for row in ladder
        )
    else:
        text = "".join(
            f"{row['strategy']:<11} nmax={row['nmax']:<3} {row['seconds']:>10.6f}s  bits={row['peak_bits']:<6} entries={row['entries']}\n"
            for row in ladder
        ) + "strategies agree\n"
    _emit(text, config)
    return 0


# ============================================================================
# Entry point
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=2, help="Number of directions (default: 2)")
    common.add_argument("--sigma", help="Comma list of exact rationals p/q (default: (2j-1)/2)")
    common.add_argument("--nmax", type=int, default=5, help="Max total degree |n| (default: 5)")
    common.add_argument("--kmax", type=int, default=6, help="Max spectral value k (default: 6)")
    common.add_argument("--cutoff", type=int, help=f"Series cutoff D (default: max({DEFAULT_CUTOFF}, nmax, kmax))")
    common.add_argument("--format", choices=FORMATS, default="json", help="Output format (default: json)")
    common.add_argument("--seed", type=int, default=0, help="Seed for sampled property checks")
    common.add_argument("--jobs", type=int, help="Worker threads (default: $MULTICHARLIER_JOBS or 1)")
    common.add_argument("--out", help="Write the report to this path instead of stdout")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging on stderr")

    parser = argparse.ArgumentParser(
        prog="multicharlier",
        description="Exact multiple Charlier polynomials and oscillator-model verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    %(prog)s eval --sigma 1,2 --n 1,1 --k 3
    %(prog)s verify --suite all --sigma 1,2 --nmax 5 --kmax 5 --cutoff 8
    %(prog)s verify --suite orthogonality --inject 1,1:0:1
    %(prog)s table --nmax 2 --kmax 4 --format csv
    %(prog)s bench --nmax 6 --history bench.duckdb
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="Evaluate C_n(k) by all three methods")
    p_eval.add_argument("--n", required=True, help="Multi-index as a comma list, e.g. 1,1")
    p_eval.add_argument("--k", type=int, default=0, help="Evaluation point (default: 0)")

    p_verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    p_verify.add_argument(
        "--suite",
        action="append",
        help=f"Suite to run, repeatable: {', '.join(SUITES)}, all (default: all)",
    )
    p_verify.add_argument("--table-in", help="Verify a table previously written by `table --format json`")
    p_verify.add_argument("--inject", help="Negative control INDEX:POWER:DELTA, e.g. 1,1:0:1")

    sub.add_parser("table", parents=[common], help="Emit the table as JSON or CSV")

    p_bench = sub.add_parser("bench", parents=[common], help="Time the three computation strategies")
    p_bench.add_argument("--strategies", default=",".join(STRATEGIES), help="Comma list (default: all three)")
    p_bench.add_argument("--history", help="DuckDB file for benchmark history (default: $MULTICHARLIER_BENCH_DB)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = config_from_args(args)
        config.validate()
        if args.command == "eval":
            return cmd_eval(config, parse_index(args.n, config.r), args.k)
        if args.command == "verify":
            return cmd_verify(config, args.suite or ["all"], args.table_in, args.inject)
        if args.command == "table":
            return cmd_table(config)
        return cmd_bench(config, [s.strip() for s in args.strategies.split(",") if s.strip()])
    except VerificationError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1
    except (MultiCharlierError, OSError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
