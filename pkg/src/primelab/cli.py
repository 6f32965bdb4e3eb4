"""Command line front door: runs experiments and emits CSV/JSON artifacts.

Every command is deterministic given its parameters and seed; reruns are
byte-identical.  Each CSV gets a sidecar ``<name>.meta.json`` echoing the
resolved configuration.  Exit codes: 0 success, 2 usage or precondition
failure, 3 resource ceiling, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from math import isqrt, log
from pathlib import Path

import numpy as np

from primelab.analytic import DEFAULT_CONFIG, li_values
from primelab.constrained import canonical_representative, enumerate_rmc
from primelab.errors import InvariantViolation, ResourceLimitError
from primelab.random_model import expected_pi_rm, pi_rm_ensemble, pi_rm_series
from primelab.sieve import (
    PrimeBasis,
    generate_primes,
    prime_count,
    structure_trace_header,
    structure_trace_rows,
)
from primelab.stats import (
    DEFAULT_KERNEL,
    clt_histogram,
    fig4_rows,
    monitor_series,
    subrandom_variance_exact,
)


def parse_grid(spec: str) -> list[int]:
    """Checkpoint grids: 'geometric:start:stop:count' or 'linear:start:stop:count'."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise ValueError(f"bad grid spec {spec!r}; want kind:start:stop:count")
    kind, start_s, stop_s, count_s = parts
    start, stop, count = float(start_s), float(stop_s), int(count_s)
    if count < 1 or start < 1 or stop < start:
        raise ValueError(f"bad grid spec {spec!r}")
    if kind == "geometric":
        points = np.geomspace(start, stop, count)
    elif kind == "linear":
        points = np.linspace(start, stop, count)
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    grid = sorted(set(int(round(p)) for p in points))
    return [g for g in grid if g >= 1]


def _nth_prime_limit(n: int) -> int:
    """Sieve limit guaranteed to contain at least n primes."""
    if n < 6:
        return 13
    bound = n * (log(n) + log(log(n)))
    return int(bound) + 10


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows, command: str, params: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    sidecar = path.with_suffix(".meta.json")
    with open(sidecar, "w") as fh:
        json.dump({"command": command, "parameters": params}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge config-file values under explicit flags, rejecting unknown keys."""
    params = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        params.update(loaded)
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = flag
    return params


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_primes(args) -> int:
    params = _resolve(args, {"limit": None, "out": None})
    if params["limit"] is None or int(params["limit"]) < 2:
        raise ValueError("primes needs --limit >= 2")
    limit = int(params["limit"])
    basis = generate_primes(limit)
    count = prime_count(limit, basis)
    if params["out"]:
        rows = [[k + 1, p] for k, p in enumerate(basis.primes)]
        _write_csv(Path(params["out"]), ["index", "prime"], rows, "primes", params)
    else:
        print(" ".join(str(p) for p in basis.primes))
    print(f"pi({limit}) = {count}")
    return 0


def cmd_structure_trace(args) -> int:
    params = _resolve(args, {"start": 1, "stop": None, "out": None})
    if params["stop"] is None:
        raise ValueError("structure-trace needs --stop")
    start, stop = int(params["start"]), int(params["stop"])
    basis = generate_primes(max(isqrt(stop) + 1, 2))
    header = structure_trace_header(stop, basis)
    rows = structure_trace_rows(start, stop, basis)
    if params["out"]:
        _write_csv(Path(params["out"]), header, rows, "structure-trace", params)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(str(v) for v in row))
    return 0


def cmd_rmc(args) -> int:
    params = _resolve(args, {"k": None, "out": None, "max_survivors": 1_000_000})
    if params["k"] is None or int(params["k"]) < 1:
        raise ValueError("rmc needs --k >= 1")
    k = int(params["k"])
    basis = generate_primes(_nth_prime_limit(k + 1))
    report = enumerate_rmc(k, basis, max_survivors=int(params["max_survivors"]))
    if params["out"]:
        out = Path(params["out"])
        census_rows = [[lv.level, lv.prime, lv.survivors] for lv in report.levels]
        _write_csv(out / "rmc-census.csv", ["level", "prime", "survivors"], census_rows, "rmc", params)
        head = ["index"] + [f"b{i}" for i in range(1, k + 1)] + ["canonical_representative"]
        survivor_rows = [
            [idx, *shift.residues, canonical_representative(shift, basis)]
            for idx, shift in enumerate(report.survivors)
        ]
        _write_csv(out / "rmc-survivors.csv", head, survivor_rows, "rmc", params)
    print(report.final_count)
    return 0


def cmd_ensemble(args) -> int:
    params = _resolve(
        args,
        {"x_max": None, "seeds": 100, "seed": 0, "grid": None, "out": None, "threads": 1},
    )
    if params["x_max"] is None:
        raise ValueError("ensemble needs --x-max")
    x_max = int(float(params["x_max"]))
    grid_spec = params["grid"] or f"geometric:100:{x_max}:16"
    checkpoints = [c for c in parse_grid(grid_spec) if c <= x_max]
    basis = generate_primes(max(isqrt(x_max) + 1, 2))
    seeds, matrix = pi_rm_ensemble(
        np.asarray(checkpoints), int(params["seeds"]), basis,
        seed0=int(params["seed"]), threads=int(params["threads"]),
    )
    expected = {c: expected_pi_rm(c, basis) for c in checkpoints}
    rows = []
    for s_idx, seed in enumerate(seeds):
        for c_idx, c in enumerate(checkpoints):
            count = int(matrix[s_idx, c_idx])
            rows.append([int(seed), c, count, expected[c], count - expected[c]])
    header = ["seed", "x", "pi_rm", "expected", "epsilon"]
    if params["out"]:
        _write_csv(Path(params["out"]), header, rows, "ensemble", params)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_format(v) for v in row))
    return 0


def fig3_payload(
    k: int,
    n_seeds: int | None,
    seed0: int,
    checkpoints: list[int],
    basis: PrimeBasis,
    threads: int = 1,
    max_survivors: int = 1_000_000,
) -> tuple[list[str], list[list], int]:
    """Long-format curves for the realisation figure.

    kinds: 'rm' (one curve per seed), 'rmc' (one curve per survivor, sorted
    so that curve rmc-000 is the all-zero shift, i.e. the primes themselves,
    plus the cross-survivor mean as curve 'mean'), and the 'li' and
    'expected' baselines.  Values are the raw counting functions; renderers
    subtract baselines, never recompute statistics.
    """
    report = enumerate_rmc(k, basis, max_survivors=max_survivors)
    cps = np.asarray([c for c in checkpoints if c <= report.horizon], dtype=np.int64)
    if cps.size == 0:
        raise ValueError("no checkpoints below the enumeration horizon")
    n_rm = report.final_count if n_seeds is None else int(n_seeds)
    rows: list[list] = []
    _, rm_matrix = pi_rm_ensemble(cps, n_rm, basis, seed0=seed0, threads=threads)
    for idx in range(n_rm):
        curve = f"rm-{seed0 + idx:05d}"
        for c_idx, c in enumerate(cps):
            rows.append([int(c), curve, "rm", int(rm_matrix[idx, c_idx])])
    rmc_matrix = np.vstack([pi_rm_series(cps, shift, basis) for shift in report.survivors])
    for idx in range(rmc_matrix.shape[0]):
        curve = f"rmc-{idx:03d}"
        for c_idx, c in enumerate(cps):
            rows.append([int(c), curve, "rmc", int(rmc_matrix[idx, c_idx])])
    mean = rmc_matrix.mean(axis=0)
    for c_idx, c in enumerate(cps):
        rows.append([int(c), "mean", "rmc", float(mean[c_idx])])
    li_vals = li_values(cps.astype(float))
    for c_idx, c in enumerate(cps):
        rows.append([int(c), "li", "li", float(li_vals[c_idx])])
    for c in cps:
        rows.append([int(c), "expected", "expected", expected_pi_rm(int(c), basis)])
    return ["x", "curve_id", "kind", "value"], rows, report.final_count


def cmd_fig3(args) -> int:
    params = _resolve(
        args,
        {"k": 40, "seeds": None, "seed": 0, "grid": None, "out": None,
         "threads": 1, "max_survivors": 1_000_000},
    )
    k = int(params["k"])
    basis = generate_primes(_nth_prime_limit(k + 1))
    horizon = basis.prime(k + 1) ** 2 - 1
    grid_spec = params["grid"] or f"linear:100:{horizon}:200"
    checkpoints = parse_grid(grid_spec)
    header, rows, count = fig3_payload(
        k,
        None if params["seeds"] is None else int(params["seeds"]),
        int(params["seed"]),
        checkpoints,
        basis,
        threads=int(params["threads"]),
        max_survivors=int(params["max_survivors"]),
    )
    out = Path(params["out"] or "fig3.csv")
    _write_csv(out, header, rows, "fig3", params)
    print(f"{count} constrained survivors; wrote {out}")
    return 0


def cmd_fig4(args) -> int:
    params = _resolve(args, {"x_max": 1_000_000, "grid": None, "out": None})
    x_max = int(float(params["x_max"]))
    grid_spec = params["grid"] or f"geometric:100:{x_max}:64"
    checkpoints = [c for c in parse_grid(grid_spec) if c <= x_max]
    basis = generate_primes(max(isqrt(x_max) + 1, 2))
    header, rows = fig4_rows(np.asarray(checkpoints), basis, DEFAULT_KERNEL, DEFAULT_CONFIG)
    for row in rows:
        if abs(row[6] - (row[4] + row[5])) > 1e-9 * max(1.0, abs(row[6])):
            raise InvariantViolation(f"decomposition identity broken at x={row[0]}")
    out = Path(params["out"] or "fig4.csv")
    _write_csv(out, header, rows, "fig4", params)
    print(f"wrote {out}")
    return 0


def cmd_stats(args) -> int:
    params = _resolve(args, {"x_max": 1_000_000, "grid": None, "out": None})
    x_max = int(float(params["x_max"]))
    grid_spec = params["grid"] or f"geometric:100:{x_max}:64"
    checkpoints = [c for c in parse_grid(grid_spec) if c <= x_max]
    basis = generate_primes(max(isqrt(x_max) + 1, 2))
    series = monitor_series(np.asarray(checkpoints), basis, DEFAULT_CONFIG)
    header = ["x", "pi", "li", "ri", "expected_rm", "eps_li", "eps_ri",
              "von_koch", "monach_montgomery"]
    rows = []
    for idx, c in enumerate(checkpoints):
        rows.append(
            [c, int(series["pi"][idx])]
            + [float(series[key][idx]) for key in header[2:]]
        )
    out = Path(params["out"] or "stats.csv")
    _write_csv(out, header, rows, "stats", params)
    print(f"wrote {out}")
    return 0


def cmd_subrandom(args) -> int:
    params = _resolve(
        args,
        {"k": 3, "h_max": None, "h": None, "samples": None, "seed": 0, "out": None},
    )
    k = int(params["k"])
    basis = generate_primes(_nth_prime_limit(max(k, 2)))
    if params["samples"]:
        if params["h"] is None:
            raise ValueError("histogram mode needs --h")
        hist = clt_histogram(k, int(params["h"]), int(params["samples"]), int(params["seed"]), basis)
        rows = [[v, c] for v, c in zip(hist.values, hist.counts)]
        out = Path(params["out"] or "subrandom-hist.csv")
        meta = dict(params)
        meta.update(
            mean=hist.mean, variance=hist.variance,
            skewness=hist.skewness, excess_kurtosis=hist.excess_kurtosis,
        )
        _write_csv(out, ["value", "count"], rows, "subrandom", meta)
        print(f"mean={hist.mean!r} variance={hist.variance!r} "
              f"skewness={hist.skewness!r} excess_kurtosis={hist.excess_kurtosis!r}")
        return 0
    from primelab.stats import primorial

    h_max = int(params["h_max"]) if params["h_max"] else primorial(k, basis)
    rows = []
    for h in range(2, h_max + 1):
        result = subrandom_variance_exact(k, h, basis)
        rows.append([k, h, float(result.variance), float(result.bound)])
    out = Path(params["out"] or "subrandom.csv")
    _write_csv(out, ["k", "h", "variance", "bound"], rows, "subrandom", params)
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primelab",
        description="prime structure, shift-based random models, and subrandom statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, flags):
        p = sub.add_parser(name)
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        p.add_argument("--config", help="JSON file with parameter defaults")
        p.set_defaults(func=func)
        return p

    add("primes", cmd_primes, {
        "--limit": dict(type=int),
        "--out": dict(),
    })
    add("structure-trace", cmd_structure_trace, {
        "--start": dict(type=int),
        "--stop": dict(type=int),
        "--out": dict(),
    })
    add("rmc", cmd_rmc, {
        "--k": dict(type=int),
        "--out": dict(),
        "--max-survivors": dict(type=int, dest="max_survivors"),
    })
    add("ensemble", cmd_ensemble, {
        "--x-max": dict(dest="x_max"),
        "--seeds": dict(type=int),
        "--seed": dict(type=int),
        "--grid": dict(),
        "--out": dict(),
        "--threads": dict(type=int),
    })
    add("fig3", cmd_fig3, {
        "--k": dict(type=int),
        "--seeds": dict(type=int),
        "--seed": dict(type=int),
        "--grid": dict(),
        "--out": dict(),
        "--threads": dict(type=int),
        "--max-survivors": dict(type=int, dest="max_survivors"),
    })
    add("fig4", cmd_fig4, {
        "--x-max": dict(dest="x_max"),
        "--grid": dict(),
        "--out": dict(),
    })
    add("stats", cmd_stats, {
        "--x-max": dict(dest="x_max"),
        "--grid": dict(),
        "--out": dict(),
    })
    add("subrandom", cmd_subrandom, {
        "--k": dict(type=int),
        "--h-max": dict(type=int, dest="h_max"),
        "--h": dict(type=int),
        "--samples": dict(type=int),
        "--seed": dict(type=int),
        "--out": dict(),
    })
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
