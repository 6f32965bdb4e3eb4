"""Render the realisation and variance-comparison figures from CSV exports.

Strictly presentational: every statistic is read from the CSV; this layer
only subtracts baselines, styles curves, and writes an image.  Input schemas
are validated exactly and any mismatch aborts with a schema diff.  Rendering
is a pure function of the CSV bytes and the figure spec: fixed figure size,
fixed dpi, default fonts, no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIG3_HEADER = ["x", "curve_id", "kind", "value"]
FIG4_HEADER = [
    "x",
    "var_sum_rm",
    "cov_sum_rm",
    "var_total_rm",
    "eps_sq_primes",
    "eps_cross_primes",
    "eps_total_primes",
]

FIGURES = ("3A", "3B", "4A", "4B")

DARK, MID, LIGHT = "#303030", "#808080", "#c0c0c0"


class SchemaError(ValueError):
    """CSV header does not match the expected schema; carries the diff."""


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    source: Path
    output: Path
    dpi: int = 150
    size: tuple[float, float] = (8.0, 5.0)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}; choose one of {FIGURES}")

    @property
    def log_axes(self) -> bool:
        return self.figure in ("4A", "4B")


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str
    linewidth: float = 0.8
    in_legend: bool = True
    zorder: int = 2


def _check_header(header: list[str], expected: list[str], path: Path) -> None:
    if header == expected:
        return
    missing = [c for c in expected if c not in header]
    unexpected = [c for c in header if c not in expected]
    parts = [f"schema mismatch in {path}"]
    if missing:
        parts.append(f"missing columns: {missing}")
    if unexpected:
        parts.append(f"unexpected columns: {unexpected}")
    if not missing and not unexpected:
        parts.append(f"column order: got {header}, want {expected}")
    raise SchemaError("; ".join(parts))


def load_fig3(path: Path) -> dict[tuple[str, str], tuple[np.ndarray, np.ndarray]]:
    """Curves keyed by (kind, curve_id); values are (x, value) arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"schema mismatch in {path}; file is empty (no header)")
        _check_header(header, FIG3_HEADER, path)
        curves: dict[tuple[str, str], list[tuple[float, float]]] = {}
        for row in reader:
            x, curve_id, kind, value = row
            curves.setdefault((kind, curve_id), []).append((float(x), float(value)))
    out = {}
    for key, points in curves.items():
        arr = np.asarray(points)
        out[key] = (arr[:, 0], arr[:, 1])
    grids = {tuple(x) for x, _ in out.values()}
    if len(grids) > 1:
        raise SchemaError(f"schema mismatch in {path}; curves use inconsistent x grids")
    return out


def load_fig4(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"schema mismatch in {path}; file is empty (no header)")
        _check_header(header, FIG4_HEADER, path)
        rows = [[float(v) for v in row] for row in reader]
    matrix = np.asarray(rows) if rows else np.empty((0, len(FIG4_HEADER)))
    return {name: matrix[:, idx] for idx, name in enumerate(FIG4_HEADER)}


def _fig3_baseline(curves, kind: str, path_hint: str) -> tuple[np.ndarray, np.ndarray]:
    key = (kind, kind)
    if key not in curves:
        raise ValueError(f"missing baseline curve {kind!r} in {path_hint}")
    return curves[key]


def _sorted_ids(curves, kind: str, exclude: tuple[str, ...] = ()) -> list[str]:
    return sorted(cid for (k, cid) in curves if k == kind and cid not in exclude)


def build_series(spec: FigureSpec) -> list[Series]:
    """Assemble the styled series for one figure; pure data, no drawing."""
    if spec.figure in ("3A", "3B"):
        curves = load_fig3(spec.source)
        if not curves:
            return []
        series: list[Series] = []
        if spec.figure == "3A":
            x, expected = _fig3_baseline(curves, "expected", spec.source.name)
            rm_ids = _sorted_ids(curves, "rm")
            for idx, cid in enumerate(rm_ids):
                cx, cy = curves[("rm", cid)]
                series.append(Series(
                    label=r"$\epsilon_{\mathrm{RM}}(x)$", x=cx, y=cy - expected,
                    color=DARK, in_legend=idx == 0,
                ))
            rmc_ids = _sorted_ids(curves, "rmc", exclude=("mean",))
            for idx, cid in enumerate(rmc_ids):
                cx, cy = curves[("rmc", cid)]
                series.append(Series(
                    label=r"$\epsilon_{\mathrm{RM}_c}(x)$", x=cx, y=cy - expected,
                    color=LIGHT, in_legend=idx == 0,
                ))
            lx, ly = _fig3_baseline(curves, "li", spec.source.name)
            series.append(Series(
                label=r"$\mathrm{li}(x) - \mathbf{E}[\pi_{\mathrm{RM}}(x)]$",
                x=lx, y=ly - expected, color="black", linewidth=1.6, zorder=5,
            ))
        else:  # 3B
            x, li_vals = _fig3_baseline(curves, "li", spec.source.name)
            rmc_ids = _sorted_ids(curves, "rmc", exclude=("mean",))
            for idx, cid in enumerate(rmc_ids):
                cx, cy = curves[("rmc", cid)]
                # curve rmc-000 is the all-zero shift, i.e. the primes themselves
                if cid == "rmc-000":
                    series.append(Series(
                        label=r"$\epsilon(x) = \pi(x) - \mathrm{li}(x)$",
                        x=cx, y=cy - li_vals, color="black", linewidth=1.6, zorder=6,
                    ))
                else:
                    series.append(Series(
                        label=r"$\epsilon_{\mathrm{RM}_c}(x)$", x=cx, y=cy - li_vals,
                        color=LIGHT, in_legend=idx <= 1,
                    ))
            if ("rmc", "mean") in curves:
                mx, my = curves[("rmc", "mean")]
                series.append(Series(
                    label=r"$\langle \epsilon_{\mathrm{RM}_c}(x) \rangle$",
                    x=mx, y=my - li_vals, color=MID, linewidth=1.4, zorder=5,
                ))
        return series

    columns = load_fig4(spec.source)
    x = columns["x"]
    if x.size == 0:
        return []
    if spec.figure == "4A":
        picks = [
            ("var_total_rm", r"$\mathrm{Var}[\pi_{\mathrm{RM}}(x)]$", "black", 1.6),
            ("var_sum_rm", r"$\sum \mathrm{Var}[\mathbf{1}_{\mathrm{RM}}]$", DARK, 1.0),
            ("cov_sum_rm", r"$|2\sum\sum \mathrm{Cov}[\mathbf{1}_{\mathrm{RM}}]|$", DARK, 1.0),
            ("eps_total_primes", r"$|\pi(x) - \mathrm{Ri}(x)|^2$", MID, 1.6),
            ("eps_sq_primes", r"$\sum \epsilon_i^2$", LIGHT, 1.0),
            ("eps_cross_primes", r"$|2\sum\sum \epsilon_i \epsilon_j|$", LIGHT, 1.0),
        ]
    else:  # 4B close-up
        picks = [
            ("var_total_rm", r"$\mathrm{Var}[\pi_{\mathrm{RM}}(x)]$", "black", 1.6),
            ("eps_total_primes", r"$|\pi(x) - \mathrm{Ri}(x)|^2$", MID, 1.6),
        ]
    series = []
    for name, label, color, width in picks:
        # log axes cannot carry signed covariance terms; plot magnitudes
        series.append(Series(label=label, x=x, y=np.abs(columns[name]), color=color, linewidth=width))
    return series


def render(spec: FigureSpec) -> list[Series]:
    """Draw the figure and write it to spec.output; returns the drawn series."""
    series = build_series(spec)
    fig, ax = plt.subplots(figsize=spec.size, dpi=spec.dpi)
    try:
        for s in series:
            ax.plot(
                s.x, s.y, color=s.color, linewidth=s.linewidth, zorder=s.zorder,
                label=s.label if s.in_legend else "_nolegend_",
            )
        if spec.log_axes:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel("$x$")
        if series:
            ax.legend(loc="best", fontsize=9)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return series


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="render figures from primelab CSV exports"
    )
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--in", dest="source", required=True)
    parser.add_argument("--out", dest="output", required=True)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    spec = FigureSpec(
        figure=args.figure,
        source=Path(args.source),
        output=Path(args.output),
        dpi=args.dpi,
    )
    try:
        series = render(spec)
    except SchemaError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {spec.output} ({len(series)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
