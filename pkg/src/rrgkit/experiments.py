"""Experiment orchestration: seeded parameter grids, CSV/JSON reports, SVG plots.

A config is a single JSON document:

    {
      "cells": [{"kind": "uniform", "n": 100, "d": 10}, ...],
      "replicas": 50,
      "seed": 1,
      "out_dir": "runs/demo",
      "timings": false,
      "threads": 1
    }

Each (cell, replica) task owns RngStream(seed, global task index), so output
is deterministic for a given config; completed cells are journaled and
skipped on resume.  Wall-clock timings are off by default because they
would break byte-level reproducibility of the CSV; enable "timings" to
record them.  Environment overrides: RRGKIT_SEED and RRGKIT_THREADS only.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .rng import RngStream
from .samplers import GraphModel, sample
from .spectra import spectral_summary

__all__ = ["ExperimentConfig", "run_experiment", "render_csv_scatter", "render_tail_report"]

CSV_HEADER = "# rrgkit-experiment-csv v1\nmodel,n,d,replica,lambda,lambda_over_sqrt_d,lambda_over_vu,runtime_ms"


@dataclass
class ExperimentConfig:
    cells: List[dict]
    replicas: int
    seed: int
    out_dir: str
    timings: bool = False
    threads: int = 1
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        cfg = cls(
            cells=raw["cells"],
            replicas=int(raw.get("replicas", 1)),
            seed=int(raw.get("seed", 0)),
            out_dir=raw.get("out_dir", "rrgkit-run"),
            timings=bool(raw.get("timings", False)),
            threads=int(raw.get("threads", 1)),
            meta=raw.get("meta", {}),
        )
        if "RRGKIT_SEED" in os.environ:
            cfg.seed = int(os.environ["RRGKIT_SEED"])
        if "RRGKIT_THREADS" in os.environ:
            cfg.threads = int(os.environ["RRGKIT_THREADS"])
        if cfg.replicas < 1:
            raise ValueError("replicas must be >= 1")
        return cfg


def _cell_model(cell: dict) -> GraphModel:
    if cell.get("kind") == "er":
        raise ValueError("the spectral experiment needs a regular-graph model, not 'er'")
    return GraphModel(
        kind=cell["kind"],
        n=int(cell["n"]),
        d=int(cell.get("d", 0)),
        p=cell.get("p"),
    )


def _run_replica(model: GraphModel, stream: RngStream, timings: bool) -> dict:
    t0 = time.perf_counter() if timings else 0.0
    A = sample(model, stream.generator())
    summ = spectral_summary(A)
    ms = (time.perf_counter() - t0) * 1000.0 if timings else -1.0
    return {
        "lambda": summ.lam,
        "lambda_over_sqrt_d": summ.lam_over_sqrt_d,
        "lambda_over_vu": summ.lam_over_vu,
        "runtime_ms": ms,
    }


def _quantiles(xs: List[float]) -> dict:
    ys = sorted(xs)

    def q(f: float) -> float:
        if not ys:
            return math.nan
        pos = f * (len(ys) - 1)
        lo = int(math.floor(pos))
        hi = int(math.ceil(pos))
        return ys[lo] + (ys[hi] - ys[lo]) * (pos - lo)

    return {"min": q(0.0), "q25": q(0.25), "median": q(0.5), "q75": q(0.75), "max": q(1.0)}


def run_experiment(config: ExperimentConfig) -> dict:
    """Run (or resume) every cell; returns the summary dict.

    Writes out_dir/results.csv, out_dir/summary.json, and per-cell fragments
    under out_dir/cells/ used for resumption.
    """
    out = Path(config.out_dir)
    cells_dir = out / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    journal_path = out / "journal.json"
    done = set()
    if journal_path.exists():
        done = set(json.loads(journal_path.read_text())["completed"])

    summary_cells = []
    skipped = []
    for ci, cell in enumerate(config.cells):
        frag = cells_dir / f"cell_{ci:04d}.csv"
        try:
            model = _cell_model(cell)
        except ValueError as exc:
            skipped.append({"cell": ci, "spec": cell, "reason": str(exc)})
            frag.write_text("")
            done.add(ci)
            continue
        if ci in done and frag.exists():
            rows = [r for r in frag.read_text().splitlines() if r]
        else:
            base = ci * config.replicas
            streams = [RngStream(config.seed, base + r) for r in range(config.replicas)]
            if config.threads > 1:
                with ThreadPoolExecutor(max_workers=config.threads) as pool:
                    results = list(
                        pool.map(lambda s: _run_replica(model, s, config.timings), streams)
                    )
            else:
                results = [_run_replica(model, s, config.timings) for s in streams]
            rows = [
                f"{model.kind},{model.n},{model.d},{r},"
                f"{res['lambda']!r},{res['lambda_over_sqrt_d']!r},"
                f"{res['lambda_over_vu']!r},{res['runtime_ms']!r}"
                for r, res in enumerate(results)
            ]
            frag.write_text("\n".join(rows) + "\n")
            done.add(ci)
            journal_path.write_text(json.dumps({"completed": sorted(done)}))
        lam_ratio = [float(r.split(",")[5]) for r in rows]
        vu_ratio = [float(r.split(",")[6]) for r in rows]
        summary_cells.append(
            {
                "cell": ci,
                "kind": model.kind,
                "n": model.n,
                "d": model.d,
                "replicas": len(rows),
                "lambda_over_sqrt_d": _quantiles(lam_ratio),
                "lambda_over_vu": _quantiles(vu_ratio),
            }
        )

    lines = [CSV_HEADER]
    for ci in range(len(config.cells)):
        frag = cells_dir / f"cell_{ci:04d}.csv"
        lines.extend(r for r in frag.read_text().splitlines() if r)
    (out / "results.csv").write_text("\n".join(lines) + "\n")

    summary = {
        "seed": config.seed,
        "replicas": config.replicas,
        "cells": summary_cells,
        "skipped": skipped,
    }
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary


# ---------------------------------------------------------------------------
# Deterministic SVG rendering (plain string assembly; byte-stable)
# ---------------------------------------------------------------------------

_SVG_W, _SVG_H, _PAD = 640, 420, 50


def _svg_open() -> List[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]


def _scale(vals, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return [a + (v - lo) / span * (b - a) for v in vals]


def render_csv_scatter(csv_path, out_path) -> None:
    """Scatter of lambda/sqrt(d) against n with the reference line 2 sqrt(1-d/n)."""
    rows = []
    for line in Path(csv_path).read_text().splitlines():
        if not line or line.startswith("#") or line.startswith("model,"):
            continue
        parts = line.split(",")
        rows.append((parts[0], int(parts[1]), int(parts[2]), float(parts[5])))
    svg = _svg_open()
    svg.append(f'<text x="{_PAD}" y="20" font-size="13">lambda/sqrt(d) vs n</text>')
    if rows:
        ns = [r[1] for r in rows]
        ys = [r[3] for r in rows]
        refs = [2.0 * math.sqrt(1.0 - r[2] / r[1]) for r in rows]
        lo_n, hi_n = min(ns), max(ns)
        lo_y = min(ys + refs + [0.0])
        hi_y = max(ys + refs) * 1.05
        xs = _scale(ns, lo_n, hi_n, _PAD, _SVG_W - _PAD)
        yy = _scale(ys, lo_y, hi_y, _SVG_H - _PAD, _PAD)
        ry = _scale(refs, lo_y, hi_y, _SVG_H - _PAD, _PAD)
        for x, y in sorted(zip(xs, ry)):
            svg.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="#d62728"/>')
        for x, y in zip(xs, yy):
            svg.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#1f77b4" fill-opacity="0.5"/>')
    svg.append("</svg>")
    Path(out_path).write_text("\n".join(svg) + "\n")


def render_tail_report(report: dict, out_path) -> None:
    """Log-scale overlay of the empirical CCDF, confidence limits, and bound;
    grid points that violate the bound are highlighted."""
    grid = report["grid"]
    svg = _svg_open()
    svg.append(
        f'<text x="{_PAD}" y="20" font-size="13">{report["name"]} '
        f'({report["side"]} tail, center {report["center"]:.6g})</text>'
    )
    floor = 1e-12

    def logv(seq):
        return [math.log10(max(v, floor)) for v in seq]

    series = [
        ("empirical_ccdf", "#1f77b4"),
        ("upper_cl", "#aec7e8"),
        ("bound_curve", "#d62728"),
    ]
    all_y = sum((logv(report[k]) for k, _ in series), []) or [0.0]
    lo_y, hi_y = min(all_y) - 0.2, max(all_y) + 0.2
    lo_x, hi_x = min(grid), max(grid)
    for key, color in series:
        xs = _scale(grid, lo_x, hi_x, _PAD, _SVG_W - _PAD)
        ys = _scale(logv(report[key]), lo_y, hi_y, _SVG_H - _PAD, _PAD)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        svg.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    for idx in report.get("violations", []):
        x = _scale([grid[idx]], lo_x, hi_x, _PAD, _SVG_W - _PAD)[0]
        svg.append(
            f'<line x1="{x:.2f}" y1="{_PAD}" x2="{x:.2f}" y2="{_SVG_H - _PAD}" '
            f'stroke="#ff7f0e" stroke-width="2"/>'
        )
    svg.append("</svg>")
    Path(out_path).write_text("\n".join(svg) + "\n")
