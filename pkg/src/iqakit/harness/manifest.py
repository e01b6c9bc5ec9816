"""Manifest-driven dataset evaluation and Table-style correlation reports."""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..errors import ImageIOError, InvalidInputError, UndefinedCorrelationError
from ..imgio import load_image
from ..scoring import MetricBundle, score_pair
from .correlation import lcc, srocc

MANIFEST_HEADER = ["ref", "test", "mos", "distortion"]


@dataclass(frozen=True)
class EvalRow:
    ref: str
    test: str
    mos: float
    distortion: str


@dataclass(frozen=True)
class CorrelationStats:
    srocc: float | None
    lcc: float | None
    n: int


@dataclass
class EvalReport:
    metric: str
    per_distortion: dict[str, CorrelationStats]
    overall: CorrelationStats
    scores: list[float]
    config: dict = field(default_factory=dict)


def read_manifest(path) -> list[EvalRow]:
    """Parse a ``ref,test,mos,distortion`` CSV manifest."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != MANIFEST_HEADER:
                raise InvalidInputError(
                    f"{path}: manifest header must be {','.join(MANIFEST_HEADER)}"
                )
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec or all(not c.strip() for c in rec):
                    continue
                if len(rec) != 4:
                    raise InvalidInputError(f"{path}:{lineno}: expected 4 fields, got {len(rec)}")
                ref, test, mos, label = (c.strip() for c in rec)
                try:
                    mos_value = float(mos)
                except ValueError:
                    raise InvalidInputError(f"{path}:{lineno}: MOS {mos!r} is not a number") from None
                rows.append(EvalRow(ref, test, mos_value, label))
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc
    if not rows:
        raise InvalidInputError(f"{path}: manifest has no rows")
    return rows


def _score_row(args) -> float:
    index, row, metric, bundle = args
    try:
        ref = load_image(row.ref) if metric != "niqe" else None
        test = load_image(row.test)
    except ImageIOError as exc:
        raise ImageIOError(f"manifest row {index + 1}: {exc}") from exc
    return score_pair(metric, ref, test, bundle)


def _correlations(scores: Sequence[float], mos: Sequence[float]) -> CorrelationStats:
    n = len(scores)
    if n < 2:
        return CorrelationStats(None, None, n)
    try:
        s = srocc(scores, mos)
    except UndefinedCorrelationError:
        s = None
    try:
        r = lcc(scores, mos)
    except UndefinedCorrelationError:
        r = None
    return CorrelationStats(s, r, n)


def effective_jobs(jobs: int) -> int:
    if os.environ.get("IQA_NO_PARALLEL") == "1":
        return 1
    return max(1, int(jobs))


def evaluate_manifest(rows: Sequence[EvalRow], metric: str, bundle: MetricBundle | None = None,
                      jobs: int = 1) -> EvalReport:
    """Score every row and correlate scores with MOS per distortion label and overall.

    Rows are scored independently (in a process pool when ``jobs > 1``) and
    reassembled in manifest order, so the report does not depend on ``jobs``.
    Undefined correlations (constant scores, single rows) are reported as None.
    """
    bundle = bundle or MetricBundle()
    rows = list(rows)
    if not rows:
        raise InvalidInputError("manifest has no rows")
    tasks = [(i, row, metric, bundle) for i, row in enumerate(rows)]
    jobs = effective_jobs(jobs)
    if jobs == 1:
        scores = [_score_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_score_row, tasks))

    labels: dict[str, list[int]] = {}
    for i, row in enumerate(rows):
        labels.setdefault(row.distortion, []).append(i)
    per_label = {
        label: _correlations([scores[i] for i in idx], [rows[i].mos for i in idx])
        for label, idx in labels.items()
    }
    overall = _correlations(scores, [r.mos for r in rows])
    return EvalReport(metric, per_label, overall, scores, bundle.describe(metric))


def _fmt(v: float | None) -> str:
    return "   -  " if v is None else f"{v:.4f}"


def _num(v: float | None):
    return None if v is None else round(v, 4)


def format_report(report: EvalReport) -> str:
    """Human-readable table followed by a machine-readable JSON section."""
    width = max([len("distortion"), len("overall")] + [len(k) for k in report.per_distortion])
    lines = [
        f"metric: {report.metric}",
        f"rows: {report.overall.n}",
        "",
        f"{'distortion':<{width}}  {'n':>5}  {'SROCC':>7}  {'LCC':>7}",
    ]
    for label, st in list(report.per_distortion.items()) + [("overall", report.overall)]:
        lines.append(f"{label:<{width}}  {st.n:>5}  {_fmt(st.srocc):>7}  {_fmt(st.lcc):>7}")
    payload = {
        "metric": report.metric,
        "config": report.config,
        "per_distortion": {
            k: {"srocc": _num(v.srocc), "lcc": _num(v.lcc), "n": v.n}
            for k, v in report.per_distortion.items()
        },
        "overall": {"srocc": _num(report.overall.srocc), "lcc": _num(report.overall.lcc),
                    "n": report.overall.n},
        "scores": report.scores,
    }
    lines += ["", "--- json ---", json.dumps(payload, indent=2, sort_keys=True)]
    return "\n".join(lines) + "\n"
