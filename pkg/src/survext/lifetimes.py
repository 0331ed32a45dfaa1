"""Pairwise divergence analysis of grouped lifetime data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from survext.empirical import EmpiricalSample, estimate_symmetric_dsed, estimate_symmetric_sed
from survext.errors import FileError, InsufficientData, SchemaError, ZeroSurvivalAtT

MEASURES = ("SSJ", "SSJ_t")
DEFAULT_TIMES = (50.0, 100.0, 150.0)


@dataclass
class LifetimeDataset:
    """Lifetimes (days) keyed by group label, in first-seen group order."""

    groups: dict = field(default_factory=dict)
    dropped: int = 0

    @property
    def labels(self) -> list:
        return list(self.groups)

    def __len__(self):
        return sum(len(v) for v in self.groups.values())

    @classmethod
    def from_records(cls, records) -> LifetimeDataset:
        groups: dict = {}
        for label, value in records:
            groups.setdefault(str(label), []).append(float(value))
        return cls({k: np.asarray(v) for k, v in groups.items()})


def ingest(path, group_column: str, lifetime_column: str) -> LifetimeDataset:
    """Read a CSV with a header; rows with a missing, non-numeric or negative lifetime are dropped."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames:
                raise SchemaError(f"{path}: empty file or missing header")
            for col in (group_column, lifetime_column):
                if col not in reader.fieldnames:
                    raise SchemaError(f"{path}: no column {col!r} (have {reader.fieldnames})")
            records, dropped = [], 0
            for row in reader:
                label, raw = row.get(group_column), row.get(lifetime_column)
                try:
                    value = float(raw)
                except (TypeError, ValueError):
                    dropped += 1
                    continue
                if label is None or label == "" or not math.isfinite(value) or value < 0:
                    dropped += 1
                    continue
                records.append((label, value))
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    ds = LifetimeDataset.from_records(records)
    ds.dropped = dropped
    return ds


@dataclass
class DivergenceMatrix:
    labels: list
    values: np.ndarray
    measure: str
    t: float | None = None
    missing: list = field(default_factory=list)  # (label_i, label_j, reason)

    def mean_divergence(self) -> dict:
        """Mean absolute off-diagonal value per group, ignoring missing cells."""
        off = np.abs(self.values.astype(float))
        np.fill_diagonal(off, np.nan)
        out = {}
        for i, lab in enumerate(self.labels):
            row = off[i][~np.isnan(off[i])]
            out[lab] = float(row.mean()) if row.size else math.nan
        return out

    def argmax_group(self) -> str:
        """Group with the largest mean absolute divergence, or 'none' when undefined or tied."""
        md = {k: v for k, v in self.mean_divergence().items() if not math.isnan(v)}
        if len(self.labels) < 2 or not md:
            return "none"
        best = max(md.values())
        winners = [k for k, v in md.items() if v == best]
        return winners[0] if len(winners) == 1 else "none"


def divergence_matrix(ds: LifetimeDataset, measure: str = "SSJ", t: float | None = None) -> DivergenceMatrix:
    """Symmetric pairwise estimates between all groups.

    Cells where a group has no observation beyond ``t`` are NaN and listed in
    ``missing``.
    """
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    if measure == "SSJ_t" and t is None:
        raise ValueError("the dynamic measure needs t")
    labels = ds.labels
    samples = {}
    for lab in labels:
        if len(ds.groups[lab]) < 2:
            raise InsufficientData(f"group {lab!r} has fewer than 2 records")
        samples[lab] = EmpiricalSample(ds.groups[lab])
    k = len(labels)
    values = np.zeros((k, k))
    missing = []
    for i in range(k):
        for j in range(i + 1, k):
            x, y = samples[labels[i]], samples[labels[j]]
            try:
                v = (estimate_symmetric_sed(x, y) if measure == "SSJ"
                     else estimate_symmetric_dsed(x, y, float(t)))
            except ZeroSurvivalAtT as exc:
                v = math.nan
                missing.append((labels[i], labels[j], str(exc)))
            values[i, j] = values[j, i] = v
    return DivergenceMatrix(labels, values, measure, None if t is None else float(t), missing)


def _title(m: DivergenceMatrix) -> str:
    return m.measure if m.t is None else f"{m.measure}(t={m.t:g})"


def report_csv(matrices) -> str:
    """One section per matrix: a header line, then a labelled square table."""
    if not matrices:
        raise ValueError("no matrices to report")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for m in matrices:
        w.writerow([f"# {_title(m)}", f"argmax_group={m.argmax_group()}"])
        w.writerow(["group", *m.labels])
        for lab, row in zip(m.labels, m.values):
            w.writerow([lab, *(format(float(v), ".17g") for v in row)])
        w.writerow([])
    return buf.getvalue()


def report_dict(matrices) -> dict:
    if not matrices:
        raise ValueError("no matrices to report")
    return {"sections": [
        {"measure": m.measure, "t": m.t, "labels": list(m.labels),
         "values": [[None if math.isnan(v) else float(v) for v in row] for row in m.values],
         "argmax_group": m.argmax_group(),
         "mean_abs_divergence": {k: (None if math.isnan(v) else v) for k, v in m.mean_divergence().items()},
         "missing": [list(c) for c in m.missing]}
        for m in matrices
    ]}


def divergence_report(matrices) -> dict:
    """Both renderings: ``{"csv": str, "json": str}``."""
    return {"csv": report_csv(matrices), "json": json.dumps(report_dict(matrices), indent=2)}


def matrices_from_dict(d: dict) -> list[DivergenceMatrix]:
    out = []
    for s in d["sections"]:
        vals = np.array([[math.nan if v is None else v for v in row] for row in s["values"]], dtype=float)
        out.append(DivergenceMatrix(s["labels"], vals, s["measure"], s.get("t"),
                                    [tuple(c) for c in s.get("missing", [])]))
    return out
