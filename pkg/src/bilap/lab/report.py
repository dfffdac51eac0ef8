"""Sweep reports and their CSV / JSON / plot-data emitters.

Floats are written with ``repr`` (shortest round-trip form), rows keep
their insertion order and metadata carries no timestamps, so identical
reports produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

__all__ = ["Row", "SweepReport", "emit_report", "load_report", "write_summary"]

ASSERTED = ("PASS", "FAIL", "FAILED")


def _num(v) -> float:
    return float("nan") if v is None else float(v)


@dataclass
class Row:
    """One measured configuration point.

    ``verdict`` is ``PASS``/``FAIL`` from ``lower <= ratio <= upper``,
    ``INFO`` for measured-but-unasserted quantities and ``FAILED`` when
    the computation raised.
    """

    check: str
    point: dict
    lhs: float
    rhs: float
    ratio: float
    lower: float = -math.inf
    upper: float = math.inf
    verdict: str = "INFO"
    note: str = ""

    @classmethod
    def measured(cls, check, point, lhs, rhs, lower=-math.inf, upper=math.inf, assert_=True, note=""):
        lhs, rhs = _num(lhs), _num(rhs)
        ratio = lhs / rhs if rhs != 0 else (math.inf if lhs != 0 else 0.0)
        row = cls(check, dict(point), lhs, rhs, ratio, float(lower), float(upper), "INFO", note)
        if assert_:
            row.verdict = row.recompute()
        return row

    @classmethod
    def failed(cls, check, point, exc: BaseException):
        return cls(check, dict(point), math.nan, math.nan, math.nan, verdict="FAILED",
                   note=f"{type(exc).__name__}: {exc}")

    def recompute(self) -> str:
        ok = self.lower <= self.ratio <= self.upper
        return "PASS" if ok else "FAIL"


@dataclass
class SweepReport:
    suite: str
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, row: Row) -> Row:
        self.rows.append(row)
        return row

    def counts(self) -> dict:
        out = {"PASS": 0, "FAIL": 0, "FAILED": 0, "INFO": 0}
        for r in self.rows:
            out[r.verdict] += 1
        return out

    @property
    def all_pass(self) -> bool:
        c = self.counts()
        return c["FAIL"] == 0 and c["FAILED"] == 0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "meta": self.meta, "fits": self.fits,
                "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepReport":
        rows = [Row(**r) for r in data.get("rows", [])]
        return cls(data["suite"], rows, data.get("fits", {}), data.get("meta", {}))


COLUMNS = ["index", "check", "point", "lhs", "rhs", "ratio", "lower", "upper", "verdict", "note"]


def _point_text(point: dict) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in point.items())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def _csv_text(report: SweepReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for i, r in enumerate(report.rows):
        w.writerow([i, r.check, _point_text(r.point), repr(r.lhs), repr(r.rhs), repr(r.ratio),
                    repr(r.lower), repr(r.upper), r.verdict, r.note])
    return buf.getvalue()


def _plot_text(report: SweepReport) -> str:
    lines = [f"# suite {report.suite}", "# index lhs rhs ratio verdict check point"]
    for i, r in enumerate(report.rows):
        lines.append(f"{i} {r.lhs!r} {r.rhs!r} {r.ratio!r} {r.verdict} {r.check} {_point_text(r.point) or '-'}")
    return "\n".join(lines) + "\n"


def _json_text(report: SweepReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


EMITTERS = {"csv": (_csv_text, ".csv"), "json": (_json_text, ".json"), "plotdata": (_plot_text, ".dat")}


def emit_report(report: SweepReport, fmt: str, out_dir) -> Path:
    """Write ``<out_dir>/<suite><ext>`` and return the path."""
    try:
        render, ext = EMITTERS[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}; choose from {sorted(EMITTERS)}") from None
    out_dir = Path(out_dir)
    path = out_dir / f"{report.suite}{ext}"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(render(report))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def load_report(path) -> SweepReport:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read report {path}: {exc}") from exc
    return SweepReport.from_dict(data)


def write_summary(reports, out_dir) -> Path:
    """``summary.json`` with per-suite verdict counts and the overall flag."""
    reports = list(reports)
    summary = {
        "all_pass": all(r.all_pass for r in reports),
        "suites": {r.suite: {**r.counts(), "all_pass": r.all_pass} for r in reports},
    }
    out_dir = Path(out_dir)
    path = out_dir / "summary.json"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary to {path}: {exc}") from exc
    return path
