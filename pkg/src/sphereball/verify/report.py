"""Suite reports and their JSON / CSV serialisation.

JSON is the source of truth.  Wall times are kept out of it by default
(written to ``timing.json`` instead) so that two runs with the same
configuration give byte-identical ``report.json``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

CSV_COLUMNS = ("suite", "name", "lhs", "rhs", "residual", "fitted_c", "slope", "pass")


def _num(v):
    if v is None:
        return None
    if isinstance(v, bool):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return v
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, str) or obj is None or isinstance(obj, bool):
        return obj
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    return _num(obj)


@dataclass
class Case:
    name: str
    params: dict
    lhs: float | None
    rhs: float | None
    passed: bool
    residual: float | None = None
    fitted_c: float | None = None
    slope: float | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "params": _clean(self.params), "lhs": _num(self.lhs), "rhs": _num(self.rhs)}
        for key in ("residual", "fitted_c", "slope"):
            val = getattr(self, key)
            if val is not None:
                out[key] = _num(val)
        if self.note:
            out["note"] = self.note
        out["pass"] = bool(self.passed)
        return out


@dataclass
class VerifyReport:
    suite: str
    cases: list[Case]
    resolution: dict
    seed: int
    elapsed_ms: float | None = None
    error: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.cases) and all(c.passed for c in self.cases)

    def to_dict(self, inline_timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "cases": [c.to_dict() for c in self.cases],
            "pass": self.passed,
            "elapsed_ms": round(self.elapsed_ms, 1) if (inline_timing and self.elapsed_ms is not None) else None,
            "resolution": _clean(self.resolution),
            "seed": self.seed,
        }
        if self.error:
            out["error"] = self.error
        return out


def to_json(reports, inline_timing: bool = False) -> str:
    doc = [r.to_dict(inline_timing) for r in reports]
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        for c in r.cases:
            d = c.to_dict()
            w.writerow([r.suite, c.name] + ["" if d.get(k) is None else d.get(k)
                                            for k in ("lhs", "rhs", "residual", "fitted_c", "slope")]
                       + [str(bool(c.passed)).lower()])
    return buf.getvalue()


def emit_report(reports, fmt: str, path, inline_timing: bool = False) -> list[Path]:
    """Write ``report.json`` and/or ``report.csv`` (plus ``timing.json``) under ``path``."""
    if fmt not in ("json", "csv", "both"):
        raise ValueError(f"unknown format {fmt!r}")
    out_dir = Path(path)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt in ("json", "both"):
            p = out_dir / "report.json"
            p.write_text(to_json(reports, inline_timing))
            written.append(p)
        if fmt in ("csv", "both"):
            p = out_dir / "report.csv"
            p.write_text(to_csv(reports))
            written.append(p)
        if not inline_timing:
            p = out_dir / "timing.json"
            p.write_text(json.dumps({r.suite: _num(r.elapsed_ms) for r in reports}, indent=2) + "\n")
            written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir}: {exc}") from exc
    return written


def exit_code(reports) -> int:
    return 0 if all(r.passed for r in reports) else 1
