"""CSV, JSON and SVG writers.

``-inf`` is written as the string ``"-inf"`` in CSV and as
``{"kind": "neg_infinity"}`` in JSON; both readers below undo that.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import ExtendedMass

NEG_INF_TAG = {"kind": "neg_infinity"}


def csv_cell(v) -> str:
    if isinstance(v, ExtendedMass):
        v = v.value
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if v == -math.inf:
            return "-inf"
        if v == math.inf:
            return "inf"
        return repr(v)
    if v is None:
        return ""
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> list:
    """Rows as dicts, with ``-inf``/numbers decoded."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({k: _decode_cell(v) for k, v in row.items()})
    return out


def _decode_cell(v: str):
    if v in ("yes", "no"):
        return v == "yes"
    try:
        return float(v)
    except ValueError:
        return v


def to_jsonable(obj):
    if isinstance(obj, ExtendedMass):
        return obj.to_json()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_json"):
            return to_jsonable(obj.to_json())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if obj == -math.inf:
            return dict(NEG_INF_TAG)
        if not math.isfinite(obj):
            return {"kind": "inf" if obj > 0 else "nan"}
    return obj


def _json_hook(d):
    kind = d.get("kind") if len(d) == 1 else None
    if kind == "neg_infinity":
        return -math.inf
    if kind == "inf":
        return math.inf
    if kind == "nan":
        return math.nan
    return d


def json_text(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_json(text: str):
    return json.loads(text, object_hook=_json_hook)


# ---------------------------------------------------------------------------
# SVG


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def svg_line_chart(series: dict, title: str, xlabel: str, ylabel: str,
                   width: int = 640, height: int = 400) -> str:
    """Fixed-size line chart; ``series`` maps a label to ``(xs, ys)``."""
    left, right, top, bottom = 70, 20, 40, 50
    xs = [x for v in series.values() for x in v[0]]
    ys = [y for v in series.values() for y in v[1] if math.isfinite(y)]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="15">{title}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{_fmt(px(xv))}" y="{top + ph + 16}" text-anchor="middle" '
                   f'font-size="11">{xv:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{_fmt(py(yv) + 4)}" text-anchor="end" '
                   f'font-size="11">{yv:.3g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{_fmt(py(0))}" x2="{left + pw}" y2="{_fmt(py(0))}" '
                   f'stroke="#999" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{left + pw / 2:.0f}" y="{height - 10}" text-anchor="middle" '
               f'font-size="13">{xlabel}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.0f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {top + ph / 2:.0f})">{ylabel}</text>')
    for i, (label, (sx, sy)) in enumerate(series.items()):
        c = colours[i % len(colours)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(sx, sy) if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="2" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 110}" y="{top + 16 + 16 * i}" font-size="12" '
                   f'fill="{c}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
