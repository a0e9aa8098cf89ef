"""CSV and SVG report writers with deterministic output."""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path

from .decay import DecayTable
from .records import RunRecord

RECORD_HEADER = ("round", "count", "eps", "mstar", "rin", "rout", "vol")


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(x, float):
        return repr(float(x))
    if hasattr(x, "dtype"):
        return repr(float(x)) if x.dtype.kind == "f" else str(x)
    return str(x)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _is_ensemble(records) -> bool:
    return bool(records) and not isinstance(records[0], RunRecord)


def records_csv(records) -> str:
    """Header ``round,count,eps,mstar,rin,rout,vol,E2,E4,...``; ensembles get
    a leading ``run`` column."""
    runs = [list(r) for r in records] if _is_ensemble(records) else [list(records)]
    degrees = sorted({k for run in runs for rec in run for k, _ in rec.energies})
    head = list(RECORD_HEADER) + [f"E{k}" for k in degrees]
    multi = _is_ensemble(records)
    if multi:
        head = ["run"] + head
    lines = [",".join(head)]
    for i, run in enumerate(runs):
        for r in run:
            e = dict(r.energies)
            row = [r.round, r.count, r.eps, r.mstar, r.rin, r.rout, r.vol] + [e.get(k, math.nan) for k in degrees]
            if multi:
                row = [i] + row
            lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def table_csv(table: DecayTable) -> str:
    rows = table.rows
    head = rows[0].header if rows else ()
    lines = [",".join(head)] + [",".join(fmt(v) for v in r.row()) for r in rows]
    if table.comparisons:
        lines.append("")
        lines.append("n,comparison,limit,relative_gap")
        lines += [",".join(fmt(v) for v in (c.n, c.value, c.limit, c.relative_gap)) for c in table.comparisons]
    return "\n".join(lines) + "\n"


def svg_plot(series, title: str = "eps_distance", width: int = 640, height: int = 400) -> str:
    """Line chart of y (log scale) against x for each (label, xs, ys) series."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if y > 0 and math.isfinite(y)]
    if not pts:
        raise ValueError("nothing to plot")
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    l0, l1 = math.log10(min(p[1] for p in pts)), math.log10(max(p[1] for p in pts))
    x1 = x1 if x1 > x0 else x0 + 1
    l1 = l1 if l1 > l0 else l0 + 1
    m = 50
    sx = lambda x: m + (x - x0) / (x1 - x0) * (width - 2 * m)
    sy = lambda y: height - m - (math.log10(y) - l0) / (l1 - l0) * (height - 2 * m)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>',
           f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>']
    for d in range(math.floor(l0), math.ceil(l1) + 1):
        if l0 <= d <= l1:
            y = sy(10.0**d)
            out.append(f'<text x="{m - 5}" y="{y:.2f}" text-anchor="end" font-size="10">1e{d}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 15}" text-anchor="middle" font-size="11">count</text>')
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    for i, (label, xs, ys) in enumerate(series):
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if y > 0 and math.isfinite(y))
        if coords:
            out.append(f'<polyline fill="none" stroke="{palette[i % len(palette)]}" stroke-width="1" '
                       f'points="{coords}"><title>{label}</title></polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(data, prefix, svg: bool = True) -> list:
    """Write ``<prefix>.csv`` (and ``<prefix>.svg`` for run records).

    ``data`` is a record list, a list of record lists (ensemble) or a
    :class:`DecayTable`. Raises on empty input without creating files.
    Files are written to a temporary name and renamed on success.
    """
    prefix = Path(prefix)
    if isinstance(data, DecayTable):
        if not data.rows:
            raise ValueError("empty table")
        path = prefix.with_name(prefix.name + ".csv")
        _atomic_write(path, table_csv(data))
        return [path]
    data = list(data)
    if not data or (_is_ensemble(data) and not any(len(r) for r in data)):
        raise ValueError("empty record list")
    csv_text = records_csv(data)
    svg_text = None
    if svg:
        runs = data if _is_ensemble(data) else [data]
        series = [(f"run {i}", [r.count for r in run], [r.eps for r in run]) for i, run in enumerate(runs)]
        try:
            svg_text = svg_plot(series, "eps_distance vs symmetrization count")
        except ValueError:
            svg_text = None
    paths = [prefix.with_name(prefix.name + ".csv")]
    _atomic_write(paths[0], csv_text)
    if svg_text is not None:
        paths.append(prefix.with_name(prefix.name + ".svg"))
        _atomic_write(paths[1], svg_text)
    return paths
