"""Plain-text body serialization.

Each record starts with a header ``dim <n>; kind <variant>`` (grid bodies add
``; scheme <s>; resolution <r>; seed <s>``), followed by one row of
whitespace-separated floats per vertex, generator or node value. Floats are
written with ``repr`` so reading back is exact.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable

import numpy as np

from ..geometry import build_grid
from .polygon import PolygonBody
from .polytope import PolytopeBody3
from .support import Ball, GridBody, Polytope, SupportBody, Zonotope


def _row(values) -> str:
    return " ".join(repr(float(x)) for x in np.atleast_1d(values))


def format_body(body: SupportBody) -> str:
    if not isinstance(body, SupportBody):
        raise TypeError(f"cannot serialize {type(body).__name__}")
    n = body.dim
    if isinstance(body, Ball):
        header, rows = f"dim {n}; kind ball", [[body.radius]]
    elif isinstance(body, PolygonBody):
        header, rows = f"dim {n}; kind polygon", body.vertices
    elif isinstance(body, PolytopeBody3):
        header, rows = f"dim {n}; kind polytope3", body.vertices
    elif isinstance(body, Polytope):
        header, rows = f"dim {n}; kind polytope", body.vertices
    elif isinstance(body, Zonotope):
        kind = "segment" if len(body.generators) == 1 else "zonotope"
        header, rows = f"dim {n}; kind {kind}", body.generators
    elif isinstance(body, GridBody):
        g = body.grid
        seed = "none" if g.seed is None else g.seed
        header = f"dim {n}; kind grid; scheme {g.scheme}; resolution {g.resolution}; seed {seed}"
        rows = body.values[:, None]
    else:
        raise TypeError(f"cannot serialize {type(body).__name__}")
    if body.label:
        header += f"; label {body.label}"
    return "\n".join([header] + [_row(r) for r in rows]) + "\n"


def _parse_header(line: str) -> dict:
    fields = {}
    for part in line.split(";"):
        key, _, val = part.strip().partition(" ")
        if not key or not val:
            raise ValueError(f"malformed header field {part!r}")
        fields[key] = val.strip()
    if "dim" not in fields or "kind" not in fields:
        raise ValueError("header must contain dim and kind")
    return fields


def _build(fields: dict, rows: list) -> SupportBody:
    n = int(fields["dim"])
    kind = fields["kind"]
    label = fields.get("label")
    data = np.array(rows, dtype=float)
    if kind == "ball":
        return Ball(n, float(data.ravel()[0]), label)
    if kind == "grid":
        seed = None if fields.get("seed", "none") == "none" else int(fields["seed"])
        grid = build_grid(n, int(fields["resolution"]), seed=seed)
        if grid.scheme != fields.get("scheme", grid.scheme):
            raise ValueError("grid scheme mismatch")
        return GridBody(grid, data.ravel(), label)
    if data.ndim != 2 or data.shape[1] != n:
        raise ValueError(f"{kind} rows must have {n} columns")
    if kind == "polygon":
        return PolygonBody(data, label)
    if kind == "polytope3":
        return PolytopeBody3(data, label)
    if kind == "polytope":
        return Polytope(data, label)
    if kind in ("zonotope", "segment"):
        return Zonotope(data, label)
    raise ValueError(f"unknown body kind {kind!r}")


def parse_bodies(text: str) -> list:
    bodies, fields, rows = [], None, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("dim "):
            if fields is not None:
                bodies.append(_build(fields, rows))
            fields, rows = _parse_header(line), []
        else:
            if fields is None:
                raise ValueError("data row before any header")
            rows.append([float(x) for x in line.split()])
    if fields is not None:
        bodies.append(_build(fields, rows))
    return bodies


def write_bodies(path, bodies: Iterable[SupportBody]) -> None:
    """Write atomically (temporary file, then rename)."""
    text = "".join(format_body(b) for b in bodies)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_bodies(path) -> list:
    with open(path) as fh:
        return parse_bodies(fh.read())
