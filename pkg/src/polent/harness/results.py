"""Result tables and their byte-stable CSV / JSON / plot-data encodings.

CSV column order is frozen as :data:`COLUMNS`. Floats are written with
``repr`` (shortest round-trip form); missing values are empty cells in CSV
and ``null`` in JSON. Metadata lines precede the CSV header as ``# key=value``.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InvalidArgumentError

PROVENANCE = ("paper-reproduction", "derived", "model-extension")
COLUMNS = ("quantity", "axis_value", "linear", "db", "provenance", "reference")


@dataclass(frozen=True)
class Row:
    quantity: str
    linear: float | None
    db: float | None = None
    provenance: str = "derived"
    reference: str = ""
    axis_value: float | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise InvalidArgumentError(f"unknown provenance tag {self.provenance!r}")
        for name in ("linear", "db", "axis_value"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, float(v))


def variance_row(quantity: str, value: float, provenance: str = "derived", reference: str = "",
                 axis_value: float | None = None) -> Row:
    """Row for a shot-noise-normalised variance, with its dB value filled in."""
    db = float(10 * np.log10(value)) if value > 0 else None
    return Row(quantity, value, db, provenance, reference, axis_value)


@dataclass
class ResultTable:
    metadata: dict
    rows: list[Row] = field(default_factory=list)

    def add(self, row: Row) -> None:
        self.rows.append(row)

    def get(self, quantity: str, axis_value: float | None = None) -> Row:
        for r in self.rows:
            if r.quantity == quantity and (axis_value is None or r.axis_value == axis_value):
                return r
        raise KeyError(quantity)

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "columns": list(COLUMNS),
            "rows": [{c: getattr(r, c) for c in COLUMNS} for r in self.rows],
        }
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k in sorted(self.metadata):
            buf.write(f"# {k}={self.metadata[k]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(["" if getattr(r, c) is None else
                        (repr(getattr(r, c)) if isinstance(getattr(r, c), float) else getattr(r, c))
                        for c in COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        data = json.loads(text)
        rows = [Row(**{c: d.get(c) for c in COLUMNS}) for d in data["rows"]]
        return cls(data["metadata"], rows)

    def series(self) -> dict[str, list[tuple[float, float]]]:
        """Rows carrying an axis value, grouped by quantity, in row order."""
        out: dict[str, list[tuple[float, float]]] = {}
        for r in self.rows:
            if r.axis_value is not None and r.linear is not None:
                out.setdefault(r.quantity, []).append((r.axis_value, r.linear))
        return out


def write_table(table: ResultTable, outdir: str | Path, stem: str) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [outdir / f"{stem}.csv", outdir / f"{stem}.json"]
    paths[0].write_text(table.to_csv())
    paths[1].write_text(table.to_json())
    return paths


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_").lower()


def write_plot_data(table: ResultTable, outdir: str | Path, stem: str | None = None) -> list[Path]:
    """One two-column text file per series: ``x y`` per line, header names the axis."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    axis = table.metadata.get("sweep_axis", "x")
    prefix = f"{stem}__" if stem else ""
    paths = []
    for quantity, pts in table.series().items():
        p = outdir / f"{prefix}{_slug(quantity)}.dat"
        lines = [f"# {axis} {quantity}"] + [f"{x!r} {y!r}" for x, y in pts]
        p.write_text("\n".join(lines) + "\n")
        paths.append(p)
    return paths
