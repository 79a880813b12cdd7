"""Reader for the ergokit CSV interchange format.

Layout: one ``#``-prefixed JSON metadata line, a ``series,x,y,extra``
header, then data rows.  Empty x/y cells decode to None (scalar rows
carry their value on one axis only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class DataFileError(ValueError):
    """The input file is not a valid experiment CSV."""


@dataclass(frozen=True)
class Row:
    series: str
    x: float | None
    y: float | None
    extra: str


@dataclass(frozen=True)
class ExperimentData:
    metadata: dict
    rows: tuple

    @property
    def kind(self) -> str:
        return self.metadata.get("kind", "")

    def series_names(self) -> list[str]:
        seen = dict.fromkeys(r.series for r in self.rows)
        return list(seen)

    def series(self, name: str) -> list[Row]:
        return [r for r in self.rows if r.series == name]

    def scalar(self, name: str, axis: str) -> float:
        rows = self.series(name)
        if not rows:
            raise DataFileError(f"series {name!r} is missing from the data file")
        value = getattr(rows[0], axis)
        if value is None:
            raise DataFileError(f"series {name!r} has no {axis} value")
        return value


def _parse_cell(cell: str, path: str) -> float | None:
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError:
        raise DataFileError(f"{path}: expected a number or empty cell, got {cell!r}") from None


def load(path: str) -> ExperimentData:
    """Parse an experiment CSV; raises DataFileError on any format problem."""
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
        if not first.startswith("# "):
            raise DataFileError(f"{path}: missing '# ' metadata header line")
        try:
            metadata = json.loads(first[2:])
        except json.JSONDecodeError as exc:
            raise DataFileError(f"{path}: metadata header is not valid JSON ({exc})") from exc
        header = f.readline().rstrip("\n")
        if header != "series,x,y,extra":
            raise DataFileError(f"{path}: expected columns 'series,x,y,extra', got {header!r}")
        rows = []
        for lineno, line in enumerate(f, start=3):
            parts = line.rstrip("\n").split(",", 3)
            if len(parts) != 4:
                raise DataFileError(f"{path}:{lineno}: expected 4 columns, got {len(parts)}")
            series, x, y, extra = parts
            rows.append(
                Row(
                    series=series,
                    x=_parse_cell(x, f"{path}:{lineno}:x"),
                    y=_parse_cell(y, f"{path}:{lineno}:y"),
                    extra=extra,
                )
            )
    if not isinstance(metadata, dict) or "kind" not in metadata:
        raise DataFileError(f"{path}: metadata header lacks the experiment 'kind'")
    return ExperimentData(metadata=metadata, rows=tuple(rows))
