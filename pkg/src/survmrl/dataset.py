"""Ingest right-censored survival data from CSV into typed, grouped samples.

Input schema: UTF-8 CSV with a header row and columns ``time`` (decimal,
>= 0), ``status`` (1 = event observed, 0 = right-censored) and an optional
``group`` label. Rows are partitioned by group and each group's sample is
sorted ascending by time with events ordered before censorings at ties.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping

from .errors import ParseError, SchemaError, SurvmrlError

DEFAULT_GROUP = "all"


@dataclass(frozen=True)
class Observation:
    """One subject: observed time, event indicator, group label."""

    time: float
    status: int
    group: str

    def __post_init__(self):
        # normalize numpy scalars so exports and comparisons stay plain floats
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "status", int(self.status))
        if not (math.isfinite(self.time) and self.time >= 0.0):
            raise ValueError(f"time must be finite and >= 0, got {self.time!r}")
        if self.status not in (0, 1):
            raise ValueError(f"status must be 0 or 1, got {self.status!r}")
        if not self.group:
            raise ValueError("group label must be non-empty")


@dataclass(frozen=True)
class SurvivalSample:
    """A non-empty group of observations sorted ascending by time.

    At equal times, events (status 1) precede censorings (status 0); this
    is the standard tie convention for product-limit estimation.
    """

    observations: tuple[Observation, ...]

    def __post_init__(self):
        if not self.observations:
            raise ValueError("a sample needs at least one observation")
        for a, b in zip(self.observations, self.observations[1:]):
            if a.time > b.time or (a.time == b.time and a.status < b.status):
                raise ValueError("observations must be sorted by time, events first at ties")

    @classmethod
    def from_observations(cls, observations: Iterable[Observation]) -> "SurvivalSample":
        ordered = sorted(observations, key=lambda o: (o.time, -o.status))
        return cls(tuple(ordered))

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def max_time(self) -> float:
        return self.observations[-1].time

    def times(self) -> tuple[float, ...]:
        return tuple(o.time for o in self.observations)

    def statuses(self) -> tuple[int, ...]:
        return tuple(o.status for o in self.observations)


def _decode(source: str | bytes | os.PathLike | BinaryIO | io.TextIOBase) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
    elif isinstance(source, bytes):
        raw = source
    elif isinstance(source, io.TextIOBase):
        return source.read()
    else:
        raw = source.read()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"input is not valid UTF-8: {exc}") from None


def load_dataset(
    source: str | bytes | os.PathLike | BinaryIO | io.TextIOBase,
    *,
    time_col: str = "time",
    status_col: str = "status",
    group_col: str = "group",
) -> dict[str, SurvivalSample]:
    """Parse a CSV source into one SurvivalSample per group label.

    ``source`` may be a path, raw bytes, or an open file. The header must
    contain ``time_col`` and ``status_col``; ``group_col`` is optional and
    defaults every row to group "all" when absent. Columns outside these
    three are a schema error. Blank lines are ignored; any malformed row
    raises a ParseError naming its 1-based data row number.
    """
    text = _decode(source)
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise SchemaError("empty dataset")

    header = [h.strip() for h in rows[0]]
    known = {time_col, status_col, group_col}
    unknown = [h for h in header if h not in known]
    if unknown:
        raise SchemaError(f"unknown column(s): {', '.join(unknown)}")
    if len(set(header)) != len(header):
        raise SchemaError("duplicate column names in header")
    for required in (time_col, status_col):
        if required not in header:
            raise SchemaError(f"missing required column: {required}")
    if len(rows) == 1:
        raise SchemaError("empty dataset")

    idx = {name: header.index(name) for name in header}
    has_group = group_col in idx

    grouped: dict[str, list[Observation]] = {}
    for row_number, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ParseError(row_number, f"expected {len(header)} fields, got {len(row)}")
        time_text = row[idx[time_col]].strip()
        status_text = row[idx[status_col]].strip()
        try:
            time = float(time_text)
        except ValueError:
            raise ParseError(row_number, f"time is not numeric: {time_text!r}") from None
        if not math.isfinite(time) or time < 0.0:
            raise ParseError(row_number, f"time must be finite and >= 0, got {time_text!r}")
        try:
            status_value = float(status_text)
        except ValueError:
            raise ParseError(row_number, f"status is not numeric: {status_text!r}") from None
        if status_value not in (0.0, 1.0):
            raise ParseError(row_number, f"status must be 0 or 1, got {status_text!r}")
        group = row[idx[group_col]].strip() if has_group else DEFAULT_GROUP
        if not group:
            raise ParseError(row_number, "group label is empty")
        grouped.setdefault(group, []).append(
            Observation(time=time, status=int(status_value), group=group)
        )

    return {
        label: SurvivalSample.from_observations(observations)
        for label, observations in grouped.items()
    }


def dump_dataset(samples: Mapping[str, SurvivalSample]) -> bytes:
    """Serialize samples back to the input CSV schema (UTF-8 bytes).

    Times are written with full precision so a dump/load round trip
    reproduces the samples exactly.
    """
    if not samples:
        raise SurvmrlError("nothing to export: no samples")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["time", "status", "group"])
    for label in samples:
        for obs in samples[label].observations:
            writer.writerow([repr(obs.time), obs.status, obs.group])
    return out.getvalue().encode("utf-8")
