"""Panel ingestion: loader adapters, cleaning, and the uniform
(identifier, timestep, target) interface.

A Panel holds one or more aligned demand series at a single recording
frequency. Timestamps are normalized to 0-based contiguous integer timesteps
per series at load time; everything downstream is calendar-free.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    DuplicateKey,
    FrequencyViolation,
    GapError,
    MissingColumn,
    NegativeTarget,
    PanelError,
    ParseError,
    SchemaCollision,
    SeriesTooShort,
)


@dataclass(frozen=True, order=True)
class SeriesKey:
    """Composite series identity, e.g. (site, product)."""

    parts: tuple[str, ...]

    def __post_init__(self):
        if not self.parts:
            raise PanelError("SeriesKey needs at least one part")
        object.__setattr__(self, "parts", tuple(str(p) for p in self.parts))

    def __str__(self) -> str:
        return "/".join(p.replace("\\", "\\\\").replace("/", "\\/") for p in self.parts)


class Frequency(enum.Enum):
    """Recording frequency with the fixed day scaling used by DOI."""

    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"

    @property
    def days_per_period(self) -> float:
        return {"daily": 1.0, "weekly": 7.0, "monthly": 30.0}[self.value]

    @classmethod
    def from_name(cls, name: str) -> "Frequency":
        try:
            return cls(name.lower())
        except ValueError:
            raise PanelError(f"unknown frequency {name!r}") from None


class Observation(NamedTuple):
    timestep: int
    target: float
    exogenous: dict[str, float]


MISSING_POLICIES = ("drop_row", "zero_fill", "forward_fill")
GAP_POLICIES = ("zero", "forward", "reject")
NEGATIVE_POLICIES = ("clamp_zero", "reject")


@dataclass(frozen=True)
class CleaningPolicy:
    """Closed, declarative cleaning rules applied by the loader.

    missing: what to do with rows whose target (or an exogenous cell) is
    empty. forward_fill falls back to 0 when nothing precedes.
    gap_fill: how to treat skipped periods between a series' first and last
    timestamp. zero inserts zero-demand rows (exogenous forward-filled,
    covariates being levels rather than flows); forward copies the previous
    row; reject raises.
    negative_target: clamp to zero or reject the file.
    """

    missing: str = "forward_fill"
    gap_fill: str = "zero"
    negative_target: str = "clamp_zero"

    def __post_init__(self):
        if self.missing not in MISSING_POLICIES:
            raise PanelError(f"missing policy must be one of {MISSING_POLICIES}")
        if self.gap_fill not in GAP_POLICIES:
            raise PanelError(f"gap_fill policy must be one of {GAP_POLICIES}")
        if self.negative_target not in NEGATIVE_POLICIES:
            raise PanelError(f"negative_target policy must be one of {NEGATIVE_POLICIES}")


DEFAULT_CLEANING = CleaningPolicy()


class _Series(NamedTuple):
    targets: np.ndarray
    exogenous: np.ndarray  # shape (n, n_exo_columns)


class Panel:
    """Immutable collection of aligned series sharing one frequency.

    Exogenous columns are kept in alphabetical order so that the canonical
    CSV round-trips to an identical Panel. The cleaning policy travels with
    the panel (joins reuse its `missing` rule) but does not participate in
    equality.
    """

    __slots__ = ("frequency", "exogenous_schema", "cleaning", "_series")

    def __init__(
        self,
        frequency: Frequency,
        series: Mapping[SeriesKey, tuple[np.ndarray, np.ndarray]],
        exogenous_schema: Sequence[str] = (),
        cleaning: CleaningPolicy = DEFAULT_CLEANING,
    ):
        schema = tuple(exogenous_schema)
        if len(set(schema)) != len(schema):
            raise SchemaCollision(f"duplicate exogenous column in {schema}")
        order = np.argsort(np.array(schema, dtype=object)) if schema else []
        sorted_schema = tuple(schema[i] for i in order)

        store: dict[SeriesKey, _Series] = {}
        for key in sorted(series):
            targets, exo = series[key]
            targets = np.ascontiguousarray(targets, dtype=np.float64)
            if targets.ndim != 1 or targets.size == 0:
                raise PanelError(f"series {key} is empty or not 1-d")
            if not np.isfinite(targets).all():
                raise PanelError(f"series {key} has non-finite targets")
            if (targets < 0).any():
                raise PanelError(f"series {key} has negative targets")
            exo = np.ascontiguousarray(exo, dtype=np.float64).reshape(len(targets), -1)
            if exo.shape[1] != len(schema):
                raise PanelError(
                    f"series {key}: {exo.shape[1]} exogenous columns, schema has {len(schema)}"
                )
            if exo.size and not np.isfinite(exo).all():
                raise PanelError(f"series {key} has non-finite exogenous values")
            exo = exo[:, list(order)] if schema else exo
            targets.setflags(write=False)
            exo.setflags(write=False)
            store[key] = _Series(targets, exo)
        if not store:
            raise PanelError("a Panel needs at least one series")

        object.__setattr__(self, "frequency", frequency)
        object.__setattr__(self, "exogenous_schema", sorted_schema)
        object.__setattr__(self, "cleaning", cleaning)
        object.__setattr__(self, "_series", store)

    def __setattr__(self, name, value):
        raise AttributeError("Panel is immutable")

    # --- access -------------------------------------------------------------

    def keys(self) -> tuple[SeriesKey, ...]:
        return tuple(self._series)

    @property
    def n_series(self) -> int:
        return len(self._series)

    def __contains__(self, key: SeriesKey) -> bool:
        return key in self._series

    def length(self, key: SeriesKey) -> int:
        return len(self._series[key].targets)

    def lengths(self) -> dict[SeriesKey, int]:
        return {k: len(s.targets) for k, s in self._series.items()}

    def targets(self, key: SeriesKey) -> np.ndarray:
        return self._series[key].targets

    def exogenous_values(self, key: SeriesKey) -> np.ndarray:
        return self._series[key].exogenous

    def observations(self, key: SeriesKey) -> Iterator[Observation]:
        s = self._series[key]
        for t in range(len(s.targets)):
            exo = {c: float(s.exogenous[t, i]) for i, c in enumerate(self.exogenous_schema)}
            yield Observation(t, float(s.targets[t]), exo)

    def items(self) -> Iterator[tuple[SeriesKey, Iterator[Observation]]]:
        for key in self._series:
            yield key, self.observations(key)

    # --- derived panels -------------------------------------------------------

    def _rebuild(self, series: Mapping[SeriesKey, tuple[np.ndarray, np.ndarray]], schema=None):
        return Panel(
            self.frequency,
            series,
            self.exogenous_schema if schema is None else schema,
            self.cleaning,
        )

    def drop_tail(self, n: int) -> "Panel":
        """Remove the last n observations of every series."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if n == 0:
            return self
        short = [k for k, s in self._series.items() if len(s.targets) <= n]
        if short:
            raise SeriesTooShort(
                f"cannot drop {n} trailing observations from {[str(k) for k in short]}",
                keys=short,
            )
        return self._rebuild(
            {k: (s.targets[:-n], s.exogenous[:-n]) for k, s in self._series.items()}
        )

    def tail(self, n: int) -> "Panel":
        """Keep only the last n observations of every series."""
        if n < 1:
            raise ValueError("n must be >= 1")
        short = [k for k, s in self._series.items() if len(s.targets) < n]
        if short:
            raise SeriesTooShort(
                f"series shorter than {n}: {[str(k) for k in short]}", keys=short
            )
        return self._rebuild(
            {k: (s.targets[-n:], s.exogenous[-n:]) for k, s in self._series.items()}
        )

    def subset(self, keys: Iterable[SeriesKey]) -> "Panel":
        keys = list(keys)
        missing = [k for k in keys if k not in self._series]
        if missing:
            raise PanelError(f"keys not in panel: {[str(k) for k in missing]}")
        return self._rebuild({k: tuple(self._series[k]) for k in keys})

    def drop_series(self, keys: Iterable[SeriesKey]) -> "Panel":
        drop = set(keys)
        keep = {k: tuple(s) for k, s in self._series.items() if k not in drop}
        if not keep:
            raise PanelError("dropping these keys would empty the panel")
        return self._rebuild(keep)

    # --- equality ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        if self.frequency is not other.frequency:
            return False
        if self.exogenous_schema != other.exogenous_schema:
            return False
        if self.keys() != other.keys():
            return False
        for k in self._series:
            a, b = self._series[k], other._series[k]
            if a.targets.shape != b.targets.shape or not np.array_equal(a.targets, b.targets):
                return False
            if not np.array_equal(a.exogenous, b.exogenous):
                return False
        return True

    def __repr__(self) -> str:
        return (
            f"Panel({self.frequency.value}, {self.n_series} series, "
            f"exogenous={list(self.exogenous_schema)})"
        )


@dataclass(frozen=True)
class LoaderSpec:
    """Declarative per-dataset adapter: where the file is and how to read it."""

    path: str | Path
    key_columns: tuple[str, ...]
    timestamp_column: str
    target_column: str
    frequency: Frequency
    exogenous_columns: tuple[str, ...] = ()
    timestamp_format: str = "%Y-%m-%d"  # "int" means already-integer period indices
    cleaning: CleaningPolicy = DEFAULT_CLEANING

    def __post_init__(self):
        if not self.key_columns:
            raise PanelError("key_columns must be non-empty")
        object.__setattr__(self, "key_columns", tuple(self.key_columns))
        object.__setattr__(self, "exogenous_columns", tuple(self.exogenous_columns))


@dataclass
class CleaningReport:
    """What the loader actually did, for ingest summaries."""

    rows_read: int = 0
    rows_dropped: int = 0
    missing_filled: int = 0
    gaps_filled: int = 0
    negatives_clamped: int = 0

    def as_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "missing_filled": self.missing_filled,
            "gaps_filled": self.gaps_filled,
            "negatives_clamped": self.negatives_clamped,
        }


def _period_index(stamp: str, fmt: str, frequency: Frequency, line: int) -> int:
    if fmt == "int":
        try:
            return int(stamp)
        except ValueError:
            raise ParseError(f"bad integer timestep {stamp!r}", line) from None
    try:
        dt = datetime.strptime(stamp, fmt)
    except ValueError:
        raise ParseError(f"timestamp {stamp!r} does not match {fmt!r}", line) from None
    if frequency is Frequency.MONTHLY:
        return dt.year * 12 + dt.month - 1
    if frequency is Frequency.WEEKLY:
        return dt.date().toordinal() // 7
    return dt.date().toordinal()


def _parse_cell(raw: str, column: str, line: int) -> float | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"column {column!r}: cannot parse {raw!r} as a number", line) from None
    if not np.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {raw!r}", line)
    return value


def load_panel(spec: LoaderSpec) -> Panel:
    """Load, clean, and normalize one CSV into a Panel."""
    panel, _ = load_panel_detailed(spec)
    return panel


def load_panel_detailed(spec: LoaderSpec) -> tuple[Panel, CleaningReport]:
    """load_panel plus a report of the cleaning actions taken."""
    report = CleaningReport()
    policy = spec.cleaning
    rows_by_key: dict[SeriesKey, dict[int, tuple[float | None, list[float | None], int]]] = {}

    with open(spec.path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file has no header row", 1) from None
        col_index = {name: i for i, name in enumerate(header)}
        wanted = (
            list(spec.key_columns)
            + [spec.timestamp_column, spec.target_column]
            + list(spec.exogenous_columns)
        )
        absent = [c for c in wanted if c not in col_index]
        if absent:
            raise MissingColumn(f"columns {absent} not in header {header}")

        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, found {len(row)}", line
                )
            report.rows_read += 1
            key = SeriesKey(tuple(row[col_index[c]] for c in spec.key_columns))
            period = _period_index(
                row[col_index[spec.timestamp_column]], spec.timestamp_format,
                spec.frequency, line,
            )
            target = _parse_cell(row[col_index[spec.target_column]], spec.target_column, line)
            exo = [
                _parse_cell(row[col_index[c]], c, line) for c in spec.exogenous_columns
            ]
            per_key = rows_by_key.setdefault(key, {})
            if period in per_key:
                raise FrequencyViolation(
                    f"series {key}: two observations in period {period} "
                    f"(lines {per_key[period][2]} and {line})"
                )
            per_key[period] = (target, exo, line)

    if not rows_by_key:
        raise ParseError("file has no data rows", 1)

    n_exo = len(spec.exogenous_columns)
    series: dict[SeriesKey, tuple[np.ndarray, np.ndarray]] = {}
    for key in sorted(rows_by_key):
        per_key = rows_by_key[key]
        periods = sorted(per_key)

        # missing-value policy on parsed rows, in period order
        cleaned: list[tuple[int, float, list[float], int]] = []
        last_target: float | None = None
        last_exo: list[float | None] = [None] * n_exo
        for p in periods:
            target, exo, line = per_key[p]
            has_missing = target is None or any(v is None for v in exo)
            if has_missing and policy.missing == "drop_row":
                report.rows_dropped += 1
                continue
            if target is None:
                report.missing_filled += 1
                target = 0.0 if policy.missing == "zero_fill" else (
                    last_target if last_target is not None else 0.0
                )
            exo_filled: list[float] = []
            for i, v in enumerate(exo):
                if v is None:
                    report.missing_filled += 1
                    if policy.missing == "zero_fill":
                        v = 0.0
                    else:
                        v = last_exo[i] if last_exo[i] is not None else 0.0
                exo_filled.append(v)
            if target < 0:
                if policy.negative_target == "reject":
                    raise NegativeTarget(
                        f"series {key}: negative target {target} on line {line}"
                    )
                report.negatives_clamped += 1
                target = 0.0
            last_target = target
            last_exo = list(exo_filled)
            cleaned.append((p, target, exo_filled, line))

        if not cleaned:
            report.rows_dropped += 0
            continue  # every row dropped; series vanishes

        # gap policy between first and last period
        targets: list[float] = []
        exo_rows: list[list[float]] = []
        prev_p = None
        for p, target, exo_filled, _line in cleaned:
            if prev_p is not None and p > prev_p + 1:
                gap = p - prev_p - 1
                if policy.gap_fill == "reject":
                    raise GapError(
                        f"series {key}: {gap} missing period(s) between {prev_p} and {p}"
                    )
                for _ in range(gap):
                    report.gaps_filled += 1
                    if policy.gap_fill == "zero":
                        targets.append(0.0)
                        exo_rows.append(list(exo_rows[-1]) if exo_rows else [0.0] * n_exo)
                    else:  # forward
                        targets.append(targets[-1])
                        exo_rows.append(list(exo_rows[-1]))
            targets.append(target)
            exo_rows.append(exo_filled)
            prev_p = p

        series[key] = (
            np.asarray(targets, dtype=np.float64),
            np.asarray(exo_rows, dtype=np.float64).reshape(len(targets), n_exo),
        )

    if not series:
        raise PanelError("cleaning removed every row; no series left")

    panel = Panel(spec.frequency, series, spec.exogenous_columns, policy)
    return panel, report


def split_holdout(panel: Panel, horizon: int) -> tuple[Panel, Panel]:
    """Reserve the final `horizon` observations of each series as a test panel."""
    if horizon < 1:
        raise ValueError("horizon must be a positive integer")
    short = [k for k in panel.keys() if panel.length(k) <= horizon]
    if short:
        raise SeriesTooShort(
            f"series not longer than horizon {horizon}: {[str(k) for k in short]}",
            keys=short,
        )
    return panel.drop_tail(horizon), panel.tail(horizon)


def join_exogenous(
    panel: Panel,
    table: Mapping | Iterable[tuple],
    on: str | int,
    columns: Sequence[str] | None = None,
) -> Panel:
    """Append external columns to a panel.

    `on` is either "timestep" (table keyed by integer timestep) or an integer
    key-part position (table keyed by that part's value). Unmatched rows are
    filled with the panel policy's `missing` rule applied to the new columns;
    under drop_row, unmatched observations are removed and the series
    re-indexed to stay contiguous.
    """
    if isinstance(table, Mapping):
        rows = dict(table)
    else:
        rows = {}
        for k, v in table:
            if k in rows:
                raise DuplicateKey(f"duplicate key {k!r} in external table")
            rows[k] = v

    if columns is None:
        col_set: list[str] = []
        for v in rows.values():
            for c in v:
                if c not in col_set:
                    col_set.append(c)
        columns = sorted(col_set)
    columns = list(columns)
    if not columns:
        raise PanelError("no columns to join (empty table and no explicit columns)")
    for c in columns:
        if c in panel.exogenous_schema:
            raise SchemaCollision(f"column {c!r} already in exogenous schema")
    for k, v in rows.items():
        missing_cols = [c for c in columns if c not in v]
        if missing_cols:
            raise PanelError(f"table row {k!r} lacks columns {missing_cols}")

    if on != "timestep" and not isinstance(on, int):
        raise PanelError("on must be 'timestep' or a key-part index")

    policy = panel.cleaning.missing
    new_series: dict[SeriesKey, tuple[np.ndarray, np.ndarray]] = {}
    for key in panel.keys():
        targets = panel.targets(key)
        exo = panel.exogenous_values(key)
        n = len(targets)
        new_cols = np.empty((n, len(columns)))
        matched = np.ones(n, dtype=bool)
        for t in range(n):
            lookup = t if on == "timestep" else key.parts[on]
            row = rows.get(lookup)
            if row is None:
                matched[t] = False
                continue
            for j, c in enumerate(columns):
                new_cols[t, j] = float(row[c])
        if policy == "drop_row":
            keep = matched
            if not keep.any():
                raise PanelError(f"series {key}: join dropped every observation")
            targets, exo, new_cols = targets[keep], exo[keep], new_cols[keep]
        else:
            fill = np.zeros(len(columns))
            for t in range(n):
                if matched[t]:
                    if policy == "forward_fill":
                        fill = new_cols[t]
                    continue
                new_cols[t] = fill if policy == "forward_fill" else 0.0
        new_series[key] = (targets, np.hstack([exo, new_cols]))

    return Panel(
        panel.frequency,
        new_series,
        tuple(panel.exogenous_schema) + tuple(columns),
        panel.cleaning,
    )


# --- canonical CSV -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() and abs(x) < 2**53 else repr(float(x))


def write_canonical_csv(panel: Panel, path: str | Path) -> None:
    """Canonical export: key parts, timestep, target, exogenous (alphabetical)."""
    n_parts = len(next(iter(panel.keys())).parts)
    header = [f"key_{i}" for i in range(n_parts)] + ["timestep", "target"] + list(
        panel.exogenous_schema
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for key in panel.keys():
            targets = panel.targets(key)
            exo = panel.exogenous_values(key)
            for t in range(len(targets)):
                writer.writerow(
                    list(key.parts)
                    + [str(t), _fmt(targets[t])]
                    + [_fmt(v) for v in exo[t]]
                )


def read_canonical_csv(
    path: str | Path,
    frequency: Frequency,
    cleaning: CleaningPolicy = DEFAULT_CLEANING,
) -> Panel:
    """Reload a canonical export. Frequency is not stored in-band."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh))
    key_cols = []
    i = 0
    while f"key_{i}" in header:
        key_cols.append(f"key_{i}")
        i += 1
    if not key_cols or "timestep" not in header or "target" not in header:
        raise MissingColumn(f"not a canonical panel file, header {header}")
    exo_cols = [c for c in header if c not in key_cols and c not in ("timestep", "target")]
    spec = LoaderSpec(
        path=path,
        key_columns=tuple(key_cols),
        timestamp_column="timestep",
        target_column="target",
        frequency=frequency,
        exogenous_columns=tuple(exo_cols),
        timestamp_format="int",
        cleaning=cleaning,
    )
    return load_panel(spec)
