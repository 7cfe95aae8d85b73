"""Raw-table cleanup: integration, column reduction, IQR repair, scaling.

All functions are pure; the :class:`Scaler` is immutable once fitted so it can
be shared across threads and persisted inside model bundles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    IntegrationError,
    RepairError,
    VitalRangeError,
)


@dataclass
class RawTable:
    """One source file: rows keyed by case_id, string-valued columns."""

    name: str
    rows: list[tuple[str, dict[str, str]]]

    def __post_init__(self):
        for case_id, _ in self.rows:
            if not case_id:
                raise IntegrationError(f"table {self.name!r} has a row with empty case_id")


@dataclass
class MergedTable:
    columns: tuple[str, ...]
    rows: dict[str, dict[str, str]]  # case_id -> column -> value
    conflicts: int = 0


def merge_tables(tables: list[RawTable]) -> MergedTable:
    """Join tables on case_id; first table wins on conflicting non-empty values."""
    if not tables:
        raise IntegrationError("need at least one table to merge")
    columns: list[str] = []
    seen_columns: set[str] = set()
    merged: dict[str, dict[str, str]] = {}
    conflicts = 0
    for table in tables:
        seen_cases: set[str] = set()
        for case_id, row in table.rows:
            if case_id in seen_cases:
                raise IntegrationError(
                    f"duplicate case_id {case_id!r} within table {table.name!r}"
                )
            seen_cases.add(case_id)
            target = merged.setdefault(case_id, {})
            for column, value in row.items():
                if column not in seen_columns:
                    seen_columns.add(column)
                    columns.append(column)
                existing = target.get(column, "")
                if existing and value and existing != value:
                    conflicts += 1  # keep the first-table value
                    continue
                if not existing:
                    target[column] = value
    return MergedTable(columns=tuple(columns), rows=merged, conflicts=conflicts)


@dataclass
class DropReport:
    dropped: list[tuple[str, str]] = field(default_factory=list)  # (column, reason)

    def lines(self) -> list[str]:
        return [f"{column}\t{reason}" for column, reason in self.dropped]


def reduce_columns(
    table: MergedTable,
    min_fill: float = 0.02,
    duplicate_threshold: float = 0.999,
) -> tuple[MergedTable, DropReport]:
    """Drop near-empty columns and near-duplicate pairs (first occurrence kept)."""
    if not table.rows:
        raise IntegrationError("cannot reduce an empty table")
    n = len(table.rows)
    case_ids = list(table.rows)
    report = DropReport()

    filled: dict[str, list[str | None]] = {}
    survivors: list[str] = []
    for column in table.columns:
        values = [table.rows[cid].get(column) or None for cid in case_ids]
        fill = sum(v is not None for v in values) / n
        if fill < min_fill:
            report.dropped.append((column, "below fill threshold"))
        else:
            survivors.append(column)
            filled[column] = values

    kept: list[str] = []
    for column in survivors:
        duplicate_of = None
        for earlier in kept:
            a, b = filled[earlier], filled[column]
            both = [(x, y) for x, y in zip(a, b) if x is not None and y is not None]
            if not both:
                continue
            same = sum(x == y for x, y in both) / len(both)
            if same >= duplicate_threshold:
                duplicate_of = earlier
                break
        if duplicate_of is None:
            kept.append(column)
        else:
            report.dropped.append((column, f"duplicate of {duplicate_of}"))

    rows = {
        cid: {c: v for c, v in row.items() if c in set(kept)}
        for cid, row in table.rows.items()
    }
    return MergedTable(columns=tuple(kept), rows=rows, conflicts=table.conflicts), report


@dataclass(frozen=True)
class IqrBounds:
    q1: float
    q3: float

    @property
    def lower(self) -> float:
        return self.q1 - 1.5 * (self.q3 - self.q1)

    @property
    def upper(self) -> float:
        return self.q3 + 1.5 * (self.q3 - self.q1)

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _interpolated_quantile(sorted_values: np.ndarray, fraction: float) -> float:
    position = fraction * (len(sorted_values) - 1)
    lo = int(np.floor(position))
    hi = int(np.ceil(position))
    frac = position - lo
    return float(sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]))


def iqr_bounds(values) -> IqrBounds:
    """Quartiles by linear interpolation at 0.25/0.75 of (n-1) on the sorted sample."""
    arr = np.asarray(values, dtype=np.float64)
    arr = arr[np.isfinite(arr)]
    if arr.size < 4:
        raise InsufficientDataError(f"need >= 4 finite values, got {arr.size}")
    arr = np.sort(arr)
    return IqrBounds(q1=_interpolated_quantile(arr, 0.25), q3=_interpolated_quantile(arr, 0.75))


def repair_outliers(column, bounds: IqrBounds) -> tuple[np.ndarray, int]:
    """Replace out-of-fence values with the mean of the in-fence ones."""
    arr = np.asarray(column, dtype=np.float64)
    inside = (arr >= bounds.lower) & (arr <= bounds.upper)
    if not inside.any():
        raise RepairError("every value is out of bounds; column unusable")
    repaired = arr.copy()
    repaired[~inside] = arr[inside].mean()
    return repaired, int((~inside).sum())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def normalize_token(word: str, dictionary: dict[str, str], max_distance: int = 2) -> str:
    """Map a raw token to its canonical form via the synonym dictionary.

    Exact (case-insensitive) hits win; otherwise the canonical whose closest
    variant is within ``max_distance`` edits, ties going to the
    lexicographically smallest canonical; unknown tokens pass through lowercased.
    """
    token = word.lower()
    if token in dictionary:
        return dictionary[token]
    best: tuple[int, str] | None = None
    for variant, canonical in dictionary.items():
        distance = levenshtein(token, variant.lower())
        if distance > max_distance:
            continue
        key = (distance, canonical)
        if best is None or key < best:
            best = key
    return best[1] if best is not None else token


def derive_map(systolic: float, diastolic: float) -> float:
    """Mean arterial pressure from the standard (sys + 2*dia)/3 estimate."""
    if diastolic <= 0 or systolic < diastolic:
        raise VitalRangeError("systolic/diastolic", (systolic, diastolic), ">0", "sys>=dia")
    return (systolic + 2.0 * diastolic) / 3.0


class Scaler:
    """Per-column standardization (population stddev); selected columns only.

    Columns listed in ``scale_columns`` are shifted/scaled to mean 0, stddev 1
    on the fitting data; everything else (flags, ordinals) passes through.
    Constant columns are recorded in ``constant_columns`` and left alone.
    """

    def __init__(self, scale_columns=None):
        self.scale_columns = None if scale_columns is None else tuple(scale_columns)
        self.means_ = None
        self.stds_ = None
        self.scaled_mask_ = None
        self.constant_columns_ = None

    def fit(self, X) -> "Scaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        d = X.shape[1]
        eligible = (
            np.ones(d, dtype=bool)
            if self.scale_columns is None
            else np.isin(np.arange(d), np.asarray(self.scale_columns, dtype=int))
        )
        means = X.mean(axis=0)
        stds = X.std(axis=0)  # population
        constant = eligible & (stds == 0.0)
        self.scaled_mask_ = eligible & (stds > 0.0)
        self.means_ = np.where(self.scaled_mask_, means, 0.0)
        self.stds_ = np.where(self.scaled_mask_, stds, 1.0)
        self.constant_columns_ = tuple(np.flatnonzero(constant).tolist())
        return self

    def transform(self, X) -> np.ndarray:
        if self.means_ is None:
            raise RuntimeError("scaler not fitted")
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.shape[1] != self.means_.shape[0]:
            raise ValueError(f"expected width {self.means_.shape[0]}, got {X.shape[1]}")
        out = (X - self.means_) / self.stds_
        return out[0] if single else out

    def fit_transform(self, X) -> np.ndarray:
        return self.fit(X).transform(X)

    def to_state(self) -> dict:
        return {
            "scale_columns": list(self.scale_columns) if self.scale_columns is not None else None,
            "means": self.means_.tolist(),
            "stds": self.stds_.tolist(),
            "scaled_mask": [bool(b) for b in self.scaled_mask_],
            "constant_columns": list(self.constant_columns_),
        }

    @classmethod
    def from_state(cls, state: dict) -> "Scaler":
        scaler = cls(
            scale_columns=None if state["scale_columns"] is None else tuple(state["scale_columns"])
        )
        scaler.means_ = np.asarray(state["means"], dtype=np.float64)
        scaler.stds_ = np.asarray(state["stds"], dtype=np.float64)
        scaler.scaled_mask_ = np.asarray(state["scaled_mask"], dtype=bool)
        scaler.constant_columns_ = tuple(state["constant_columns"])
        return scaler
