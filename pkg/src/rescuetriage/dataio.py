"""CSV schemas: datasets (features + label columns) and test-case files.

The header starts with ``case_id``, then the 32 canonical features, then any
extra feature columns, then ``label_<complication>`` columns for datasets.
Test-case files are the same schema minus the label columns.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError
from .preprocess import derive_map
from .records import (
    COMPLICATIONS,
    FEATURE_NAMES,
    FLAG_NAMES,
    VITAL_NAMES,
    Complication,
    LabeledDataset,
    ObservationFlags,
    PatientRecord,
    VitalSigns,
)

LABEL_COLUMNS = tuple(c.label_column for c in COMPLICATIONS)


def _format_value(name: str, value: float) -> str:
    if name in FLAG_NAMES or name in ("gcs_total", "circulation_state"):
        return str(int(round(value)))
    return repr(float(value))


def write_dataset_csv(dataset: LabeledDataset, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = dataset.feature_names
    X = dataset.feature_matrix()
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["case_id", *names, *LABEL_COLUMNS])
        for i, record in enumerate(dataset.records):
            row = [record.case_id]
            row.extend(_format_value(name, X[i, j]) for j, name in enumerate(names))
            row.extend(str(int(dataset.labels[c][i])) for c in COMPLICATIONS)
            writer.writerow(row)
    return path


def _parse_record(case_id: str, row: dict[str, str]) -> PatientRecord:
    values = {}
    for name in VITAL_NAMES:
        cell = (row.get(name) or "").strip()
        if not cell:
            if name == "mean_arterial_pressure":
                values[name] = None  # derived below
                continue
            raise DataError(f"case {case_id!r}: missing value for {name}")
        values[name] = float(cell)
    if values["mean_arterial_pressure"] is None:
        values["mean_arterial_pressure"] = derive_map(
            values["systolic_bp"], values["diastolic_bp"]
        )
    vitals = VitalSigns(
        respiratory_rate=values["respiratory_rate"],
        systolic_bp=values["systolic_bp"],
        diastolic_bp=values["diastolic_bp"],
        mean_arterial_pressure=values["mean_arterial_pressure"],
        pulse_rate=values["pulse_rate"],
        blood_glucose=values["blood_glucose"],
        spo2=values["spo2"],
        body_temperature=values["body_temperature"],
        gcs_total=int(round(float(values["gcs_total"]))),
        circulation_state=int(round(float(values["circulation_state"]))),
    )
    flags = ObservationFlags(
        **{name: float(row.get(name) or 0.0) != 0.0 for name in FLAG_NAMES}
    )
    return PatientRecord(case_id=case_id, vitals=vitals, flags=flags)


def _check_header(header: list[str], require_labels: bool) -> list[str]:
    if not header or header[0] != "case_id":
        raise DataError("first column must be case_id")
    missing = [name for name in FEATURE_NAMES if name not in header]
    if missing:
        raise DataError(f"missing feature column {missing[0]}")
    if require_labels:
        for column in LABEL_COLUMNS:
            if column not in header:
                raise DataError(f"missing label column {column}")
    return [
        c
        for c in header[1:]
        if c not in FEATURE_NAMES and c not in LABEL_COLUMNS
    ]


def read_dataset_csv(path) -> LabeledDataset:
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise DataError(f"{path} is empty")
        extra_names = _check_header(list(reader.fieldnames), require_labels=True)
        records = []
        extras = []
        labels: dict[Complication, list[int]] = {c: [] for c in COMPLICATIONS}
        for row in reader:
            records.append(_parse_record(row["case_id"], row))
            extras.append([float(row.get(name) or 0.0) for name in extra_names])
            for comp in COMPLICATIONS:
                labels[comp].append(int(float(row[comp.label_column])))
    return LabeledDataset(
        records=tuple(records),
        labels={c: np.asarray(v, dtype=np.int64) for c, v in labels.items()},
        extra_feature_names=tuple(extra_names),
        extra_features=np.asarray(extras, dtype=np.float64) if extra_names else None,
    )


def read_records_csv(path) -> list[PatientRecord]:
    """Test-case files: dataset schema minus labels (label columns ignored)."""
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise DataError(f"{path} is empty")
        _check_header(list(reader.fieldnames), require_labels=False)
        return [_parse_record(row["case_id"], row) for row in reader]


def write_records_csv(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["case_id", *FEATURE_NAMES])
        for record in records:
            vec = record.encode()
            row = [record.case_id]
            row.extend(_format_value(name, vec[j]) for j, name in enumerate(FEATURE_NAMES))
            writer.writerow(row)
    return path


def load_bundled_usecases() -> list[PatientRecord]:
    """The six packaged demonstration cases."""
    source = resources.files("rescuetriage.data").joinpath("usecases.csv")
    with resources.as_file(source) as path:
        return read_records_csv(path)


def bundled_usecases_path() -> Path:
    source = resources.files("rescuetriage.data").joinpath("usecases.csv")
    with resources.as_file(source) as path:
        return Path(path)
