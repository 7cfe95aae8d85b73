"""Domain vocabulary: complications, patient records and the canonical feature schema.

Every patient snapshot encodes to exactly 32 numbers: 10 vitals followed by
22 observation flags, in the declaration order below. That order is the wire
contract for model bundles (``SCHEMA_VERSION``) and must not be reordered.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

import numpy as np

from .errors import RecordInvariantError, VitalRangeError

SCHEMA_VERSION = 1


class Complication(enum.Enum):
    """The six complication categories, in fixed report order."""

    CARDIOVASCULAR = "cardiovascular"
    RESPIRATORY = "respiratory"
    NEUROLOGICAL = "neurological"
    PSYCHIATRIC = "psychiatric"
    ABDOMINAL = "abdominal"
    METABOLIC = "metabolic"

    def __str__(self) -> str:
        return self.value

    @property
    def label_column(self) -> str:
        return f"label_{self.value}"


COMPLICATIONS = tuple(Complication)

# name -> (lower, upper) inclusive valid range after preprocessing
VITAL_RANGES: dict[str, tuple[float, float]] = {
    "respiratory_rate": (0.0, 80.0),
    "systolic_bp": (40.0, 300.0),
    "diastolic_bp": (20.0, 200.0),
    "mean_arterial_pressure": (26.0, 233.0),
    "pulse_rate": (0.0, 300.0),
    "blood_glucose": (10.0, 1000.0),
    "spo2": (0.0, 100.0),
    "body_temperature": (25.0, 45.0),
    "gcs_total": (3, 15),
    "circulation_state": (0, 2),
}

VITAL_NAMES = tuple(VITAL_RANGES)

# Vitals a what-if deviation may rescale; circulation_state is ordinal and exempt.
CONTINUOUS_VITALS = tuple(n for n in VITAL_NAMES if n != "circulation_state")

# Vitals the IQR repair step applies to; gcs and circulation are ordinal scales
# whose quartiles collapse on typical cohorts, so repairing them erases signal.
REPAIRABLE_VITALS = tuple(
    n for n in VITAL_NAMES if n not in ("gcs_total", "circulation_state")
)


@dataclass(frozen=True)
class VitalSigns:
    respiratory_rate: float
    systolic_bp: float
    diastolic_bp: float
    mean_arterial_pressure: float
    pulse_rate: float
    blood_glucose: float
    spo2: float
    body_temperature: float
    gcs_total: int
    circulation_state: int

    def __post_init__(self):
        for name, (lo, hi) in VITAL_RANGES.items():
            value = getattr(self, name)
            if not np.isfinite(value) or not (lo <= value <= hi):
                raise VitalRangeError(name, value, lo, hi)
        if self.systolic_bp < self.diastolic_bp:
            raise RecordInvariantError(
                f"systolic_bp {self.systolic_bp} < diastolic_bp {self.diastolic_bp}"
            )

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, n)) for n in VITAL_NAMES)


FLAG_NAMES = (
    "chest_pain",
    "respiratory_distress",
    "abdominal_pain",
    "head_discomfort",
    "injury_present",
    "head_injury",
    "mentally_unfit",
    "consciousness_impaired",
    "communication_disorder",
    "alcohol_intoxication",
    "drug_intoxication",
    "pre_cardiac_illness",
    "pre_respiratory_illness",
    "pre_neurological_illness",
    "pre_psychiatric_illness",
    "pre_abdominal_illness",
    "pre_metabolic_illness",
    "seizure_observed",
    "paralysis_signs",
    "speech_disturbance",
    "nausea_vomiting",
    "dizziness",
)


@dataclass(frozen=True)
class ObservationFlags:
    chest_pain: bool = False
    respiratory_distress: bool = False
    abdominal_pain: bool = False
    head_discomfort: bool = False
    injury_present: bool = False
    head_injury: bool = False
    mentally_unfit: bool = False
    consciousness_impaired: bool = False
    communication_disorder: bool = False
    alcohol_intoxication: bool = False
    drug_intoxication: bool = False
    pre_cardiac_illness: bool = False
    pre_respiratory_illness: bool = False
    pre_neurological_illness: bool = False
    pre_psychiatric_illness: bool = False
    pre_abdominal_illness: bool = False
    pre_metabolic_illness: bool = False
    seizure_observed: bool = False
    paralysis_signs: bool = False
    speech_disturbance: bool = False
    nausea_vomiting: bool = False
    dizziness: bool = False

    def __post_init__(self):
        if self.head_injury and not self.injury_present:
            raise RecordInvariantError("head_injury=1 requires injury_present=1")

    def as_tuple(self) -> tuple[bool, ...]:
        return tuple(bool(getattr(self, n)) for n in FLAG_NAMES)


assert FLAG_NAMES == tuple(f.name for f in fields(ObservationFlags))

FEATURE_NAMES = VITAL_NAMES + FLAG_NAMES
assert len(FEATURE_NAMES) == 32


@dataclass(frozen=True)
class PatientRecord:
    """One rescue patient snapshot, keyed by an opaque case id."""

    case_id: str
    vitals: VitalSigns
    flags: ObservationFlags

    def encode(self) -> np.ndarray:
        """Canonical 32-element vector: vitals then flags as 0.0/1.0."""
        vec = np.empty(32, dtype=np.float64)
        vec[:10] = self.vitals.as_tuple()
        vec[10:] = [1.0 if f else 0.0 for f in self.flags.as_tuple()]
        return vec

    @classmethod
    def decode(cls, case_id: str, vector) -> "PatientRecord":
        """Inverse of :meth:`encode`; validates ranges on construction."""
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (32,):
            raise RecordInvariantError(f"expected 32 features, got shape {vec.shape}")
        vitals = VitalSigns(
            respiratory_rate=float(vec[0]),
            systolic_bp=float(vec[1]),
            diastolic_bp=float(vec[2]),
            mean_arterial_pressure=float(vec[3]),
            pulse_rate=float(vec[4]),
            blood_glucose=float(vec[5]),
            spo2=float(vec[6]),
            body_temperature=float(vec[7]),
            gcs_total=int(round(float(vec[8]))),
            circulation_state=int(round(float(vec[9]))),
        )
        flags = ObservationFlags(**{n: vec[10 + i] != 0.0 for i, n in enumerate(FLAG_NAMES)})
        return cls(case_id=case_id, vitals=vitals, flags=flags)


@dataclass(frozen=True)
class LabeledDataset:
    """Patient records plus per-complication 0/1 label columns.

    ``extra_feature_names``/``extra_features`` carry synthetic distractor
    columns that exist only in generated training data, never in a
    :class:`PatientRecord`.
    """

    records: tuple[PatientRecord, ...]
    labels: dict[Complication, np.ndarray]
    extra_feature_names: tuple[str, ...] = ()
    extra_features: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.records)
        for comp, column in self.labels.items():
            column = np.asarray(column)
            if column.shape != (n,):
                raise RecordInvariantError(
                    f"label column {comp.value} has length {column.shape}, expected {n}"
                )
            if not np.isin(column, (0, 1)).all():
                raise RecordInvariantError(f"label column {comp.value} not in {{0,1}}")
        if self.extra_feature_names:
            if self.extra_features is None or self.extra_features.shape != (
                n,
                len(self.extra_feature_names),
            ):
                raise RecordInvariantError("extra feature matrix shape mismatch")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return FEATURE_NAMES + self.extra_feature_names

    def feature_matrix(self) -> np.ndarray:
        base = (
            np.stack([r.encode() for r in self.records])
            if self.records
            else np.empty((0, 32))
        )
        if self.extra_feature_names:
            return np.hstack([base, self.extra_features])
        return base

    def label_vector(self, complication: Complication) -> np.ndarray:
        return np.asarray(self.labels[complication], dtype=np.int64)


def ranking(gbt_pct: dict[Complication, float]) -> tuple[Complication, ...]:
    """Complications by descending percentage, ties broken by canonical order."""
    order = {c: i for i, c in enumerate(COMPLICATIONS)}
    return tuple(sorted(gbt_pct, key=lambda c: (-gbt_pct[c], order[c])))


@dataclass(frozen=True)
class ProbabilityReport:
    """Six complications x two model families, percentages in [0, 100]."""

    gbt_pct: dict[Complication, float]
    ann_pct: dict[Complication, float]
    modified_report: "ProbabilityReport | None" = None

    def __post_init__(self):
        for column in (self.gbt_pct, self.ann_pct):
            if set(column) != set(COMPLICATIONS):
                raise RecordInvariantError("report must cover all six complications")
            for comp, pct in column.items():
                if not (0.0 <= pct <= 100.0):
                    raise RecordInvariantError(
                        f"{comp.value} percentage {pct} outside [0, 100]"
                    )

    @property
    def ranking(self) -> tuple[Complication, ...]:
        return ranking(self.gbt_pct)
