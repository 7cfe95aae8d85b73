"""Prediction engine: six loaded bundles, probability reports, what-if deviations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .bundle import ComplicationBundle, bundle_filename, load_bundle, read_manifest
from .errors import ConfigError, EngineLoadError
from .preprocess import derive_map
from .records import (
    COMPLICATIONS,
    CONTINUOUS_VITALS,
    FEATURE_NAMES,
    VITAL_RANGES,
    Complication,
    PatientRecord,
    ProbabilityReport,
    VitalSigns,
)

_BP_FIELDS = ("systolic_bp", "diastolic_bp", "mean_arterial_pressure")


@dataclass(frozen=True)
class Deviation:
    """Percentage rescaling of selected vitals; flags and circulation never move."""

    percent: float
    targets: frozenset[str] = frozenset(CONTINUOUS_VITALS)

    def __post_init__(self):
        if not (-90.0 <= self.percent <= 300.0):
            raise ConfigError(f"deviation percent {self.percent} outside [-90, 300]")
        unknown = set(self.targets) - set(CONTINUOUS_VITALS)
        if unknown:
            raise ConfigError(f"deviation cannot target {sorted(unknown)}")
        object.__setattr__(self, "targets", frozenset(self.targets))


def _clamp(name: str, value: float) -> float:
    lo, hi = VITAL_RANGES[name]
    return min(max(value, lo), hi)


def apply_deviation(record: PatientRecord, deviation: Deviation) -> PatientRecord:
    """Rescale targeted vitals by (1 + percent/100), clamped to valid ranges.

    GCS is rounded back to an integer and MAP is recomputed from the modified
    blood pressures so the vector stays physiologically coherent. Zero percent
    or no targets is the identity (a stored non-formula MAP survives).
    """
    if deviation.percent == 0.0 or not deviation.targets:
        return record
    factor = 1.0 + deviation.percent / 100.0
    values = {name: float(getattr(record.vitals, name)) for name in VITAL_RANGES}
    for name in deviation.targets:
        values[name] = _clamp(name, values[name] * factor)
    values["diastolic_bp"] = min(values["diastolic_bp"], values["systolic_bp"])
    if any(name in deviation.targets for name in _BP_FIELDS):
        values["mean_arterial_pressure"] = _clamp(
            "mean_arterial_pressure",
            derive_map(values["systolic_bp"], values["diastolic_bp"]),
        )
    gcs = int(round(values["gcs_total"]))
    vitals = VitalSigns(
        respiratory_rate=values["respiratory_rate"],
        systolic_bp=values["systolic_bp"],
        diastolic_bp=values["diastolic_bp"],
        mean_arterial_pressure=values["mean_arterial_pressure"],
        pulse_rate=values["pulse_rate"],
        blood_glucose=values["blood_glucose"],
        spo2=values["spo2"],
        body_temperature=values["body_temperature"],
        gcs_total=min(max(gcs, 3), 15),
        circulation_state=record.vitals.circulation_state,
    )
    return replace(record, vitals=vitals)


class PredictionEngine:
    """Immutable holder of the six complication bundles."""

    def __init__(self, bundles: dict[Complication, ComplicationBundle]):
        missing = [c for c in COMPLICATIONS if c not in bundles]
        if missing:
            raise EngineLoadError(f"missing bundle: {missing[0].value.capitalize()}")
        versions = {b.schema_version for b in bundles.values()}
        if len(versions) != 1:
            raise EngineLoadError(f"mixed bundle schema versions: {sorted(versions)}")
        self.bundles = dict(bundles)

    @classmethod
    def load(cls, model_dir) -> "PredictionEngine":
        model_dir = Path(model_dir)
        listed = set(read_manifest(model_dir))
        bundles = {}
        for comp in COMPLICATIONS:
            name = bundle_filename(comp)
            path = model_dir / name
            if name not in listed or not path.exists():
                raise EngineLoadError(f"missing bundle: {comp.value.capitalize()}")
            bundles[comp] = load_bundle(path)
        return cls(bundles)

    def _bundle_probability(self, bundle: ComplicationBundle, named: dict[str, float]):
        row = np.array(
            [
                bundle.repair_rules[name].apply(named.get(name, 0.0))
                if name in bundle.repair_rules
                else named.get(name, 0.0)
                for name in bundle.selected_features
            ]
        )
        scaled = bundle.scaler.transform(row[None, :])
        gbt = float(bundle.gbt.predict_proba(scaled)[0])
        ann = float(bundle.ann.predict_proba(scaled)[0])
        return gbt, ann

    def predict(self, record: PatientRecord) -> ProbabilityReport:
        named = dict(zip(FEATURE_NAMES, record.encode()))
        gbt_pct = {}
        ann_pct = {}
        for comp in COMPLICATIONS:
            gbt, ann = self._bundle_probability(self.bundles[comp], named)
            gbt_pct[comp] = 100.0 * gbt
            ann_pct[comp] = 100.0 * ann
        return ProbabilityReport(gbt_pct=gbt_pct, ann_pct=ann_pct)

    def predict_with_deviation(
        self, record: PatientRecord, deviation: Deviation
    ) -> ProbabilityReport:
        baseline = self.predict(record)
        modified = self.predict(apply_deviation(record, deviation))
        return ProbabilityReport(
            gbt_pct=baseline.gbt_pct,
            ann_pct=baseline.ann_pct,
            modified_report=modified,
        )

    def metadata(self) -> dict[str, dict]:
        return {
            comp.value: {
                "fingerprint": bundle.training_fingerprint,
                "selected_features": list(bundle.selected_features),
                "schema_version": bundle.schema_version,
            }
            for comp, bundle in self.bundles.items()
        }


def load_engine(model_dir) -> PredictionEngine:
    return PredictionEngine.load(model_dir)
