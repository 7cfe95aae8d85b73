"""Seeded synthetic rescue datasets with planted feature/complication signals.

Stands in for the private rescue records: each complication label is drawn
independently from its prevalence, then flags and vitals are drawn from
label-conditioned distributions. A feature is owned by at most one
complication; unowned features follow base distributions, and optional
``noise_*`` flag columns are label-independent distractors for feature
selection tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .records import (
    COMPLICATIONS,
    FLAG_NAMES,
    VITAL_NAMES,
    VITAL_RANGES,
    Complication,
    LabeledDataset,
    ObservationFlags,
    PatientRecord,
    VitalSigns,
)

# (P(flag=1 | label=1), P(flag=1 | label=0)) per owned flag
DEFAULT_FLAG_SIGNAL: dict[Complication, dict[str, tuple[float, float]]] = {
    Complication.CARDIOVASCULAR: {
        "chest_pain": (0.85, 0.05),
        "pre_cardiac_illness": (0.55, 0.08),
    },
    Complication.RESPIRATORY: {
        "respiratory_distress": (0.85, 0.05),
        "pre_respiratory_illness": (0.50, 0.07),
    },
    Complication.NEUROLOGICAL: {
        "head_injury": (0.55, 0.04),
        "head_discomfort": (0.60, 0.08),
        "pre_neurological_illness": (0.55, 0.06),
        "consciousness_impaired": (0.50, 0.06),
        "seizure_observed": (0.30, 0.02),
        "paralysis_signs": (0.25, 0.02),
        "speech_disturbance": (0.30, 0.03),
    },
    Complication.PSYCHIATRIC: {
        "mentally_unfit": (0.85, 0.07),
        "pre_psychiatric_illness": (0.50, 0.05),
        "drug_intoxication": (0.30, 0.04),
        "alcohol_intoxication": (0.35, 0.08),
        "communication_disorder": (0.30, 0.05),
    },
    Complication.ABDOMINAL: {
        "abdominal_pain": (0.85, 0.06),
        "pre_abdominal_illness": (0.50, 0.05),
        "nausea_vomiting": (0.50, 0.10),
    },
    Complication.METABOLIC: {
        "pre_metabolic_illness": (0.60, 0.05),
        "dizziness": (0.45, 0.07),
    },
}

# ((mean, std) | label=1, (mean, std) | label=0) per owned vital.
# Means sit inside the IQR fences of the resulting mixture so the predict-time
# outlier repair does not erase the planted signal.
DEFAULT_VITAL_SIGNAL: dict[Complication, dict[str, tuple[tuple[float, float], tuple[float, float]]]] = {
    Complication.CARDIOVASCULAR: {
        "pulse_rate": ((112.0, 18.0), (82.0, 14.0)),
        "systolic_bp": ((150.0, 22.0), (126.0, 16.0)),
    },
    Complication.RESPIRATORY: {
        "spo2": ((90.0, 4.0), (96.0, 3.5)),
        "respiratory_rate": ((24.0, 6.0), (16.0, 3.0)),
    },
    Complication.NEUROLOGICAL: {
        "gcs_total": ((11.0, 2.5), (14.5, 0.9)),
    },
    Complication.METABOLIC: {
        "blood_glucose": ((205.0, 45.0), (115.0, 30.0)),
    },
}

DEFAULT_BASE_VITALS: dict[str, tuple[float, float]] = {
    "respiratory_rate": (16.0, 3.0),
    "systolic_bp": (126.0, 16.0),
    "diastolic_bp": (78.0, 12.0),
    "pulse_rate": (82.0, 14.0),
    "blood_glucose": (115.0, 30.0),
    "spo2": (96.0, 3.5),
    "body_temperature": (36.9, 0.6),
    "gcs_total": (14.5, 0.9),
}

DEFAULT_BASE_FLAG_RATE = 0.05
DEFAULT_PREVALENCE: dict[Complication, float] = {
    Complication.CARDIOVASCULAR: 0.22,
    Complication.RESPIRATORY: 0.20,
    Complication.NEUROLOGICAL: 0.18,
    Complication.PSYCHIATRIC: 0.18,
    Complication.ABDOMINAL: 0.18,
    Complication.METABOLIC: 0.16,
}
DEFAULT_CIRCULATION_PROBS = (0.85, 0.12, 0.03)


@dataclass(frozen=True)
class GeneratorConfig:
    n_records: int
    seed: int
    prevalence: Mapping[Complication, float]
    flag_signal: Mapping[Complication, Mapping[str, tuple[float, float]]]
    vital_signal: Mapping[Complication, Mapping[str, tuple[tuple[float, float], tuple[float, float]]]]
    base_vitals: Mapping[str, tuple[float, float]]
    base_flag_rates: Mapping[str, float] = field(default_factory=dict)
    circulation_probs: tuple[float, float, float] = DEFAULT_CIRCULATION_PROBS
    noise_features: int = 6

    def __post_init__(self):
        if self.n_records < 0:
            raise ConfigError("n_records must be >= 0")
        if self.noise_features < 0:
            raise ConfigError("noise_features must be >= 0")
        for comp in COMPLICATIONS:
            p = self.prevalence.get(comp)
            if p is None or not (0.0 < p < 1.0):
                raise ConfigError(f"prevalence for {comp.value} must be in (0,1), got {p}")
        for comp, flags in self.flag_signal.items():
            for name, (p1, p0) in flags.items():
                if name not in FLAG_NAMES:
                    raise ConfigError(f"unknown flag {name!r}")
                if not (0.0 < p1 < 1.0 and 0.0 < p0 < 1.0):
                    raise ConfigError(f"flag probabilities for {name!r} must be in (0,1)")
        for comp, vitals in self.vital_signal.items():
            for name, ((m1, s1), (m0, s0)) in vitals.items():
                if name not in VITAL_NAMES:
                    raise ConfigError(f"unknown vital {name!r}")
                if s1 <= 0.0 or s0 <= 0.0:
                    raise ConfigError(f"stddev for {name!r} must be > 0")
        for rate in self.base_flag_rates.values():
            if not (0.0 < rate < 1.0):
                raise ConfigError("base flag rates must be in (0,1)")
        if abs(sum(self.circulation_probs) - 1.0) > 1e-9:
            raise ConfigError("circulation_probs must sum to 1")

    def flag_owner(self, flag: str) -> tuple[Complication, tuple[float, float]] | None:
        for comp, flags in self.flag_signal.items():
            if flag in flags:
                return comp, flags[flag]
        return None

    def vital_owner(self, vital: str):
        for comp, vitals in self.vital_signal.items():
            if vital in vitals:
                return comp, vitals[vital]
        return None


def default_config(n_records: int = 10000, seed: int = 42, noise_features: int = 6) -> GeneratorConfig:
    """The tuned default generator used by training and the acceptance fixtures."""
    return GeneratorConfig(
        n_records=n_records,
        seed=seed,
        prevalence=dict(DEFAULT_PREVALENCE),
        flag_signal={c: dict(v) for c, v in DEFAULT_FLAG_SIGNAL.items()},
        vital_signal={c: {k: v for k, v in vs.items()} for c, vs in DEFAULT_VITAL_SIGNAL.items()},
        base_vitals=dict(DEFAULT_BASE_VITALS),
        base_flag_rates={"injury_present": 0.15},
        noise_features=noise_features,
    )


def _clip_range(values: np.ndarray, vital: str) -> np.ndarray:
    lo, hi = VITAL_RANGES[vital]
    return np.clip(values, lo, hi)


def generate(config: GeneratorConfig) -> LabeledDataset:
    """Draw a labeled dataset; a pure function of the config (seed included)."""
    rng = np.random.default_rng(config.seed)
    n = config.n_records

    labels = {
        comp: (rng.random(n) < config.prevalence[comp]).astype(np.int64)
        for comp in COMPLICATIONS
    }

    vitals: dict[str, np.ndarray] = {}
    for vital in VITAL_NAMES:
        if vital == "mean_arterial_pressure":
            continue
        if vital == "circulation_state":
            vitals[vital] = rng.choice(3, size=n, p=np.asarray(config.circulation_probs))
            continue
        owner = config.vital_owner(vital)
        if owner is None:
            mean, std = config.base_vitals[vital]
            values = rng.normal(mean, std, size=n)
        else:
            comp, ((m1, s1), (m0, s0)) = owner
            positive = labels[comp] == 1
            values = np.where(
                positive,
                rng.normal(m1, s1, size=n),
                rng.normal(m0, s0, size=n),
            )
        values = _clip_range(values, vital)
        if vital == "gcs_total":
            values = np.round(values)
        vitals[vital] = values

    # keep the record invariant systolic >= diastolic
    vitals["diastolic_bp"] = np.minimum(vitals["diastolic_bp"], vitals["systolic_bp"])
    map_noise = rng.normal(0.0, 2.0, size=n)
    vitals["mean_arterial_pressure"] = _clip_range(
        (vitals["systolic_bp"] + 2.0 * vitals["diastolic_bp"]) / 3.0 + map_noise,
        "mean_arterial_pressure",
    )

    flags: dict[str, np.ndarray] = {}
    for flag in FLAG_NAMES:
        owner = config.flag_owner(flag)
        if owner is None:
            rate = config.base_flag_rates.get(flag, DEFAULT_BASE_FLAG_RATE)
            flags[flag] = rng.random(n) < rate
        else:
            comp, (p1, p0) = owner
            p = np.where(labels[comp] == 1, p1, p0)
            flags[flag] = rng.random(n) < p
    flags["injury_present"] = flags["injury_present"] | flags["head_injury"]

    noise = None
    noise_names: tuple[str, ...] = ()
    if config.noise_features:
        noise_names = tuple(f"noise_{i}" for i in range(config.noise_features))
        noise = (rng.random((n, config.noise_features)) < 0.5).astype(np.float64)

    records = []
    for i in range(n):
        vs = VitalSigns(
            respiratory_rate=float(vitals["respiratory_rate"][i]),
            systolic_bp=float(vitals["systolic_bp"][i]),
            diastolic_bp=float(vitals["diastolic_bp"][i]),
            mean_arterial_pressure=float(vitals["mean_arterial_pressure"][i]),
            pulse_rate=float(vitals["pulse_rate"][i]),
            blood_glucose=float(vitals["blood_glucose"][i]),
            spo2=float(vitals["spo2"][i]),
            body_temperature=float(vitals["body_temperature"][i]),
            gcs_total=int(vitals["gcs_total"][i]),
            circulation_state=int(vitals["circulation_state"][i]),
        )
        fl = ObservationFlags(**{name: bool(flags[name][i]) for name in FLAG_NAMES})
        records.append(PatientRecord(case_id=f"synth-{i:06d}", vitals=vs, flags=fl))

    return LabeledDataset(
        records=tuple(records),
        labels=labels,
        extra_feature_names=noise_names,
        extra_features=noise,
    )
