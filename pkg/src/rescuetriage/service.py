"""HTTP interface over the prediction engine.

Strict request parsing: unknown or malformed fields are a 400 naming the
field (triage inputs must not be silently dropped), out-of-range vitals are
a 422, and every endpoint answers 503 until the engine is loaded.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .dataio import load_bundled_usecases
from .engine import Deviation, PredictionEngine, load_engine
from .errors import ConfigError, RecordInvariantError, VitalRangeError
from .preprocess import derive_map
from .records import (
    FLAG_NAMES,
    SCHEMA_VERSION,
    ObservationFlags,
    PatientRecord,
    ProbabilityReport,
    VitalSigns,
)

API_PREFIX = "/api/v1"


class RecordIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    case_id: str = "request"
    respiratory_rate: float
    systolic_bp: float
    diastolic_bp: float
    mean_arterial_pressure: float | None = None
    pulse_rate: float
    blood_glucose: float
    spo2: float
    body_temperature: float = 36.8
    gcs_total: int = 15
    circulation_state: int = 0
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

    def to_record(self) -> PatientRecord:
        mean_arterial = self.mean_arterial_pressure
        if mean_arterial is None:
            mean_arterial = derive_map(self.systolic_bp, self.diastolic_bp)
        vitals = VitalSigns(
            respiratory_rate=self.respiratory_rate,
            systolic_bp=self.systolic_bp,
            diastolic_bp=self.diastolic_bp,
            mean_arterial_pressure=mean_arterial,
            pulse_rate=self.pulse_rate,
            blood_glucose=self.blood_glucose,
            spo2=self.spo2,
            body_temperature=self.body_temperature,
            gcs_total=self.gcs_total,
            circulation_state=self.circulation_state,
        )
        flags = ObservationFlags(**{name: getattr(self, name) for name in FLAG_NAMES})
        return PatientRecord(case_id=self.case_id, vitals=vitals, flags=flags)


class DeviationIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    percent: float
    targets: list[str] | None = None

    def to_deviation(self) -> Deviation:
        if self.targets is None:
            return Deviation(percent=self.percent)
        return Deviation(percent=self.percent, targets=frozenset(self.targets))


class PredictRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: RecordIn
    deviation: DeviationIn | None = None


def _report_payload(report: ProbabilityReport) -> dict:
    return {
        "ranking": [comp.value for comp in report.ranking],
        "probabilities": {
            comp.value: {
                "gbt_pct": report.gbt_pct[comp],
                "ann_pct": report.ann_pct[comp],
            }
            for comp in report.gbt_pct
        },
    }


def _record_payload(record: PatientRecord) -> dict:
    payload = {"case_id": record.case_id}
    payload.update({name: getattr(record.vitals, name) for name in VitalSigns.__dataclass_fields__})
    payload.update({name: getattr(record.flags, name) for name in FLAG_NAMES})
    return payload


def create_app(model_dir=None, engine: PredictionEngine | None = None) -> FastAPI:
    app = FastAPI(title="rescue-triage", version="0.1.0")
    if engine is None and model_dir is not None:
        engine = load_engine(model_dir)
    app.state.engine = engine

    @app.exception_handler(RequestValidationError)
    async def invalid_field_handler(request: Request, exc: RequestValidationError):
        fields = []
        for error in exc.errors():
            location = [str(part) for part in error.get("loc", ()) if part != "body"]
            fields.append(".".join(location) or "body")
        return JSONResponse(
            status_code=400,
            content={"detail": f"invalid field: {fields[0]}", "fields": fields},
        )

    @app.exception_handler(VitalRangeError)
    async def range_handler(request: Request, exc: VitalRangeError):
        return JSONResponse(status_code=422, content={"detail": str(exc), "field": exc.field})

    @app.exception_handler(RecordInvariantError)
    async def invariant_handler(request: Request, exc: RecordInvariantError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ConfigError)
    async def config_handler(request: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    def _require_engine() -> PredictionEngine | JSONResponse:
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"detail": "models not loaded"})
        return app.state.engine

    @app.get(f"{API_PREFIX}/health")
    async def health():
        if app.state.engine is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.get(f"{API_PREFIX}/models")
    async def models():
        engine = _require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        return engine.metadata()

    @app.get(f"{API_PREFIX}/testcases")
    async def testcases():
        engine = _require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        return [
            {"name": record.case_id, "record": _record_payload(record)}
            for record in load_bundled_usecases()
        ]

    @app.post(f"{API_PREFIX}/predict")
    async def predict(request: PredictRequest):
        engine = _require_engine()
        if isinstance(engine, JSONResponse):
            return engine
        record = request.record.to_record()
        if request.deviation is None:
            report = engine.predict(record)
            modified = None
        else:
            report = engine.predict_with_deviation(record, request.deviation.to_deviation())
            modified = _report_payload(report.modified_report)
        payload = _report_payload(report)
        return {
            "schema_version": SCHEMA_VERSION,
            "case_id": record.case_id,
            "ranking": payload["ranking"],
            "report": payload["probabilities"],
            "modified": modified,
            "models": {
                comp: meta["fingerprint"] for comp, meta in engine.metadata().items()
            },
        }

    return app
