"""Shared fixtures.

``full_models`` is the seed-42 training run the acceptance criteria reference
(default generator, n=10000, default pipeline options). It takes a few
minutes, so it is session-scoped and can be cached across sessions by
pointing RESCUE_TRIAGE_TEST_CACHE at a writable directory.

``tiny_models`` is a fast, reduced-size run for unit tests that only need a
structurally valid engine.
"""

import os
from pathlib import Path

import pytest

from rescuetriage.engine import PredictionEngine
from rescuetriage.pipeline import TrainOptions, TrainReport, train_all
from rescuetriage.synthgen import default_config, generate

FULL_N_RECORDS = 10000
FULL_DATA_SEED = 42

# reduced scale used by the CLI determinism acceptance run and transcripts
TRANSCRIPT_TRAIN_ARGS = [
    "train",
    "--synthetic",
    "42",
    "--n-records",
    "1500",
    "--rfecv-folds",
    "3",
]


@pytest.fixture(scope="session")
def full_dataset():
    return generate(default_config(n_records=FULL_N_RECORDS, seed=FULL_DATA_SEED))


@pytest.fixture(scope="session")
def full_models(full_dataset, tmp_path_factory) -> tuple[Path, TrainReport]:
    cache = os.environ.get("RESCUE_TRIAGE_TEST_CACHE")
    options = TrainOptions()
    source = f"synthetic:seed={FULL_DATA_SEED}:n={FULL_N_RECORDS}:noise=6"
    if cache:
        out_dir = Path(cache) / "full_models"
        report_path = out_dir / "report.pickle"
        if report_path.exists():
            import pickle

            with report_path.open("rb") as handle:
                return out_dir, pickle.load(handle)
        report = train_all(full_dataset, options, source=source, out_dir=out_dir)
        import pickle

        with report_path.open("wb") as handle:
            pickle.dump(report, handle)
        return out_dir, report
    out_dir = tmp_path_factory.mktemp("full_models")
    report = train_all(full_dataset, options, source=source, out_dir=out_dir)
    return out_dir, report


@pytest.fixture(scope="session")
def full_engine(full_models) -> PredictionEngine:
    model_dir, _ = full_models
    return PredictionEngine.load(model_dir)


@pytest.fixture(scope="session")
def tiny_models(tmp_path_factory) -> tuple[Path, TrainReport]:
    dataset = generate(default_config(n_records=500, seed=11))
    options = TrainOptions(
        rfecv_folds=3,
        gbt_params={"n_rounds": 30, "max_depth": 3},
        ann_params={"epochs": 15},
    )
    out_dir = tmp_path_factory.mktemp("tiny_models")
    report = train_all(dataset, options, source="tiny", out_dir=out_dir)
    return out_dir, report


@pytest.fixture(scope="session")
def tiny_engine(tiny_models) -> PredictionEngine:
    model_dir, _ = tiny_models
    return PredictionEngine.load(model_dir)
