import numpy as np
import pytest

from rescuetriage.dataio import read_dataset_csv, write_dataset_csv
from rescuetriage.errors import ConfigError
from rescuetriage.records import COMPLICATIONS, FEATURE_NAMES, Complication
from rescuetriage.selection import point_biserial
from rescuetriage.synthgen import DEFAULT_FLAG_SIGNAL, default_config, generate


@pytest.fixture(scope="module")
def big_dataset():
    return generate(default_config(n_records=10000, seed=42))


def test_empty_dataset():
    ds = generate(default_config(n_records=0, seed=1))
    assert len(ds) == 0
    assert ds.feature_matrix().shape == (0, 32 + 6)


def test_same_seed_bit_identical():
    a = generate(default_config(n_records=500, seed=9))
    b = generate(default_config(n_records=500, seed=9))
    assert np.array_equal(a.feature_matrix(), b.feature_matrix())
    for comp in COMPLICATIONS:
        assert np.array_equal(a.labels[comp], b.labels[comp])
    assert a.records == b.records


def test_different_seed_differs():
    a = generate(default_config(n_records=500, seed=9))
    b = generate(default_config(n_records=500, seed=10))
    assert not np.array_equal(a.feature_matrix(), b.feature_matrix())


def test_conditional_rates_match_config(big_dataset):
    X = big_dataset.feature_matrix()
    chest = X[:, FEATURE_NAMES.index("chest_pain")]
    cardio = big_dataset.labels[Complication.CARDIOVASCULAR]
    p1, p0 = DEFAULT_FLAG_SIGNAL[Complication.CARDIOVASCULAR]["chest_pain"]
    assert abs(chest[cardio == 1].mean() - p1) < 0.03
    assert abs(chest[cardio == 0].mean() - p0) < 0.03


def test_all_configured_flag_conditionals_within_tolerance(big_dataset):
    X = big_dataset.feature_matrix()
    for comp, flags in DEFAULT_FLAG_SIGNAL.items():
        labels = big_dataset.labels[comp]
        for name, (p1, p0) in flags.items():
            if name == "injury_present":
                continue
            column = X[:, FEATURE_NAMES.index(name)]
            assert abs(column[labels == 1].mean() - p1) < 0.03, (comp, name)
            assert abs(column[labels == 0].mean() - p0) < 0.03, (comp, name)


def test_prevalence_within_tolerance(big_dataset):
    config = default_config()
    for comp in COMPLICATIONS:
        assert abs(big_dataset.labels[comp].mean() - config.prevalence[comp]) < 0.03


def test_noise_features_uncorrelated(big_dataset):
    X = big_dataset.feature_matrix()
    assert big_dataset.extra_feature_names == tuple(f"noise_{i}" for i in range(6))
    for j in range(6):
        column = X[:, 32 + j]
        for comp in COMPLICATIONS:
            r = point_biserial(column, big_dataset.labels[comp])
            assert abs(r) < 0.05


def test_head_injury_implies_injury_present(big_dataset):
    X = big_dataset.feature_matrix()
    head = X[:, FEATURE_NAMES.index("head_injury")]
    injury = X[:, FEATURE_NAMES.index("injury_present")]
    assert np.all(injury[head == 1] == 1)


def test_invalid_probability_rejected():
    config = default_config(n_records=10, seed=0)
    bad_prevalence = dict(config.prevalence)
    bad_prevalence[Complication.METABOLIC] = 1.5
    with pytest.raises(ConfigError):
        type(config)(
            n_records=config.n_records,
            seed=config.seed,
            prevalence=bad_prevalence,
            flag_signal=config.flag_signal,
            vital_signal=config.vital_signal,
            base_vitals=config.base_vitals,
            base_flag_rates=config.base_flag_rates,
        )


def test_zero_stddev_rejected():
    config = default_config(n_records=10, seed=0)
    bad = {c: dict(v) for c, v in config.vital_signal.items()}
    bad[Complication.RESPIRATORY]["spo2"] = ((90.0, 0.0), (96.0, 3.5))
    with pytest.raises(ConfigError):
        type(config)(
            n_records=config.n_records,
            seed=config.seed,
            prevalence=config.prevalence,
            flag_signal=config.flag_signal,
            vital_signal=bad,
            base_vitals=config.base_vitals,
            base_flag_rates=config.base_flag_rates,
        )


def test_csv_round_trip(tmp_path):
    ds = generate(default_config(n_records=60, seed=3))
    path = write_dataset_csv(ds, tmp_path / "data.csv")
    loaded = read_dataset_csv(path)
    assert np.array_equal(ds.feature_matrix(), loaded.feature_matrix())
    for comp in COMPLICATIONS:
        assert np.array_equal(ds.labels[comp], loaded.labels[comp])
    assert loaded.extra_feature_names == ds.extra_feature_names
