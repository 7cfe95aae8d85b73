import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rescuetriage.errors import (
    InsufficientDataError,
    IntegrationError,
    RepairError,
    VitalRangeError,
)
from rescuetriage.preprocess import (
    IqrBounds,
    RawTable,
    Scaler,
    derive_map,
    iqr_bounds,
    levenshtein,
    merge_tables,
    normalize_token,
    reduce_columns,
    repair_outliers,
)


def quantile_oracle(values, fraction):
    """Independent brute-force quantile: sort, then interpolate at f*(n-1)."""
    ordered = sorted(float(v) for v in values)
    position = fraction * (len(ordered) - 1)
    lo = int(np.floor(position))
    hi = int(np.ceil(position))
    frac = position - lo
    return ordered[lo] + frac * (ordered[hi] - ordered[lo])


class TestMergeTables:
    def test_disjoint_columns(self):
        a = RawTable("a", [("c1", {"x": "1"})])
        b = RawTable("b", [("c1", {"y": "2"}), ("c2", {"y": "3"})])
        merged = merge_tables([a, b])
        assert merged.rows == {"c1": {"x": "1", "y": "2"}, "c2": {"y": "3"}}
        assert merged.conflicts == 0

    def test_first_table_wins_counts_conflict(self):
        a = RawTable("a", [("c1", {"x": "1"})])
        b = RawTable("b", [("c1", {"x": "9"})])
        merged = merge_tables([a, b])
        assert merged.rows == {"c1": {"x": "1"}}
        assert merged.conflicts == 1

    def test_80_single_column_tables_over_100_cases(self):
        tables = [
            RawTable(f"t{j}", [(f"case{i}", {f"col{j}": str(i)}) for i in range(100)])
            for j in range(80)
        ]
        merged = merge_tables(tables)
        assert len(merged.columns) == 80
        assert len(merged.rows) == 100

    def test_duplicate_case_in_one_table_rejected(self):
        bad = RawTable("a", [("c1", {"x": "1"}), ("c1", {"x": "2"})])
        with pytest.raises(IntegrationError):
            merge_tables([bad])

    def test_needs_at_least_one_table(self):
        with pytest.raises(IntegrationError):
            merge_tables([])

    def test_row_count_is_distinct_case_ids(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            tables = []
            all_cases = set()
            for t in range(int(rng.integers(1, 5))):
                cases = [f"c{int(rng.integers(0, 30))}" for _ in range(10)]
                cases = list(dict.fromkeys(cases))
                all_cases.update(cases)
                tables.append(RawTable(f"t{t}", [(c, {f"col{t}": "v"}) for c in cases]))
            assert len(merge_tables(tables).rows) == len(all_cases)


class TestReduceColumns:
    def _table(self, columns, n_rows):
        rows = [
            (f"c{i}", {name: values[i] for name, values in columns.items()})
            for i in range(n_rows)
        ]
        return merge_tables([RawTable("t", rows)])

    def test_empty_column_dropped(self):
        table = self._table({"keep": ["1", "2"], "empty": ["", ""]}, 2)
        reduced, report = reduce_columns(table)
        assert reduced.columns == ("keep",)
        assert ("empty", "below fill threshold") in report.dropped

    def test_identical_column_dropped_second(self):
        table = self._table({"a": ["1", "2"], "b": ["1", "2"]}, 2)
        reduced, report = reduce_columns(table)
        assert reduced.columns == ("a",)
        assert ("b", "duplicate of a") in report.dropped
        assert report.lines() == ["b\tduplicate of a"]

    def test_452_to_380_planted(self):
        rng = np.random.default_rng(99)
        n = 50
        columns = {}
        for j in range(380):
            columns[f"real{j:03d}"] = [str(int(rng.integers(0, 1000))) for _ in range(n)]
        for j in range(45):
            columns[f"empty{j:02d}"] = [""] * n
        originals = list(columns)[:27]
        for j, src in enumerate(originals):
            columns[f"dup{j:02d}"] = list(columns[src])
        assert len(columns) == 452
        reduced, report = reduce_columns(self._table(columns, n))
        assert len(reduced.columns) == 380
        assert len(report.dropped) == 72


class TestIqrBounds:
    def test_worked_example(self):
        b = iqr_bounds([70, 72, 75, 78, 80, 200])
        assert b.q1 == 72.75
        assert b.q3 == 79.5
        assert b.lower == 62.625
        assert b.upper == 89.625

    def test_constant(self):
        b = iqr_bounds([5, 5, 5, 5])
        assert b.q1 == b.q3 == b.lower == b.upper == 5

    def test_symmetric(self):
        b = iqr_bounds([1, 2, 3, 4, 5])
        assert (b.q1, b.q3, b.lower, b.upper) == (2, 4, -1, 7)

    def test_too_few_values(self):
        with pytest.raises(InsufficientDataError):
            iqr_bounds([1.0, 2.0, 3.0])

    def test_matches_bruteforce_oracle_exactly(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            values = rng.normal(0, 100, size=int(rng.integers(4, 60)))
            b = iqr_bounds(values)
            assert b.q1 == quantile_oracle(values, 0.25)
            assert b.q3 == quantile_oracle(values, 0.75)


class TestRepairOutliers:
    def test_worked_example(self):
        column = [70, 72, 75, 78, 80, 200]
        repaired, count = repair_outliers(column, iqr_bounds(column))
        assert repaired.tolist() == [70, 72, 75, 78, 80, 75]
        assert count == 1

    def test_no_outliers_identity(self):
        column = [1.0, 2.0, 3.0, 4.0]
        repaired, count = repair_outliers(column, iqr_bounds(column))
        assert repaired.tolist() == column
        assert count == 0

    def test_both_tails_replaced(self):
        column = [0.0, 80.0, 82.0, 84.0, 300.0]
        repaired, count = repair_outliers(column, iqr_bounds(column))
        assert count == 2
        assert repaired.tolist() == [82.0, 80.0, 82.0, 84.0, 82.0]

    def test_all_out_of_bounds_is_error(self):
        with pytest.raises(RepairError):
            repair_outliers([100.0, 200.0], IqrBounds(q1=0.0, q3=1.0))

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(1000):
            column = rng.normal(50, 20, size=int(rng.integers(4, 40)))
            bounds = iqr_bounds(column)
            repaired, count = repair_outliers(column, bounds)
            inside = [v for v in column if bounds.lower <= v <= bounds.upper]
            mean = sum(inside) / len(inside)
            expected = [v if bounds.lower <= v <= bounds.upper else mean for v in column]
            assert count == len(column) - len(inside)
            # classification is exact; the replacement mean may differ from the
            # sequential-sum oracle by float summation order only
            assert repaired.tolist() == pytest.approx(expected, rel=1e-12)

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=4, max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_idempotent(self, column):
        bounds = iqr_bounds(column)
        once, _ = repair_outliers(column, bounds)
        twice, repairs = repair_outliers(once, bounds)
        assert repairs == 0
        assert np.array_equal(once, twice)


class TestNormalizeToken:
    DICTIONARY = {"brustschmerz": "chest_pain", "atemnot": "respiratory_distress"}

    def test_exact_hit(self):
        assert normalize_token("Brustschmerz", self.DICTIONARY) == "chest_pain"

    def test_distance_one(self):
        assert normalize_token("brustschmer", self.DICTIONARY) == "chest_pain"

    def test_unknown_passthrough_lowercased(self):
        assert normalize_token("XyZZy", self.DICTIONARY) == "xyzzy"

    def test_tie_breaks_to_smallest_canonical(self):
        dictionary = {"abcd": "zeta", "abce": "alpha"}
        # "abcf" is distance 1 from both variants
        assert normalize_token("abcf", dictionary) == "alpha"

    def test_total_on_random_junk(self):
        rng = np.random.default_rng(3)
        letters = "abcdefghij"
        for _ in range(200):
            word = "".join(rng.choice(list(letters), size=int(rng.integers(1, 12))))
            out = normalize_token(word, self.DICTIONARY)
            assert isinstance(out, str)
            assert out == normalize_token(word, self.DICTIONARY)

    def test_levenshtein_basics(self):
        assert levenshtein("kitten", "sitting") == 3
        assert levenshtein("", "abc") == 3
        assert levenshtein("same", "same") == 0


class TestDeriveMap:
    def test_paper_use_case_2(self):
        assert derive_map(142, 85) == 104.0

    def test_paper_use_case_3(self):
        assert derive_map(132, 82) == pytest.approx(98.6666666, abs=1e-6)

    def test_equal_pressures(self):
        assert derive_map(100, 100) == 100.0

    def test_rejects_sys_below_dia(self):
        with pytest.raises(VitalRangeError):
            derive_map(80, 90)

    def test_rejects_nonpositive(self):
        with pytest.raises(VitalRangeError):
            derive_map(80, 0)


class TestScaler:
    def test_hand_example(self):
        scaler = Scaler().fit(np.array([[1.0], [2.0], [3.0]]))
        assert scaler.means_[0] == 2.0
        assert scaler.stds_[0] == pytest.approx(0.816496580927726)
        assert scaler.transform(np.array([[2.0]]))[0, 0] == 0.0

    def test_already_standardized_is_near_identity(self):
        rng = np.random.default_rng(0)
        col = rng.normal(0, 1, 500)
        col = (col - col.mean()) / col.std()
        scaler = Scaler().fit(col[:, None])
        assert abs(scaler.means_[0]) < 1e-9
        assert abs(scaler.stds_[0] - 1.0) < 1e-9

    def test_flag_columns_pass_through(self):
        X = np.array([[0.0, 1.0], [1.0, 5.0], [0.0, 9.0], [1.0, 13.0]])
        scaler = Scaler(scale_columns=[1]).fit(X)
        out = scaler.transform(X)
        assert np.array_equal(out[:, 0], X[:, 0])
        assert abs(out[:, 1].mean()) < 1e-12

    def test_fit_apply_standardizes(self):
        rng = np.random.default_rng(8)
        X = rng.normal(37, 4, size=(400, 3))
        out = Scaler().fit_transform(X)
        assert np.all(np.abs(out.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(out.std(axis=0) - 1.0) < 1e-9)

    def test_constant_column_recorded_and_untouched(self):
        X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        scaler = Scaler().fit(X)
        assert scaler.constant_columns_ == (0,)
        assert np.array_equal(scaler.transform(X)[:, 0], X[:, 0])

    def test_state_round_trip(self):
        X = np.array([[1.0, 0.0], [2.0, 1.0], [4.0, 0.0]])
        scaler = Scaler(scale_columns=[0]).fit(X)
        clone = Scaler.from_state(scaler.to_state())
        assert np.array_equal(scaler.transform(X), clone.transform(X))
