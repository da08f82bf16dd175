import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnreserve.exceptions import (
    ContractError,
    CSVParseError,
    FormatError,
    ShapeError,
    ValidationError,
)
from hnreserve.triangle import (
    CUMULATIVE,
    INCREMENTAL,
    FutureCellIndex,
    Triangle,
    cumulate,
    decumulate,
    emit_csv,
    future_cells,
    observed_mask,
    parse_csv,
    read_csv,
    write_csv,
)

from conftest import FIXTURE_CSV, square


def test_observed_mask_layout():
    expected = np.array([[1, 1, 1], [1, 1, 0], [1, 0, 0]], dtype=bool)
    np.testing.assert_array_equal(observed_mask(3), expected)


def test_future_cells_of_three_year_triangle():
    cells = future_cells(3)
    assert cells == [FutureCellIndex(2, 2), FutureCellIndex(3, 1), FutureCellIndex(3, 2)]


class TestConstruction:
    def test_indexing_convention(self, fixture3):
        assert fixture3.n == 3
        assert fixture3[1, 0] == 100.0
        assert fixture3[2, 1] == 154.0
        np.testing.assert_array_equal(fixture3.latest(), [165.0, 154.0, 120.0])

    def test_values_are_read_only(self, fixture3):
        with pytest.raises(ValueError):
            fixture3.values[0, 0] = 1.0

    def test_future_cell_rejected(self):
        values = square([[1, 2, 3], [1, 2, 9], [1]])
        with pytest.raises(ShapeError, match="accident year 2.*dev_2"):
            Triangle(values)

    def test_missing_observed_cell(self):
        with pytest.raises(ShapeError, match="missing"):
            Triangle(square([[1, 2, 3], [1], [1]]))

    def test_non_square(self):
        with pytest.raises(ShapeError):
            Triangle(np.ones((2, 3)))

    def test_cumulative_positivity(self):
        with pytest.raises(ValidationError, match="accident year 2.*dev_0"):
            Triangle(square([[1, 2, 3], [0, 2], [1]]))

    def test_non_monotone_cumulative_rows_allowed(self):
        t = Triangle(square([[10, 8, 9], [5, 4], [7]]))
        assert t[1, 1] == 8.0

    def test_negative_increments(self):
        values = square([[10, -2, 1], [5, 3], [7]])
        with pytest.raises(ValidationError, match="allow_negative_increments"):
            Triangle(values, kind=INCREMENTAL)
        t = Triangle(values, kind=INCREMENTAL, allow_negative_increments=True)
        assert cumulate(t)[1, 1] == 8.0

    def test_negative_increment_still_needs_positive_cumulative(self):
        t = Triangle(square([[10, -20, 1], [5, 3], [7]]), kind=INCREMENTAL,
                     allow_negative_increments=True)
        with pytest.raises(ValidationError):
            cumulate(t)

    def test_default_labels(self):
        t = Triangle(square([[1, 2], [3]]), origin=2012)
        assert t.labels == ("2012", "2013")

    def test_one_year(self):
        t = Triangle(np.array([[5.0]]))
        assert t.n == 1 and t.latest().tolist() == [5.0]


class TestCumulation:
    def test_row(self):
        t = Triangle(square([[5, 3, 2], [1, 1], [7]]), kind=INCREMENTAL)
        c = cumulate(t)
        assert c.kind == CUMULATIVE
        np.testing.assert_array_equal(c.values[0], [5, 8, 10])
        assert c[3, 0] == 7.0

    def test_three_by_three(self, fixture3):
        inc = Triangle(square([[100, 50, 15], [110, 44], [120]]), kind=INCREMENTAL)
        assert cumulate(inc) == fixture3

    def test_decumulate(self, fixture3):
        inc = decumulate(fixture3)
        assert inc.kind == INCREMENTAL
        np.testing.assert_array_equal(inc.values[0], [100, 50, 15])
        np.testing.assert_array_equal(inc.values[:, 0], fixture3.values[:, 0])

    def test_kind_contract(self, fixture3):
        with pytest.raises(ContractError):
            cumulate(fixture3)
        with pytest.raises(ContractError):
            decumulate(decumulate(fixture3))

    @given(st.integers(1, 8), st.data())
    @settings(max_examples=60)
    def test_integer_round_trip_is_exact(self, n, data):
        rows = [
            data.draw(st.lists(st.integers(1, 10**9), min_size=n - r, max_size=n - r))
            for r in range(n)
        ]
        inc = Triangle(square(rows), kind=INCREMENTAL)
        assert decumulate(cumulate(inc)) == inc
        cum = cumulate(inc)
        assert cumulate(decumulate(cum)) == cum
        np.testing.assert_array_equal(~np.isnan(cum.values), observed_mask(n))

    @given(st.integers(1, 7), st.data())
    @settings(max_examples=60)
    def test_float_round_trip_within_ulps(self, n, data):
        rows = [
            data.draw(st.lists(st.floats(0.01, 1e6), min_size=n - r, max_size=n - r))
            for r in range(n)
        ]
        inc = Triangle(square(rows), kind=INCREMENTAL)
        back = decumulate(cumulate(inc))
        np.testing.assert_allclose(back.values, inc.values, rtol=0, atol=1e-9 * 1e6 * n)


class TestCsv:
    def test_parse_fixture(self, fixture3):
        t = parse_csv(FIXTURE_CSV, CUMULATIVE)
        assert t.n == 3
        assert t == fixture3

    def test_parse_stream_and_crlf(self, fixture3):
        t = parse_csv(io.StringIO(FIXTURE_CSV.replace("\n", "\r\n")))
        assert t == fixture3

    def test_populated_future_cell(self):
        text = FIXTURE_CSV.replace("3,120,,", "3,120,,7")
        with pytest.raises(ShapeError, match="dev_2"):
            parse_csv(text)

    def test_zero_cumulative_cell(self):
        text = FIXTURE_CSV.replace("2,110,154,", "2,0,154,")
        with pytest.raises(ValidationError, match="accident year 2.*dev_0"):
            parse_csv(text)

    def test_ragged_row(self):
        text = FIXTURE_CSV.replace("2,110,154,", "2,110,154")
        with pytest.raises(FormatError, match="row 3"):
            parse_csv(text)

    def test_non_numeric(self):
        text = FIXTURE_CSV.replace("154", "abc")
        with pytest.raises(CSVParseError, match="row 3, column dev_1"):
            parse_csv(text)

    def test_bad_header(self):
        with pytest.raises(FormatError, match="header"):
            parse_csv("year,d0,d1\n1,2,3\n2,3,\n")

    def test_non_square_file(self):
        with pytest.raises(ShapeError, match="square"):
            parse_csv("accident_year,dev_0,dev_1\n1,2,3\n2,3,\n3,4,\n")

    def test_round_trip(self, fixture3):
        assert parse_csv(emit_csv(fixture3)) == fixture3

    def test_empty_predictions_match_plain_output(self, fixture3):
        assert emit_csv(fixture3, {}) == emit_csv(fixture3)
        assert emit_csv(fixture3) == FIXTURE_CSV

    def test_full_predictions_fill_square(self, fixture3):
        preds = {c: 1000.0 + c.dev_year for c in future_cells(3)}
        text = emit_csv(fixture3, preds, decoration="*")
        rows = [line.split(",") for line in text.strip().splitlines()[1:]]
        assert all(len(r) == 4 and all(tok != "" for tok in r) for r in rows)
        assert rows[2] == ["3", "120", "1001*", "1002*"]

    def test_partial_predictions_rejected(self, fixture3):
        with pytest.raises(ContractError):
            emit_csv(fixture3, {FutureCellIndex(3, 1): 1.0})

    def test_precision_option(self):
        t = Triangle(square([[1.23456, 2.5], [3.0]]))
        assert "1.23," in emit_csv(t, precision=2)

    def test_write_creates_companion(self, tmp_path, fixture3):
        preds = {c: 1.0 for c in future_cells(3)}
        written = write_csv(tmp_path / "tri.csv", fixture3, preds)
        assert [p.name for p in written] == ["tri.csv", "tri_predicted.csv"]
        assert read_csv(written[0]) == fixture3

    @given(st.integers(1, 6), st.data())
    @settings(max_examples=50)
    def test_emit_parse_identity(self, n, data):
        rows = [
            data.draw(st.lists(st.floats(1e-3, 1e12), min_size=n - r, max_size=n - r))
            for r in range(n)
        ]
        t = Triangle(square(rows))
        assert parse_csv(emit_csv(t)) == t


def test_fingerprint_ignores_whitespace(fixture3):
    padded = FIXTURE_CSV.replace("1,100,150,165", "1, 100 ,150 , 165")
    t = parse_csv(padded)
    assert t.fingerprint == fixture3.fingerprint
    assert len(t.fingerprint) == 64
    assert t.scale(2.0).fingerprint != t.fingerprint
