import numpy as np
import pytest

from maxlens.data import DataMatrix, load_csv, parse_csv, standardize, to_csv
from maxlens.errors import IngestError

CSV = "a,b,label\n1.0,2.0,x\n3.5,-1.0,y\n0.0,0.5,x\n"


def test_parse_csv_with_label_column():
    data = parse_csv(CSV, label_column="label")
    assert data.column_names == ("a", "b")
    assert data.n == 3 and data.d == 2
    assert data.class_labels == ("x", "y", "x")
    assert data.row_ids == ("r0", "r1", "r2")
    np.testing.assert_allclose(data.values[1], [3.5, -1.0])


def test_parse_csv_without_label():
    data = parse_csv("a,b\n1,2\n3,4\n")
    assert data.class_labels is None
    assert data.values.shape == (2, 2)


def test_parse_failure_reports_row_and_column():
    with pytest.raises(IngestError, match="row 2, column 'b'"):
        parse_csv("a,b\n1,2\n3,oops\n")


def test_parse_rejects_non_finite_cells():
    with pytest.raises(IngestError, match="non-finite"):
        parse_csv("a\n1\ninf\n")


def test_parse_rejects_missing_label_column():
    with pytest.raises(IngestError, match="not found"):
        parse_csv(CSV, label_column="missing")


def test_parse_rejects_ragged_rows():
    with pytest.raises(IngestError, match="expected 2 fields"):
        parse_csv("a,b\n1,2\n3\n")


def test_empty_input_rejected():
    with pytest.raises(IngestError):
        parse_csv("")
    with pytest.raises(IngestError, match="no data rows"):
        parse_csv("a,b\n")


def test_standardize_zero_mean_unit_variance():
    rng = np.random.default_rng(0)
    data = DataMatrix.from_array(rng.normal(3.0, 5.0, size=(40, 3)))
    std = standardize(data)
    np.testing.assert_allclose(std.values.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(std.values.std(axis=0), 1.0, atol=1e-12)


def test_standardize_keeps_constant_columns_finite():
    data = DataMatrix.from_array(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))
    std = standardize(data)
    np.testing.assert_allclose(std.values[:, 1], 0.0)
    assert np.all(np.isfinite(std.values))


def test_load_csv_standardizes_by_default():
    data = load_csv(CSV, label_column="label")
    np.testing.assert_allclose(data.values.mean(axis=0), 0.0, atol=1e-12)
    raw = load_csv(CSV, label_column="label", scale=False)
    assert raw.values[0, 0] == 1.0


def test_datamatrix_validation():
    with pytest.raises(IngestError, match="not unique"):
        DataMatrix(np.ones((2, 2)), ("a", "b"), ("r0", "r0"))
    with pytest.raises(IngestError, match="non-finite"):
        DataMatrix.from_array(np.array([[1.0], [np.nan]]))
    with pytest.raises(IngestError):
        DataMatrix.from_array(np.zeros((0, 2)))


def test_values_are_read_only():
    data = DataMatrix.from_array(np.ones((2, 2)))
    with pytest.raises(ValueError):
        data.values[0, 0] = 7.0


def test_to_csv_round_trip():
    data = parse_csv(CSV, label_column="label")
    text = to_csv(data)
    again = parse_csv(text, label_column="label")
    np.testing.assert_array_equal(again.values, data.values)
    assert again.class_labels == data.class_labels


def test_label_rows():
    data = parse_csv(CSV, label_column="label")
    np.testing.assert_array_equal(data.label_rows("x"), [0, 2])
    assert data.label_rows("zzz").size == 0
