from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import write_warning_csv
from warnsift.dataset import (
    EncodedDataset,
    Label,
    WarningRecord,
    encode,
    fit_schema,
    load_csv,
    load_dataset,
    load_version_pair,
)
from warnsift.errors import EmptyDatasetError, SchemaError


def _basic_rows():
    return [
        {"id": "a", "depth": "1", "kind": "io", "category": "close"},
        {"id": "b", "depth": "2", "kind": "np", "category": "open"},
        {"id": "c", "depth": "3", "kind": "io", "category": "delete"},
        {"id": "d", "depth": "4", "kind": "sync", "category": "open"},
    ]


def test_load_csv_maps_labels(tmp_path):
    p = tmp_path / "w.csv"
    write_warning_csv(p, _basic_rows())
    records = load_csv(p)
    assert [r.label for r in records] == [
        Label.ACTIONABLE,
        Label.UNACTIONABLE,
        Label.DELETED,
        Label.UNACTIONABLE,
    ]
    assert records[0].features == {"depth": "1", "kind": "io"}
    assert [r.id for r in records] == ["a", "b", "c", "d"]


def test_load_csv_custom_tokens(tmp_path):
    p = tmp_path / "w.csv"
    rows = [{"id": "a", "x": "1", "category": "yes"}, {"id": "b", "x": "2", "category": "no"}]
    write_warning_csv(p, rows)
    records = load_csv(p, positive_token="yes", negative_token="no")
    assert [r.label for r in records] == [Label.ACTIONABLE, Label.UNACTIONABLE]


def test_load_csv_without_label_column(tmp_path):
    p = tmp_path / "w.csv"
    write_warning_csv(p, [{"id": "a", "x": "1"}, {"id": "b", "x": "2"}])
    records = load_csv(p, label_column=None)
    assert all(r.label is Label.UNKNOWN for r in records)


def test_missing_label_column_is_schema_error(tmp_path):
    p = tmp_path / "w.csv"
    write_warning_csv(p, [{"id": "a", "x": "1"}])
    with pytest.raises(SchemaError, match="category"):
        load_csv(p)


def test_missing_id_column_is_schema_error(tmp_path):
    p = tmp_path / "w.csv"
    write_warning_csv(p, [{"x": "1", "category": "open"}])
    with pytest.raises(SchemaError, match="'id'"):
        load_csv(p)


def test_ragged_row_names_row_number(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("id,x,category\na,1,open\nb,2\n")
    with pytest.raises(SchemaError, match="row 3"):
        load_csv(p)


def test_empty_file_is_schema_error(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("")
    with pytest.raises(SchemaError, match="empty"):
        load_csv(p)


def test_header_only_gives_empty_record_list(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("id,x,category\n")
    assert load_csv(p) == []
    with pytest.raises(EmptyDatasetError):
        fit_schema([])


def test_unknown_label_token_names_row_and_column(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("id,x,category\na,1,maybe\n")
    with pytest.raises(SchemaError, match="row 2.*maybe"):
        load_csv(p)


def test_duplicate_id_rejected(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("id,x,category\na,1,open\na,2,open\n")
    with pytest.raises(SchemaError, match="repeats id"):
        load_csv(p)


def test_duplicate_column_rejected(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("id,x,x,category\na,1,2,open\n")
    with pytest.raises(SchemaError, match="duplicate column"):
        load_csv(p)


def _record(wid: str, label: Label = Label.UNACTIONABLE, **features) -> WarningRecord:
    return WarningRecord(id=wid, features={k: str(v) for k, v in features.items()}, label=label)


def test_numeric_detection_requires_all_finite():
    records = [
        _record("a", num="1", mixed="1", nan_col="1.5"),
        _record("b", num="2.5", mixed="x", nan_col="NaN"),
        _record("c", num="-3e2", mixed="2", nan_col="2.0"),
    ]
    schema = fit_schema(records)
    kinds = {f.name: f.kind for f in schema.features}
    assert kinds == {"num": "numeric", "mixed": "categorical", "nan_col": "categorical"}


def test_vocabulary_in_first_seen_order():
    records = [_record("a", k="io"), _record("b", k="np"), _record("c", k="io"), _record("d", k="gc")]
    schema = fit_schema(records)
    assert schema.features[0].vocabulary == ("io", "np", "gc")
    ds = encode(records, schema)
    assert ds.X.tolist() == [[1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1]]


def test_unseen_category_encodes_as_zero_block():
    train = [_record("a", k="io"), _record("b", k="np")]
    schema = fit_schema(train)
    ds = encode([_record("z", k="brand_new")], schema)
    assert ds.X.tolist() == [[0, 0]]


def test_standardization_on_fitting_data():
    vals = [3.0, 9.5, -2.0, 4.25, 11.0]
    records = [_record(f"r{i}", x=v) for i, v in enumerate(vals)]
    schema = fit_schema(records)
    ds = encode(records, schema)
    col = ds.X[:, 0]
    assert abs(col.mean()) < 1e-9
    assert abs(col.std() - 1.0) < 1e-9


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=2,
        max_size=30,
    )
)
def test_standardization_property(values):
    records = [_record(f"r{i}", x=repr(v)) for i, v in enumerate(values)]
    schema = fit_schema(records)
    ds = encode(records, schema)
    col = ds.X[:, 0]
    assert np.all(np.isfinite(col))
    if np.std(values) > 1e-12:
        assert abs(col.mean()) < 1e-9
        assert abs(col.std() - 1.0) < 1e-9


def test_zero_variance_numeric_encodes_to_zeros():
    records = [_record("a", x="5"), _record("b", x="5"), _record("c", x="5")]
    ds = encode(records, fit_schema(records))
    assert np.all(ds.X == 0.0)


def test_deleted_rows_dropped_and_counted():
    records = [
        _record("a", x="1"),
        WarningRecord(id="b", features={"x": "2"}, label=Label.DELETED),
        _record("c", x="3", label=Label.ACTIONABLE),
        WarningRecord(id="d", features={"x": "4"}, label=Label.DELETED),
    ]
    schema = fit_schema(records)
    ds = encode(records, schema)
    assert len(ds) + 2 == len(records)
    assert ds.ids == ["a", "c"]
    assert ds.y.tolist() == [-1, 1]


def test_permutation_equivariance():
    rng = np.random.default_rng(3)
    records = [
        _record(f"r{i}", x=repr(rng.normal()), k=rng.choice(["a", "b", "c"]))
        for i in range(20)
    ]
    schema = fit_schema(records)
    base = encode(records, schema)
    perm = rng.permutation(20)
    shuffled = encode([records[i] for i in perm], schema)
    assert shuffled.ids == [base.ids[i] for i in perm]
    assert np.array_equal(shuffled.X, base.X[perm])
    assert np.array_equal(shuffled.y, base.y[perm])


def test_encode_rejects_mismatched_feature_set():
    schema = fit_schema([_record("a", x="1")])
    with pytest.raises(SchemaError, match="feature set"):
        encode([_record("b", y="1")], schema)


def test_encode_rejects_non_numeric_value_in_numeric_column():
    schema = fit_schema([_record("a", x="1"), _record("b", x="2")])
    with pytest.raises(SchemaError, match="non-numeric"):
        encode([_record("c", x="oops")], schema)


def test_version_pair_uses_train_side_statistics(tmp_path):
    train_rows = [
        {"id": "t1", "x": "0", "k": "io", "category": "open"},
        {"id": "t2", "x": "10", "k": "np", "category": "close"},
    ]
    test_rows = [
        {"id": "s1", "x": "5", "k": "io", "category": "open"},
        {"id": "s2", "x": "5", "k": "fresh", "category": "close"},
    ]
    p_train, p_test = tmp_path / "v4.csv", tmp_path / "v5.csv"
    write_warning_csv(p_train, train_rows)
    write_warning_csv(p_test, test_rows)
    pair = load_version_pair(p_train, p_test)
    # train stats: mean 5, sd 5 -> test x=5 standardizes to exactly 0
    assert pair.test.X[:, 0].tolist() == [0.0, 0.0]
    # unseen category on the test side -> zero block
    assert pair.test.X[1, 1:].tolist() == [0.0, 0.0]
    assert pair.schema is pair.train.schema


def test_schema_json_round_trip_and_digest():
    records = [_record("a", x="1", k="io"), _record("b", x="2", k="np")]
    schema = fit_schema(records)
    clone = type(schema).from_json(schema.to_json())
    assert clone.to_json() == schema.to_json()
    assert clone.digest() == schema.digest()
    other = fit_schema([_record("a", x="1", k="zzz"), _record("b", x="2", k="np")])
    assert other.digest() != schema.digest()


def test_load_dataset_row_alignment(tmp_path):
    p = tmp_path / "w.csv"
    write_warning_csv(p, _basic_rows())
    ds = load_dataset(p)
    assert isinstance(ds, EncodedDataset)
    assert ds.ids == ["a", "b", "d"]  # c deleted
    assert ds.y.tolist() == [1, -1, -1]
    assert ds.row_of("d") == 2
    assert np.all(np.isfinite(ds.X))
