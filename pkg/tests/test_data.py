import numpy as np
import pytest

from driverlens.data import (
    CATEGORICAL,
    NUMERIC,
    Dataset,
    encode,
    handle_missing,
    load_csv,
)
from driverlens.errors import DataError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadCsv:
    def test_basic_parse(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,2,x\n3,4,y\n5,6,x\n")
        table = load_csv(path, "label")
        assert table.n_rows == 3
        assert table.n_columns == 3
        assert table.target_column == "label"
        assert table.target_index == 2

    def test_target_absent(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,2,x\n")
        with pytest.raises(DataError, match="target column not found"):
            load_csv(path, "speed")

    def test_ragged_row_names_line(self, tmp_path):
        path = write(tmp_path, "a,b,c\n1,2,3\n4,5\n")
        with pytest.raises(DataError, match="line 3"):
            load_csv(path, "c")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot open"):
            load_csv(str(tmp_path / "nope.csv"), "label")

    def test_empty_file(self, tmp_path):
        path = write(tmp_path, "")
        with pytest.raises(DataError, match="empty"):
            load_csv(path, "label")

    def test_missing_cell_markers(self, tmp_path):
        path = write(tmp_path, "a,b,label\n,NA,x\n1,2,y\n")
        table = load_csv(path, "label")
        assert table.rows[0][0] is None
        assert table.rows[0][1] is None
        assert table.rows[1][0] == "1"

    def test_quoted_cells(self, tmp_path):
        path = write(tmp_path, 'a,label\n"wet, icy",x\n"say ""hi""",y\n')
        table = load_csv(path, "label")
        assert table.rows[0][0] == "wet, icy"
        assert table.rows[1][0] == 'say "hi"'


class TestHandleMissing:
    def test_fill_mean_numeric(self, tmp_path):
        path = write(tmp_path, "a,label\n1,x\n,y\n3,x\n")
        table = handle_missing(load_csv(path, "label"), "fill_mean")
        assert float(table.rows[1][0]) == 2.0

    def test_no_missing_is_identity(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,u,x\n2,v,y\n")
        original = load_csv(path, "label")
        for policy in ("fill_mean", "drop_rows"):
            result = handle_missing(original, policy)
            assert result.rows == original.rows

    def test_drop_rows(self, tmp_path):
        rows = "\n".join(["1,u,x", "2,,y", "3,w,x", "4,u,y", "5,v,x"])
        path = write(tmp_path, "a,b,label\n" + rows + "\n")
        table = handle_missing(load_csv(path, "label"), "drop_rows")
        assert table.n_rows == 4
        assert all(cell is not None for row in table.rows for cell in row)

    def test_drop_rows_preserves_surviving_cells(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,u,x\n2,,y\n3,w,x\n")
        before = load_csv(path, "label")
        after = handle_missing(before, "drop_rows")
        assert after.rows == [before.rows[0], before.rows[2]]

    def test_fill_mean_keeps_present_cells(self, tmp_path):
        path = write(tmp_path, "a,label\n1.5,x\n,y\n2.5,x\n")
        before = load_csv(path, "label")
        after = handle_missing(before, "fill_mean")
        assert after.rows[0][0] == "1.5"
        assert after.rows[2][0] == "2.5"

    def test_modal_fill_tie_lexicographic(self, tmp_path):
        path = write(tmp_path, "cond,label\ndry,x\nicy,y\n,x\ndry,y\nicy,x\n")
        table = handle_missing(load_csv(path, "label"), "fill_mean")
        assert table.rows[2][0] == "dry"  # dry/icy tie at 2 each

    def test_all_missing_column_errors(self, tmp_path):
        path = write(tmp_path, "a,label\n,x\n,y\n")
        with pytest.raises(DataError, match="entirely missing"):
            handle_missing(load_csv(path, "label"), "fill_mean")


class TestEncode:
    def test_categorical_sorted_unique(self, tmp_path):
        path = write(tmp_path, "cond,label\ndry,x\nicy,y\ndry,x\n")
        dataset, enc = encode(load_csv(path, "label"))
        assert enc.columns["cond"] == ("dry", "icy")
        assert dataset.X[:, 0].tolist() == [0.0, 1.0, 0.0]
        assert dataset.schema[0].kind == CATEGORICAL

    def test_target_sorted_classes(self, tmp_path):
        path = write(tmp_path, "a,label\n1,normal\n2,aggressive\n3,vague\n")
        dataset, enc = encode(load_csv(path, "label"))
        assert dataset.classes == ("aggressive", "normal", "vague")
        assert dataset.y.tolist() == [1, 0, 2]

    def test_decode_round_trip(self, tmp_path):
        path = write(tmp_path, "cond,label\ndry,x\nicy,y\nwet,x\n")
        _, enc = encode(load_csv(path, "label"))
        for value in ("dry", "icy", "wet"):
            assert enc.decode_value("cond", enc.encode_value("cond", value)) == value

    def test_numeric_parsing(self, tmp_path):
        path = write(tmp_path, "a,label\n1.5,x\n-2e3,y\n")
        dataset, _ = encode(load_csv(path, "label"))
        assert dataset.schema[0].kind == NUMERIC
        assert dataset.X[:, 0].tolist() == [1.5, -2000.0]

    def test_forced_numeric_unparsable_names_column_and_row(self, tmp_path):
        path = write(tmp_path, "speed,label\n10,x\nfast,y\n")
        with pytest.raises(DataError, match=r"'speed', row 1.*'fast'"):
            encode(load_csv(path, "label"), kind_overrides={"speed": "numeric"})

    def test_forced_categorical_on_numbers(self, tmp_path):
        path = write(tmp_path, "a,label\n10,x\n2,y\n")
        dataset, enc = encode(load_csv(path, "label"),
                              kind_overrides={"a": "categorical"})
        # string sort: "10" < "2"
        assert enc.columns["a"] == ("10", "2")
        assert dataset.X[:, 0].tolist() == [0.0, 1.0]

    def test_nonfinite_strings_are_categorical(self, tmp_path):
        path = write(tmp_path, "a,label\n1,x\ninf,y\n")
        dataset, _ = encode(load_csv(path, "label"))
        assert dataset.schema[0].kind == CATEGORICAL

    def test_missing_cells_rejected(self, tmp_path):
        path = write(tmp_path, "a,label\n1,x\n,y\n")
        with pytest.raises(DataError, match="missing cell"):
            encode(load_csv(path, "label"))

    def test_codes_are_dense(self, tmp_path):
        rng = np.random.default_rng(3)
        cats = ["red", "green", "blue", "amber"]
        lines = ["colour,label"]
        for _ in range(40):
            lines.append(f"{cats[rng.integers(4)]},c{rng.integers(3)}")
        path = write(tmp_path, "\n".join(lines) + "\n")
        dataset, enc = encode(load_csv(path, "label"))
        codes = set(dataset.X[:, 0].astype(int).tolist())
        assert codes == set(range(len(enc.columns["colour"])))
        assert set(dataset.y.tolist()) == set(range(len(dataset.classes)))

    def test_deterministic_from_bytes(self, tmp_path):
        text = "a,cond,label\n1,dry,x\n2,icy,y\n3,dry,x\n"
        d1, _ = encode(load_csv(write(tmp_path, text, "one.csv"), "label"))
        d2, _ = encode(load_csv(write(tmp_path, text, "two.csv"), "label"))
        assert np.array_equal(d1.X, d2.X)
        assert np.array_equal(d1.y, d2.y)
        assert d1.classes == d2.classes
        assert d1.schema == d2.schema


class TestDataset:
    def test_immutable_arrays(self, tmp_path):
        path = write(tmp_path, "a,label\n1,x\n2,y\n")
        dataset, _ = encode(load_csv(path, "label"))
        with pytest.raises(ValueError):
            dataset.X[0, 0] = 99.0
        with pytest.raises(ValueError):
            dataset.y[0] = 1

    def test_invariant_checks(self):
        from driverlens.data import ColumnSchema
        schema = (ColumnSchema("a", NUMERIC, 0),)
        with pytest.raises(DataError, match="non-finite"):
            Dataset(X=np.array([[np.nan]]), y=np.array([0]),
                    schema=schema, classes=("x", "y"))
        with pytest.raises(DataError, match="codes outside"):
            Dataset(X=np.array([[1.0]]), y=np.array([5]),
                    schema=schema, classes=("x", "y"))
