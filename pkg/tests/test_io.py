import numpy as np
import pytest

from isospec.io import format_float, read_csv, read_json, write_csv, write_json


class TestFloatFormat:
    def test_round_trips_doubles_exactly(self):
        rng = np.random.default_rng(11)
        for v in rng.uniform(-1e6, 1e6, 200):
            assert float(format_float(v)) == v
        for v in (0.006, 1e-300, 1e300, -0.0, 2.0 / 3.0):
            assert float(format_float(v)) == v


class TestCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "t.csv"
        a = np.array([1.0, 2.0 / 3.0, -4.5e-17])
        b = np.array([0.0, 1e12, 0.006])
        write_csv(path, ["a", "b"], [a, b])
        header, cols = read_csv(path)
        assert header == ["a", "b"]
        assert np.array_equal(cols[0], a)
        assert np.array_equal(cols[1], b)

    def test_header_column_mismatch_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="header"):
            write_csv(tmp_path / "t.csv", ["a"], [np.zeros(2), np.zeros(2)])

    def test_unequal_columns_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="same length"):
            write_csv(tmp_path / "t.csv", ["a", "b"], [np.zeros(2), np.zeros(3)])

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1.0,2.0\n3.0\n")
        with pytest.raises(ValueError, match="fields"):
            read_csv(path)

    def test_empty_table(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["a", "b"], [np.empty(0), np.empty(0)])
        header, cols = read_csv(path)
        assert header == ["a", "b"]
        assert all(c.size == 0 for c in cols)


class TestJson:
    def test_round_trip_and_determinism(self, tmp_path):
        payload = {"b": [1.0, 2.0 / 3.0], "a": {"nested": 0.006}}
        p1, p2 = tmp_path / "x.json", tmp_path / "y.json"
        write_json(p1, payload)
        write_json(p2, payload)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_json(p1) == payload
