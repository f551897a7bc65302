import json

import numpy as np
import pytest

from unn.io_utils import (
    dataset_records,
    load_dataset,
    read_points_csv,
    read_queries,
    save_dataset,
    write_csv_rows,
)
from unn.objects import UncertainObject
from unn.pdf import DiscreteMixture, GaussianProduct, PointMass


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestPointsCsv:
    def test_read(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,y,label\n0,1,a\n2.5,-3,b\n\n")
        points, labels = read_points_csv(path)
        np.testing.assert_array_equal(points, [[0.0, 1.0], [2.5, -3.0]])
        assert labels == ["a", "b"]

    def test_without_labels(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,y\n0,1\n")
        points, labels = read_points_csv(path, require_label=False)
        assert points.shape == (1, 2)
        assert labels is None

    def test_header_only(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,y\n")
        points, _ = read_points_csv(path, require_label=False)
        assert points.shape == (0, 2)

    def test_missing_label_column(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,y\n0,1\n")
        with pytest.raises(ValueError, match=r"points\.csv:1:"):
            read_points_csv(path)

    def test_bad_value_reports_line(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,label\n1,a\noops,b\n")
        with pytest.raises(ValueError, match=r"points\.csv:3:"):
            read_points_csv(path)

    def test_ragged_row_reports_line(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,y,label\n1,2,a\n3,4,5,b\n")
        with pytest.raises(ValueError, match=r"points\.csv:3: expected 3 columns"):
            read_points_csv(path)

    def test_non_finite(self, tmp_path):
        path = write(tmp_path / "points.csv", "x,label\nnan,a\n")
        with pytest.raises(ValueError, match="non-finite"):
            read_points_csv(path)

    def test_empty_file(self, tmp_path):
        path = write(tmp_path / "points.csv", "")
        with pytest.raises(ValueError, match="missing header"):
            read_points_csv(path)


class TestDataset:
    def test_round_trip(self, tmp_path, bimodal, gaussian_line):
        for dataset in (bimodal(4), gaussian_line):
            path = str(tmp_path / "train.jsonl")
            save_dataset(dataset, path)
            restored = load_dataset(path)
            assert dataset_records(restored) == dataset_records(dataset)
            np.testing.assert_array_equal(restored.centers, dataset.centers)

    def test_creates_directory(self, tmp_path, bimodal):
        path = tmp_path / "nested" / "train.jsonl"
        save_dataset(bimodal(1), str(path))
        assert path.exists()

    def test_label_required(self, tmp_path):
        record = {"pdf": {"type": "point", "at": [0.0]}}
        path = write(tmp_path / "train.jsonl", json.dumps(record) + "\n")
        with pytest.raises(ValueError, match=r"train\.jsonl:1:"):
            load_dataset(path)

    def test_bad_json_reports_line(self, tmp_path):
        good = json.dumps({"label": "a", "pdf": {"type": "point", "at": [0.0]}})
        path = write(tmp_path / "train.jsonl", good + "\n\n{broken\n")
        with pytest.raises(ValueError, match=r"train\.jsonl:3:"):
            load_dataset(path)

    def test_bad_pdf_reports_line(self, tmp_path):
        record = {"label": "a", "pdf": {"type": "gauss", "mean": [0.0], "sigmas": [-1.0]}}
        path = write(tmp_path / "train.jsonl", json.dumps(record) + "\n")
        with pytest.raises(ValueError, match=r"train\.jsonl:1:"):
            load_dataset(path)

    def test_unknown_pdf_type(self, tmp_path):
        record = {"label": "a", "pdf": {"type": "cauchy"}}
        path = write(tmp_path / "train.jsonl", json.dumps(record) + "\n")
        with pytest.raises(ValueError, match="Unknown pdf type"):
            load_dataset(path)


class TestQueries:
    def test_csv_points(self, tmp_path):
        path = write(tmp_path / "queries.csv", "x,y\n0,0\n1,2\n")
        queries = read_queries(path)
        assert len(queries) == 2
        np.testing.assert_array_equal(queries[1], [1.0, 2.0])

    def test_csv_labels_ignored(self, tmp_path):
        path = write(tmp_path / "queries.csv", "x,label\n3,a\n")
        np.testing.assert_array_equal(read_queries(path)[0], [3.0])

    def test_jsonl_objects(self, tmp_path):
        objects = [
            UncertainObject(GaussianProduct([0.0, 1.0], [0.1, 0.2])),
            UncertainObject(DiscreteMixture([[0.0, 0.0], [1.0, 1.0]], [0.4, 0.6])),
            UncertainObject(PointMass([2.0, 2.0])),
        ]
        path = tmp_path / "queries.jsonl"
        path.write_text(
            "".join(json.dumps({"pdf": obj.pdf.to_record()}) + "\n" for obj in objects)
        )
        queries = read_queries(str(path))
        assert [type(query.pdf) for query in queries] == [type(obj.pdf) for obj in objects]
        assert queries[0].label is None
        assert queries[2].is_certain


def test_write_csv_rows(tmp_path):
    path = tmp_path / "out" / "rows.csv"
    write_csv_rows(str(path), ["a", "b"], [(1, "x"), (2.5, "y")])
    assert path.read_text() == "a,b\n1,x\n2.5,y\n"


def test_write_csv_rows_to_stdout(capsys):
    write_csv_rows(None, ["a"], [(1,)])
    assert capsys.readouterr().out == "a\n1\n"
