import csv
import json
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .objects import Dataset, UncertainObject
from .pdf import pdf_from_record

LABEL_COLUMN = "label"


@contextmanager
def _open_output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as output:
        yield output


def read_points_csv(
    path: str, require_label: bool = True
) -> Tuple[np.ndarray, Optional[List[str]]]:
    """
    Read a CSV with a header row, numeric feature columns and a final `label`
    column. Returns an (n, d) array and the labels (None without a label column).
    """
    with open(path, "r", encoding="utf-8", newline="") as source:
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}:1: missing header row")
        header = [name.strip() for name in header]
        has_label = bool(header) and header[-1] == LABEL_COLUMN
        if require_label and not has_label:
            raise ValueError(f"{path}:1: last column must be '{LABEL_COLUMN}'")
        width = len(header) - int(has_label)
        if width < 1:
            raise ValueError(f"{path}:1: no feature columns")

        rows, labels = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}:{line}: expected {len(header)} columns, got {len(row)}"
                )
            try:
                values = [float(cell) for cell in row[:width]]
            except ValueError as exc:
                raise ValueError(f"{path}:{line}: {exc}") from exc
            if not np.all(np.isfinite(values)):
                raise ValueError(f"{path}:{line}: non-finite feature value")
            rows.append(values)
            if has_label:
                labels.append(row[-1].strip())
    points = np.array(rows, dtype=np.float64).reshape(len(rows), width)
    return points, (labels if has_label else None)


def _read_records(path: str) -> Iterable[Tuple[int, Dict[str, Any]]]:
    with open(path, "r", encoding="utf-8") as source:
        for line, text in enumerate(source, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line}: {exc}") from exc
            if not isinstance(record, dict) or "pdf" not in record:
                raise ValueError(f"{path}:{line}: record needs a 'pdf' field")
            yield line, record


def _object_from_record(path: str, line: int, record: Dict[str, Any]) -> UncertainObject:
    try:
        return UncertainObject(pdf_from_record(record["pdf"]), label=record.get("label"))
    except ValueError as exc:
        raise ValueError(f"{path}:{line}: {exc}") from exc


def load_dataset(path: str) -> Dataset:
    """
    Load a JSON-lines dataset: {"label": ..., "pdf": {"type": ..., ...}} per line.
    """
    objects = []
    for line, record in _read_records(path):
        if record.get("label") is None:
            raise ValueError(f"{path}:{line}: training records need a 'label'")
        objects.append(_object_from_record(path, line, record))
    return Dataset(objects)


def dataset_records(dataset: Dataset) -> List[Dict[str, Any]]:
    return [{"label": obj.label, "pdf": obj.pdf.to_record()} for obj in dataset]


def save_dataset(dataset: Dataset, path: Optional[str]) -> None:
    write_jsonl(path, dataset_records(dataset))


def save_queries(objects: Sequence[UncertainObject], path: Optional[str]) -> None:
    """
    Write unlabeled test objects as JSON lines readable by `read_queries`.
    """
    write_jsonl(path, [{"pdf": obj.pdf.to_record()} for obj in objects])


def write_jsonl(path: Optional[str], records: Iterable[Dict[str, Any]]) -> None:
    with _open_output(path) as output:
        for record in records:
            output.write(json.dumps(record) + "\n")


def read_queries(path: str) -> List[Union[np.ndarray, UncertainObject]]:
    """
    Test objects from a CSV of points (label column optional) or a JSON-lines
    file of pdf records.
    """
    if path.endswith(".jsonl") or path.endswith(".json"):
        return [_object_from_record(path, line, record) for line, record in _read_records(path)]
    points, _ = read_points_csv(path, require_label=False)
    return list(points)


def write_csv_rows(
    path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    """
    Write a header and rows to `path`, or to stdout when path is None or "-".
    """
    with _open_output(path) as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
