import hashlib
import json

import pandas as pd

from geoscale.detect.detectors import run_led
from geoscale.detect.record import BoundingBox, Record, TimeWindow
from geoscale.io.output import (
    dump_json,
    sha256_of,
    write_csv,
    write_json,
    write_result,
)

PLANE = BoundingBox(0.0, 0.0, 10.0, 10.0, planar=True)
DAY = TimeWindow(0.0, 86400.0)


def small_result():
    records = [
        Record("r%d" % k, "u%d" % k, 600.0 + k, 2.0, 2.0 + 0.01 * k,
               "Café rally downtown")
        for k in range(4)
    ]
    records.append(Record("lone", "x", 100.0, 8.0, 8.0, "quiet evening"))
    return run_led(records, box=PLANE, window=DAY)


def test_dump_json():
    text = dump_json({"b": 1, "a": ["é"]})
    assert text == '{\n  "a": [\n    "é"\n  ],\n  "b": 1\n}\n'


def test_write_json_utf8(tmp_path):
    path = tmp_path / "x.json"
    write_json(path, {"term": "café"})
    assert "café" in path.read_bytes().decode("utf-8")
    assert json.loads(path.read_text(encoding="utf-8")) == {"term": "café"}


def test_write_csv(tmp_path):
    path = tmp_path / "x.csv"
    write_csv(path, pd.DataFrame({"term": ["ows", "park"], "n": [3, 4]}))
    assert path.read_bytes() == b"term,n\nows,3\npark,4\n"


def test_write_result(tmp_path):
    result = small_result()
    paths = write_result(result, tmp_path / "out", dump_graph=result.graph)
    names = [p.rsplit("/", 1)[-1] for p in map(str, paths)]
    assert names == ["clusters.json", "clusters.geojson", "dropped.json", "graph.txt"]
    clusters = json.loads((tmp_path / "out" / "clusters.json").read_text("utf-8"))
    assert clusters["clusters"][0]["record_ids"] == ["r0", "r1", "r2", "r3"]
    assert "café" in clusters["clusters"][0]["top_terms"]
    geo = json.loads((tmp_path / "out" / "clusters.geojson").read_text("utf-8"))
    assert len(geo["features"]) == 4
    dropped = json.loads((tmp_path / "out" / "dropped.json").read_text("utf-8"))
    assert dropped["counts"] == {"too_few_records": 1}
    assert len((tmp_path / "out" / "graph.txt").read_text().splitlines()) == 6


def test_write_result_byte_stable(tmp_path):
    write_result(small_result(), tmp_path / "a")
    write_result(small_result(), tmp_path / "b")
    for name in ("clusters.json", "clusters.geojson", "dropped.json"):
        assert sha256_of(tmp_path / "a" / name) == sha256_of(tmp_path / "b" / name)


def test_sha256_of(tmp_path):
    path = tmp_path / "blob"
    path.write_bytes(b"geoscale")
    assert sha256_of(path) == hashlib.sha256(b"geoscale").hexdigest()
