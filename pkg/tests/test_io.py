import numpy as np
import pytest

from edgecount import Graph, euclidean_distances
from edgecount.errors import DataError
from edgecount.io import (
    read_edm,
    read_edm_text,
    read_graph_text,
    read_point_csv,
    sha256_file,
    write_edm,
    write_edm_text,
    write_graph_text,
    write_json_atomic,
)

from conftest import random_graph


def test_graph_text_roundtrip(tmp_path, rng):
    g = random_graph(rng, 12, p=0.4)
    path = tmp_path / "g.txt"
    write_graph_text(g, path)
    h = read_graph_text(path)
    assert h.n_nodes == g.n_nodes and h.edges() == g.edges()
    assert path.read_text().splitlines()[0] == "N 12"


def test_graph_text_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3\n0 1\n")
    with pytest.raises(DataError):
        read_graph_text(p)
    p.write_text("N 3\n0 0\n")
    with pytest.raises(DataError):  # loop
        read_graph_text(p)
    p.write_text("N 3\n0 1\n1 0\n")
    with pytest.raises(DataError):  # duplicate
        read_graph_text(p)
    p.write_text("N 3\n0 1 2\n")
    with pytest.raises(DataError):
        read_graph_text(p)


def test_edm_binary_roundtrip(tmp_path, rng):
    dm = euclidean_distances(rng.standard_normal((9, 4)))
    path = tmp_path / "d.edm"
    write_edm(dm, path)
    out = read_edm(path)
    assert out.n == 9
    assert np.array_equal(out.condensed, dm.condensed)
    assert path.read_bytes()[:4] == b"EDM1"
    with pytest.raises(DataError):
        read_edm(tmp_path / "missing.edm")
    bad = tmp_path / "bad.edm"
    bad.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(DataError):
        read_edm(bad)


def test_edm_text_roundtrip(tmp_path, rng):
    dm = euclidean_distances(rng.standard_normal((7, 3)))
    path = tmp_path / "d.txt"
    write_edm_text(dm, path)
    out = read_edm_text(path)
    assert out.n == 7
    assert np.array_equal(out.condensed, dm.condensed)  # repr round-trips exactly


def test_csv_comma_and_tab(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1.5,2.5\n3.0,4.0\n")
    assert read_point_csv(p).tolist() == [[1.5, 2.5], [3.0, 4.0]]
    p.write_text("1.5\t2.5\n3.0\t4.0\n")
    assert read_point_csv(p).tolist() == [[1.5, 2.5], [3.0, 4.0]]


def test_csv_header_detection(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n3,4\n")
    assert read_point_csv(p).tolist() == [[1.0, 2.0], [3.0, 4.0]]
    p.write_text("a,b\n")
    with pytest.raises(DataError):
        read_point_csv(p)


def test_csv_rejects_ragged_and_nonfinite(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3\n")
    with pytest.raises(DataError):
        read_point_csv(p)
    p.write_text("1,2\n3,nan\n")
    with pytest.raises(DataError):
        read_point_csv(p)
    p.write_text("")
    with pytest.raises(DataError):
        read_point_csv(p)


def test_sha256_and_atomic_json(tmp_path):
    p = tmp_path / "obj.json"
    write_json_atomic({"b": 1, "a": [1, 2]}, p)
    text = p.read_text()
    assert text.startswith("{") and '"a"' in text
    digest = sha256_file(p)
    assert len(digest) == 64
    write_json_atomic({"b": 1, "a": [1, 2]}, p)
    assert sha256_file(p) == digest  # stable serialization
