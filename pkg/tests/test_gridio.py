import json
import struct

import numpy as np
import pytest

from ghk import from_values, read_ghk, read_grid, read_json, write_ghk, write_json
from ghk.gridio import MAGIC, GridFormatError, from_json_dict, to_json_dict, write_grid


def sample_grids():
    rng = np.random.default_rng(99)
    yield from_values(rng.uniform(-5, 5, 7), 0.125, origin=-3)
    yield from_values(rng.uniform(-1, 1, (3, 5)), 1.0 / 3, origin=(2, -1))
    yield from_values(rng.uniform(0, 1, (2, 3, 4)), 7.0, origin=(0, 1, 2))
    yield from_values([0.1 + 0.2], 1e-9, origin=9_999_999)


class TestBinaryRoundTrip:
    def test_bit_exact(self, tmp_path):
        for i, f in enumerate(sample_grids()):
            path = tmp_path / f"g{i}.ghk"
            write_ghk(f, path)
            g = read_ghk(path)
            assert g == f

    def test_magic_bytes(self, tmp_path):
        f = from_values([1.0], 1.0)
        path = tmp_path / "a.ghk"
        write_ghk(f, path)
        assert path.read_bytes()[:4] == MAGIC

    def test_layout(self, tmp_path):
        f = from_values([1.5, -2.5], 0.5, origin=-1)
        path = tmp_path / "a.ghk"
        write_ghk(f, path)
        raw = path.read_bytes()
        dim, = struct.unpack_from("<I", raw, 4)
        n, = struct.unpack_from("<I", raw, 8)
        w, = struct.unpack_from("<d", raw, 12)
        o, = struct.unpack_from("<q", raw, 20)
        vals = struct.unpack_from("<2d", raw, 28)
        assert (dim, n, w, o, vals) == (1, 2, 0.5, -1, (1.5, -2.5))

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.ghk"
        path.write_bytes(b"NOPE" + b"\0" * 30)
        with pytest.raises(GridFormatError, match="magic"):
            read_ghk(path)

    def test_truncated(self, tmp_path):
        f = from_values(np.ones(8), 1.0)
        path = tmp_path / "t.ghk"
        write_ghk(f, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(GridFormatError, match="expected"):
            read_ghk(path)


class TestJsonRoundTrip:
    @pytest.mark.parametrize("encoding", ["list", "base64"])
    def test_bit_exact(self, tmp_path, encoding):
        for i, f in enumerate(sample_grids()):
            path = tmp_path / f"g{i}.json"
            write_json(f, path, values_encoding=encoding)
            assert read_json(path) == f

    def test_fields(self):
        f = from_values([1.0, 2.0], 0.25, origin=3)
        doc = to_json_dict(f)
        assert doc["dim"] == 1
        assert doc["extents"] == [2]
        assert doc["spacing"] == 0.25
        assert doc["origin"] == [3]
        assert doc["values"] == [1.0, 2.0]

    def test_base64_field(self):
        f = from_values([1.0], 1.0)
        doc = to_json_dict(f, "base64")
        assert "values_b64" in doc and "values" not in doc
        assert from_json_dict(doc) == f

    def test_wrong_count(self):
        doc = to_json_dict(from_values([1.0, 2.0], 1.0))
        doc["values"] = [1.0]
        with pytest.raises(GridFormatError, match="values"):
            from_json_dict(doc)

    def test_missing_values(self):
        doc = to_json_dict(from_values([1.0], 1.0))
        del doc["values"]
        with pytest.raises(GridFormatError):
            from_json_dict(doc)

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{not json")
        with pytest.raises(GridFormatError, match="JSON"):
            read_json(path)

    def test_nonfinite_rejected(self):
        doc = {"dim": 1, "extents": [1], "spacing": 1.0, "origin": [0],
               "values": [float("nan")]}
        with pytest.raises(GridFormatError):
            from_json_dict(doc)


class TestSniffing:
    def test_read_grid_both_formats(self, tmp_path):
        f = next(iter(sample_grids()))
        write_ghk(f, tmp_path / "a.ghk")
        write_json(f, tmp_path / "a.json")
        assert read_grid(tmp_path / "a.ghk") == f
        assert read_grid(tmp_path / "a.json") == f

    def test_write_grid_suffix_dispatch(self, tmp_path):
        f = from_values([4.0], 2.0)
        write_grid(f, tmp_path / "b.ghk")
        assert (tmp_path / "b.ghk").read_bytes()[:4] == MAGIC
        write_grid(f, tmp_path / "b.json")
        json.loads((tmp_path / "b.json").read_text())
