import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from spreading.domain import make_exterior, square_extent
from spreading.errors import CorruptSnapshotError
from spreading.storage import (
    SNAPSHOT_HEADER,
    read_descriptor,
    read_mask_binary,
    read_mask_text,
    read_snapshot,
    read_snapshot_header,
    write_descriptor,
    write_mask_binary,
    write_mask_text,
    write_snapshot,
)


class TestSnapshots(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.mask = make_exterior(1.0, square_extent(3.0), 0.5)
        rng = np.random.default_rng(3)
        self.u = np.where(self.mask.inside, rng.uniform(size=self.mask.shape), 0.0)
        self.v = np.where(self.mask.inside, rng.uniform(size=self.mask.shape), 0.0)

    def tearDown(self):
        self.tmp.cleanup()

    def test_fields_come_back_bit_exact(self):
        path = write_snapshot(self.dir / "s.frlb", 2.5, self.u, self.v, self.mask)
        header, u, v = read_snapshot(path)
        self.assertEqual(header["t"], 2.5)
        self.assertEqual((header["ny"], header["nx"]), self.mask.shape)
        self.assertEqual(header["origin"], self.mask.origin)
        self.assertTrue(np.array_equal(u, self.u))
        self.assertTrue(np.array_equal(v, self.v))
        self.assertEqual(read_snapshot_header(path), header)

    def test_file_size(self):
        path = write_snapshot(self.dir / "s.frlb", 0.0, self.u, self.v, self.mask)
        self.assertEqual(path.stat().st_size, SNAPSHOT_HEADER.size + 2 * 8 * self.mask.nx * self.mask.ny)

    def test_truncated_body(self):
        path = write_snapshot(self.dir / "s.frlb", 0.0, self.u, self.v, self.mask)
        path.write_bytes(path.read_bytes()[:-8])
        with self.assertRaises(CorruptSnapshotError):
            read_snapshot(path)
        with self.assertRaises(CorruptSnapshotError):
            read_snapshot_header(path)

    def test_truncated_header(self):
        path = self.dir / "short.frlb"
        path.write_bytes(b"FRLB")
        with self.assertRaises(CorruptSnapshotError):
            read_snapshot_header(path)

    def test_bad_magic(self):
        path = write_snapshot(self.dir / "s.frlb", 0.0, self.u, self.v, self.mask)
        path.write_bytes(b"XXXX" + path.read_bytes()[4:])
        with self.assertRaises(CorruptSnapshotError) as ctx:
            read_snapshot(path)
        self.assertIn("magic", str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(CorruptSnapshotError):
            read_snapshot(self.dir / "absent.frlb")


class TestMasks(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.mask = make_exterior(1.0, square_extent(3.0), 0.5)

    def tearDown(self):
        self.tmp.cleanup()

    def test_binary_mask(self):
        write_mask_binary(self.dir / "m.frlm", self.mask)
        loaded = read_mask_binary(self.dir / "m.frlm")
        self.assertTrue(np.array_equal(loaded.inside, self.mask.inside))
        self.assertEqual(loaded.h, self.mask.h)
        self.assertEqual(loaded.origin, self.mask.origin)

    def test_text_mask(self):
        write_mask_text(self.dir / "m.txt", self.mask)
        lines = (self.dir / "m.txt").read_text().splitlines()
        self.assertEqual(len(lines), 1 + self.mask.ny)
        loaded = read_mask_text(self.dir / "m.txt")
        self.assertTrue(np.array_equal(loaded.inside, self.mask.inside))

    def test_not_a_mask_file(self):
        (self.dir / "m.frlm").write_bytes(b"\0" * 64)
        with self.assertRaises(ValueError):
            read_mask_binary(self.dir / "m.frlm")

    def test_descriptor(self):
        write_descriptor(self.dir / "m.json", self.mask)
        descriptor = read_descriptor(self.dir / "m.json")
        self.assertEqual(descriptor["generator"], "exterior")
        self.assertEqual(descriptor["inside_count"], self.mask.inside_count)
        self.assertEqual(json.loads((self.dir / "m.json").read_text())["nx"], self.mask.nx)
        loaded = read_mask_binary(write_mask_binary(self.dir / "m.frlm", self.mask), descriptor)
        self.assertEqual(loaded.descriptor["obstacle_radius"], 1.0)


if __name__ == "__main__":
    unittest.main()
