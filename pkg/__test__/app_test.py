import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import argparse
import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

import app
from spreading.errors import ParameterError

RUN_CONFIG = """\
params: {d1: 1.0, d2: 1.0, r1: 1.0, r2: 1.0, a1: 0.5, a2: 1.5}
domain: {generator: plane, extent: [-2.0, 30.0, -6.0, 6.0], h: 0.5}
initial: {kind: bump, center: [0.0, 0.0], radius: 2.0}
solver: {scheme: explicit, horizon: 12.0, snapshot_every: 0.5}
measurement:
  e: [1.0, 0.0]
  anchors: [[0.0, 2.0]]
  A_list: [1.0]
  probes: [{id: ahead, point: [8.0, 0.0]}]
"""


def run_cli(*argv):
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = app.main(list(argv))
    return code, buffer.getvalue()


class TestArgumentTypes(unittest.TestCase):
    def test_point(self):
        self.assertEqual(app.point("1,-2.5"), (1.0, -2.5))
        with self.assertRaises(argparse.ArgumentTypeError):
            app.point("1")

    def test_key_value(self):
        self.assertEqual(app.key_value("t_range=[0, 3]"), ("t_range", [0, 3]))
        self.assertEqual(app.key_value("R=2"), ("R", 2))
        with self.assertRaises(argparse.ArgumentTypeError):
            app.key_value("R2")

    def test_parse_params(self):
        self.assertEqual(app.parse_params().to_dict(), app.DEFAULT_PARAMS)
        self.assertEqual(app.parse_params("d2=3,a2=2").d2, 3.0)
        with self.assertRaises(ParameterError):
            app.parse_params("d3=1")
        with self.assertRaises(ParameterError):
            app.parse_params("d2")


class TestVerifyCommand(unittest.TestCase):
    def test_list(self):
        code, out = run_cli("verify", "--list")
        self.assertEqual(code, 0)
        self.assertIn("exterior_exact_speed", out)

    def test_unknown_and_missing_names(self):
        self.assertEqual(run_cli("verify", "moon_landing")[0], 2)
        self.assertEqual(run_cli("verify")[0], 2)

    def test_quick_preset(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, out = run_cli("verify", "scheme_monotonicity", "--quick", "-o", tmp)
            self.assertEqual(code, 0, out)
            self.assertTrue((Path(tmp) / "verify" / "scheme_monotonicity_quick.json").exists())


class TestResidualCommand(unittest.TestCase):
    def test_exterior_construction(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "residual.json"
            code, out = run_cli("residual", "ext_case1", "--set", "n_along=20", "--set", "n_transverse=3",
                                "--set", "n_time=5", "-o", str(path))
            self.assertEqual(code, 0, out)
            self.assertTrue(json.loads(path.read_text())["passed"])

    def test_usage_errors(self):
        self.assertEqual(run_cli("residual", "ext_case2")[0], 2)
        self.assertEqual(run_cli("residual", "ext_case1", "--set", "colour=1")[0], 2)
        self.assertEqual(run_cli("residual", "ext_case1", "--params", "a1=2")[0], 2)


class TestDomainsCommand(unittest.TestCase):
    def test_list(self):
        code, out = run_cli("domains", "list")
        self.assertEqual(code, 0)
        self.assertIn("spiral", out)

    def test_export_and_inspect(self):
        with tempfile.TemporaryDirectory() as tmp:
            prefix = Path(tmp) / "masks" / "disk"
            code, out = run_cli("domains", "export", "exterior", "--arg", "obstacle_radius=1.0",
                                "--arg", "extent=[-3, 3, -3, 3]", "--arg", "h=0.5", "--format", "both",
                                "-o", str(prefix))
            self.assertEqual(code, 0, out)
            for suffix in (".frlm", ".txt", ".json"):
                self.assertTrue(prefix.with_suffix(suffix).exists(), suffix)
            code, out = run_cli("domains", "inspect", str(prefix.with_suffix(".frlm")))
            self.assertEqual(code, 0, out)
            self.assertIn("156 inside", out)
            code, _ = run_cli("domains", "inspect", str(prefix.with_suffix(".txt")))
            self.assertEqual(code, 0)

    def test_export_with_missing_argument(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, _ = run_cli("domains", "export", "exterior", "--arg", "h=0.5", "-o", str(Path(tmp) / "m"))
        self.assertEqual(code, 2)


class TestEigenCommand(unittest.TestCase):
    def test_disk(self):
        code, out = run_cli("eigen", "disk", "--R", "1", "--h", "0.05")
        self.assertEqual(code, 0)
        self.assertIn("Bessel", out)

    def test_disk_below_resolution(self):
        self.assertEqual(run_cli("eigen", "disk", "--R", "1", "--h", "0.2")[0], 1)


class TestSimulateAndSpeeds(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.config = self.dir / "plane.yaml"
        self.config.write_text(RUN_CONFIG)

    def tearDown(self):
        self.tmp.cleanup()

    def test_missing_config(self):
        self.assertEqual(run_cli("simulate", str(self.dir / "absent.yaml"))[0], 2)

    def test_simulate_then_measure(self):
        run_dir = self.dir / "run"
        code, out = run_cli("simulate", str(self.config), "-o", str(run_dir))
        self.assertEqual(code, 0, out)
        manifest = json.loads((run_dir / "manifest.json").read_text())
        self.assertEqual(len(manifest["snapshots"]), 25)
        self.assertTrue((run_dir / "probes.csv").exists())
        code, out = run_cli("speeds", str(run_dir))
        self.assertIn(code, (0, 1), out)
        out_dir = run_dir / "speeds_eps0.01"
        for name in ("matrix.csv", "estimates.json", "trace_global.csv", "trace_z01_A1.csv"):
            self.assertTrue((out_dir / name).exists(), name)

    def test_speeds_without_snapshots(self):
        run_dir = self.dir / "bare"
        code, out = run_cli("simulate", str(self.config), "-o", str(run_dir), "--no-snapshots")
        self.assertEqual(code, 0, out)
        self.assertEqual(run_cli("speeds", str(run_dir))[0], 1)

    def test_speeds_on_missing_run(self):
        self.assertEqual(run_cli("speeds", str(self.dir / "nowhere"))[0], 2)


if __name__ == "__main__":
    unittest.main()
