import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import copy
import tempfile
import unittest
from pathlib import Path

from helper.config import config_hash, cross_validate, dump_config, load_config, parse_config, parse_domain
from spreading.errors import ConfigError
from spreading.params import KineticParams

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BASE = {
    "schema_version": 1,
    "seed": 5,
    "params": {"d1": 1.0, "d2": 1.0, "r1": 1.0, "r2": 1.0, "a1": 0.5, "a2": 1.5},
    "domain": {"generator": "exterior", "obstacle_radius": 1.0, "extent": [-6, 6, -6, 6], "h": 0.5},
    "initial": {"kind": "bump", "center": [3.0, 0.0], "radius": 1.0},
    "solver": {"scheme": "explicit", "horizon": 2.0, "snapshot_every": 0.5},
    "measurement": {"e": [1.0, 0.0], "anchors": [[0.0, 3.0]], "A_list": [2.0],
                    "probes": [{"id": "p1", "point": [4.0, 0.0]}]},
    "output": {"dir": "runs", "snapshots": True},
}


def with_change(path, value):
    tree = copy.deepcopy(BASE)
    node = tree
    for key in path[:-1]:
        node = node[key]
    if value is KeyError:
        del node[path[-1]]
    else:
        node[path[-1]] = value
    return tree


class TestParseConfig(unittest.TestCase):
    def test_normalized(self):
        config = parse_config(copy.deepcopy(BASE))
        self.assertEqual(config.params, KineticParams(1.0, 1.0, 1.0, 1.0, 0.5, 1.5))
        self.assertEqual(config.domain["extent"], [-6.0, 6.0, -6.0, 6.0])
        self.assertEqual(config.initial["amplitude"], 1.0)
        self.assertEqual(config.solver.horizon, 2.0)
        self.assertEqual(config.measurement.A_list, [2.0])
        self.assertEqual(config.measurement.probes[0]["species"], "u")
        self.assertEqual(config.seed, 5)

    def test_errors_name_the_field(self):
        cases = [
            (("params", "a1"), 1.2, "params"),
            (("params", "d1"), "fast", "params.d1"),
            (("domain", "generator"), "torus", "domain.generator"),
            (("domain", "obstacle_radius"), KeyError, "domain.obstacle_radius"),
            (("domain", "extent"), [0, 1], "domain.extent"),
            (("domain", "h"), -0.5, "domain.h"),
            (("initial", "kind"), "ring", "initial.kind"),
            (("initial", "amplitude"), 1.5, "initial.amplitude"),
            (("solver", "scheme"), "rk4", "solver.scheme"),
            (("solver", "workers"), 0, "solver.workers"),
            (("solver", "cfl_safety"), 2.0, "solver.cfl_safety"),
            (("measurement", "epsilon"), 0.7, "measurement.epsilon"),
            (("measurement", "e"), [0.0, 0.0], "measurement.e"),
            (("measurement", "n_windows"), 1, "measurement.n_windows"),
            (("output", "snapshots"), "yes", "output.snapshots"),
            (("seed",), 1.5, "seed"),
            (("schema_version",), 2, "schema_version"),
            (("colour",), "red", "colour"),
            (("params",), KeyError, "params"),
        ]
        for path, value, field_path in cases:
            with self.subTest(field=field_path):
                with self.assertRaises(ConfigError) as ctx:
                    parse_config(with_change(path, value))
                self.assertEqual(ctx.exception.field, field_path)

    def test_not_a_mapping(self):
        with self.assertRaises(ConfigError):
            parse_config(["params"])

    def test_parse_domain(self):
        domain = parse_domain({"generator": "plane", "extent": [0, 1, 0, 1], "h": 0.25})
        self.assertEqual(domain["generator"], "plane")
        self.assertEqual(domain["h"], 0.25)
        with self.assertRaises(ConfigError):
            parse_domain({"generator": "plane", "extent": [0, 1, 0, 1], "h": 0.25, "radius": 1})


class TestPersistence(unittest.TestCase):
    def test_hash_is_stable_across_dump_and_load(self):
        config = parse_config(copy.deepcopy(BASE))
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_config(config, Path(tmp) / "config.yaml")
            reloaded = load_config(path)
        self.assertEqual(config_hash(reloaded), config_hash(config))
        self.assertEqual(len(config_hash(config)), 64)
        self.assertEqual(config_hash(parse_config(config.to_dict())), config_hash(config))

    def test_hash_changes_with_content(self):
        a = parse_config(copy.deepcopy(BASE))
        b = parse_config(with_change(("seed",), 6))
        self.assertNotEqual(config_hash(a), config_hash(b))

    def test_missing_and_invalid_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigError):
                load_config(Path(tmp) / "absent.yaml")
            bad = Path(tmp) / "bad.yaml"
            bad.write_text("params: [unclosed\n")
            with self.assertRaises(ConfigError):
                load_config(bad)

    def test_shipped_configs_parse(self):
        for name in ("exterior.yaml", "line.yaml"):
            with self.subTest(config=name):
                config = load_config(CONFIGS / name)
                mask = config.build_mask()
                cross_validate(config, mask)
                config.initial_condition(mask)


class TestCrossValidate(unittest.TestCase):
    def test_anchor_radii(self):
        config = parse_config(copy.deepcopy(BASE))
        radii = cross_validate(config, config.build_mask())
        self.assertIn("z=(0,3)", radii)

    def test_tube_radius_too_small(self):
        tree = with_change(("domain",), {"generator": "half_cylinder", "e": [1.0, 0.0], "A": 0.0, "x0": [0.0, 0.0],
                                         "R": 1.0, "extent": [-2.0, 20.0, -6.0, 6.0], "h": 0.5})
        tree["measurement"]["anchors"] = [[0.0, 4.0]]
        config = parse_config(tree)
        with self.assertRaises(ConfigError) as ctx:
            cross_validate(config, config.build_mask())
        self.assertEqual(ctx.exception.field, "measurement.A_list[0]")

    def test_probe_outside(self):
        config = parse_config(with_change(("measurement", "probes"), [{"id": "hole", "point": [0.0, 0.0]}]))
        with self.assertRaises(ConfigError) as ctx:
            cross_validate(config, config.build_mask())
        self.assertEqual(ctx.exception.field, "measurement.probes")

    def test_fixed_dt_above_bound(self):
        config = parse_config(with_change(("solver", "dt"), 1.0))
        with self.assertRaises(ConfigError) as ctx:
            cross_validate(config, config.build_mask())
        self.assertEqual(ctx.exception.field, "solver.dt")

    def test_generator_failure_is_a_config_error(self):
        config = parse_config(with_change(("domain", "obstacle_radius"), 10.0))
        with self.assertRaises(ConfigError):
            config.build_mask()


if __name__ == "__main__":
    unittest.main()
