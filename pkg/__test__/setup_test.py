import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from helper.setup import DEFAULTS, ensure_env_setup, get_env_file_path, get_settings, save_env_vars, validate_env_var


class TestValidation(unittest.TestCase):
    def test_accepts_documented_values(self):
        validate_env_var("LVS_SCHEME", "IMEX")
        validate_env_var("LVS_WORKERS", "4")
        validate_env_var("LVS_CFL_SAFETY", "0.5")
        validate_env_var("LVS_LINEAR_SOLVER", "cg")

    def test_rejects_bad_values(self):
        for key, value in [("LVS_SCHEME", "rk4"), ("LVS_WORKERS", "0"), ("LVS_WORKERS", "two"),
                           ("LVS_CFL_SAFETY", "1.5"), ("LVS_CFL_SAFETY", "fast"), ("LVS_COLOUR", "red")]:
            with self.subTest(key=key, value=value):
                with self.assertRaises(ValueError):
                    validate_env_var(key, value)


class TestEnvFiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cwd = os.getcwd()
        os.chdir(self.tmp.name)
        self.env = mock.patch.dict(os.environ, {}, clear=False)
        self.env.start()
        for key in DEFAULTS:
            os.environ.pop(key, None)

    def tearDown(self):
        self.env.stop()
        os.chdir(self.cwd)
        self.tmp.cleanup()

    def test_save_writes_local_file(self):
        path = save_env_vars({"LVS_WORKERS": "3", "LVS_SCHEME": "IMEX"})
        self.assertEqual(path.resolve(), (Path(self.tmp.name) / ".env").resolve())
        text = path.read_text()
        self.assertIn("LVS_WORKERS", text)
        self.assertEqual(os.environ["LVS_WORKERS"], "3")
        self.assertEqual(get_settings()["LVS_SCHEME"], "IMEX")

    def test_invalid_value_writes_nothing(self):
        with self.assertRaises(ValueError):
            save_env_vars({"LVS_WORKERS": "3", "LVS_SCHEME": "rk4"})
        self.assertFalse((Path(self.tmp.name) / ".env").exists())

    def test_load_does_not_override_environment(self):
        (Path(self.tmp.name) / ".env").write_text("LVS_WORKERS=6\nLVS_TILE_ROWS=16\n")
        os.environ["LVS_WORKERS"] = "2"
        found = ensure_env_setup()
        self.assertEqual(found.resolve(), (Path(self.tmp.name) / ".env").resolve())
        self.assertEqual(os.environ["LVS_WORKERS"], "2")
        self.assertEqual(os.environ["LVS_TILE_ROWS"], "16")

    def test_defaults(self):
        settings = get_settings()
        self.assertEqual(set(settings), set(DEFAULTS))
        self.assertEqual(get_env_file_path().name, ".env")


if __name__ == "__main__":
    unittest.main()
