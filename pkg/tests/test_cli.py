import csv
import io
import json
import os
import tempfile
import unittest

from xxzff.cli import EXIT_INVALID, EXIT_OK, main


def data_path(name):
    return os.path.join(os.path.dirname(__file__), "data", name)


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


class TestCommandLine(unittest.TestCase):
    def test_restricted_sum(self):
        code, output = run(
            ["verify", "restricted-sum", "--nu", "0.3", "--ell", "0"]
            + ["--L", "50", "--x", "50"]
        )
        self.assertEqual(code, EXIT_OK)
        document = json.loads(output)
        self.assertEqual(document["format"], 1)
        self.assertEqual(document["restricted_sum"]["cut"], 60)
        self.assertLess(document["restricted_sum"]["relative_error"], 1e-3)
        self.assertIn("re", document["restricted_sum"]["lhs"])

    def test_invalid_config(self):
        code, output = run(["-q", "-c", data_path("invalid-config.json"), "thermo"])
        self.assertEqual(code, EXIT_INVALID)
        self.assertEqual(output, "")

    def test_missing_config(self):
        code, _ = run(["-q", "thermo"])
        self.assertEqual(code, EXIT_INVALID)

    def test_bad_grid(self):
        code, _ = run(
            ["-q", "-c", data_path("free-fermion-config.json"), "response"]
            + ["--grid", "0:1"]
        )
        self.assertEqual(code, EXIT_INVALID)

    def test_version(self):
        with self.assertRaises(SystemExit) as context:
            main(["--version"], out=io.StringIO())
        self.assertEqual(context.exception.code, 0)


class TestWithGroundState(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        with open(data_path("free-fermion-config.json"), encoding="utf-8") as handle:
            config = json.load(handle)
        config["cache_dir"] = os.path.join(self.directory.name, "cache")
        self.config_path = os.path.join(self.directory.name, "config.json")
        with open(self.config_path, "w", encoding="utf-8") as handle:
            json.dump(config, handle)

    def tearDown(self):
        self.directory.cleanup()

    def test_thermo_uses_cache(self):
        code, output = run(["-c", self.config_path, "thermo"])
        self.assertEqual(code, EXIT_OK)
        first = json.loads(output)["thermo"]
        self.assertFalse(first["cache_hit"])
        code, output = run(["-c", self.config_path, "thermo"])
        second = json.loads(output)["thermo"]
        self.assertTrue(second["cache_hit"])
        self.assertEqual(first["fermi"], second["fermi"])
        for name, value in second["residuals"].items():
            self.assertLess(value, 1e-8, msg=name)

    def test_exponents(self):
        code, output = run(["-c", self.config_path, "exponents"])
        self.assertEqual(code, EXIT_OK)
        exponents = json.loads(output)["exponents"]
        self.assertAlmostEqual(exponents["theta_plus"]["re"], -1.0, 10)
        self.assertAlmostEqual(exponents["theta_minus"]["re"], 0.0, 10)

    def test_strings(self):
        code, output = run(["-c", self.config_path, "strings", "--r-max", "3"])
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.reader(io.StringIO(output)))
        self.assertEqual(rows[0], ["r", "exists", "delta_r", "s_r"])
        self.assertEqual([row[0] for row in rows[1:]], ["2", "3"])
        self.assertEqual({row[1] for row in rows[1:]}, {"false"})

    def test_correlator_sweep(self):
        code, output = run(
            ["-c", self.config_path, "correlator", "--m", "4", "6"]
            + ["--t", "0", "--csv-sweep"]
        )
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.reader(io.StringIO(output)))
        self.assertEqual(rows[0], ["m", "t", "re", "im", "error"])
        self.assertEqual([row[0] for row in rows[1:]], ["4", "6"])
        for row in rows[1:]:
            self.assertLess(abs(float(row[3])), 1e-8)

    def test_response_grid(self):
        code, output = run(
            ["-c", self.config_path, "response", "--grid", "0.4:0.6:2,-0.5:-0.1:3"]
        )
        self.assertEqual(code, EXIT_OK)
        rows = list(csv.reader(io.StringIO(output)))
        self.assertEqual(rows[0][:3], ["k", "omega", "S"])
        self.assertEqual(len(rows[0]), 3 + 5)
        self.assertIn("h1_l1,0", rows[0])
        self.assertEqual(len(rows), 1 + 2 * 3)
        self.assertEqual(float(rows[1][0]), 0.4)
        self.assertAlmostEqual(float(rows[2][1]), -0.3, 14)
