import json
import math
import os
import tempfile
import unittest
from unittest import mock

from voluptuous import MultipleInvalid

from xxzff.config import (
    CACHE_DIR_ENV,
    load_config,
    prepare_config,
    prepare_excitation,
    prepare_restricted_sum,
)
from xxzff.errors import InvalidConfigError
from xxzff.validation import validate_excitation, validate_model


def data_path(name):
    return os.path.join(os.path.dirname(__file__), "data", name)


FREE_FERMION = {"J": 1.0, "zeta": math.pi / 2.0, "h": 2.0}


class TestValidation(unittest.TestCase):
    def check_model(self, model):
        try:
            validate_model(model)
        except MultipleInvalid as e:
            self.fail(f"MultipleInvalid {e.msg} thrown for {model}")

    def check_invalid_model(self, model):
        with self.assertRaises(MultipleInvalid, msg=f"{model} is invalid"):
            validate_model(model)

    def test_model(self):
        self.check_model(FREE_FERMION)
        self.check_model({"zeta": 0.3, "h": 1.0})
        self.check_model({"J": 2, "zeta": 2.5, "h": 0.1})

    def test_invalid_model(self):
        for bad in (
            {"zeta": 0.0, "h": 1.0},
            {"zeta": math.pi, "h": 1.0},
            {"zeta": 1.0, "h": 0.0},
            {"zeta": 1.0, "h": -1.0},
            {"zeta": "1.0", "h": 1.0},
            {"J": -1.0, "zeta": 1.0, "h": 1.0},
            {"zeta": math.pi / 2.0, "h": 4.5},
            {"h": 1.0},
        ):
            self.check_invalid_model(bad)

    def test_excitation_defaults(self):
        prepared = validate_excitation({})
        self.assertEqual(prepared["holes"], [])
        self.assertEqual(prepared["strings"], {})
        self.assertEqual(prepared["umklapp"], [0, 0])
        self.assertEqual(prepared["operator_spin"], 0)

    def test_excitation_balance(self):
        validate_excitation({"holes": [0.1, 0.2], "strings": {2: [[0.0, 1.0]]}})
        validate_excitation({"holes": [0.1], "umklapp": [0, 1]})
        with self.assertRaises(MultipleInvalid):
            validate_excitation({"holes": [0.1]})
        with self.assertRaises(MultipleInvalid):
            validate_excitation({"umklapp": [1, 0]})


class TestPrepareConfig(unittest.TestCase):
    def test_defaults(self):
        config = prepare_config({"model": FREE_FERMION})
        self.assertEqual(config["grid"]["n_nodes"], 128)
        self.assertEqual(config["series"]["delta"], 0.05)
        self.assertEqual(config["series"]["im_t"], [1e-3, 5e-4, 2.5e-4])
        self.assertEqual(config["series"]["plugin"], "unit")
        self.assertIsNone(config["response"]["edge_trim"])
        self.assertEqual(config["response"]["s_window"], 2)
        self.assertEqual(config["output"], "json")
        self.assertEqual(config["n_jobs"], 1)
        self.assertIsNone(config["cache_dir"])
        self.assertEqual(config["model"]["J"], 1.0)

    def test_none_values_are_defaults(self):
        config = prepare_config({"model": FREE_FERMION, "cache_dir": None})
        self.assertIsNone(config["cache_dir"])

    def test_named_constraint(self):
        with self.assertRaisesRegex(InvalidConfigError, r"model\.h: .*h_c = 4"):
            prepare_config({"model": {"J": 1.0, "zeta": math.pi / 2.0, "h": 4.5}})

    def test_every_failure_is_named(self):
        with self.assertRaises(InvalidConfigError) as context:
            load_config(data_path("invalid-config.json"))
        message = str(context.exception)
        self.assertIn("model.h", message)
        self.assertIn("series.plugin", message)

    def test_cache_dir_environment(self):
        with mock.patch.dict(os.environ, {CACHE_DIR_ENV: "/tmp/xxzff-cache"}):
            config = prepare_config({"model": FREE_FERMION, "cache_dir": "elsewhere"})
        self.assertEqual(config["cache_dir"], "/tmp/xxzff-cache")

    def test_load_config(self):
        config = load_config(data_path("free-fermion-config.json"))
        self.assertEqual(config["grid"]["n_nodes"], 64)
        self.assertEqual(config["series"]["delta"], 0.12)
        self.assertEqual(config["excitation"]["umklapp"], [1, 0])

    def test_load_config_syntax_error(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "broken.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write('{"model": {"zeta": 1.0,\n "h": }')
            with self.assertRaisesRegex(InvalidConfigError, "line 2"):
                load_config(path)

    def test_load_config_not_an_object(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "list.json")
            with open(path, "w", encoding="utf-8") as handle:
                json.dump([1, 2], handle)
            with self.assertRaises(InvalidConfigError):
                load_config(path)

    def test_load_config_missing_file(self):
        with self.assertRaises(InvalidConfigError):
            load_config(data_path("no-such-config.json"))


class TestPrepareExcitation(unittest.TestCase):
    def test_complex_rapidities(self):
        Y = prepare_excitation(
            {"holes": [0.1, [0.2, -0.3]], "strings": {"1": [1.5]}, "umklapp": [1, 0]}
        )
        self.assertEqual(Y.holes, (0.1 + 0j, 0.2 - 0.3j))
        self.assertEqual(Y.particles, (1.5 + 0j,))
        self.assertEqual(Y.umklapp, (1, 0))
        self.assertEqual(Y.ell(-1), 0)

    def test_operator_spin_override(self):
        Y = prepare_excitation({}, operator_spin=1)
        self.assertEqual(Y.operator_spin, 1)

    def test_unbalanced(self):
        with self.assertRaisesRegex(InvalidConfigError, "holes"):
            prepare_excitation({"holes": [0.1, 0.2]})


class TestPrepareRestrictedSum(unittest.TestCase):
    def test_cutoffs_default_to_cut(self):
        cfg = prepare_restricted_sum({"nu": 0.3, "ell": 1, "L": 50, "x": 50, "cut": 12})
        self.assertEqual((cfg.p_cut, cfg.h_cut), (12, 12))
        self.assertAlmostEqual(cfg.phase, 1.0, 15)

    def test_separate_cutoffs(self):
        cfg = prepare_restricted_sum(
            {"nu": 0.3, "ell": 0, "L": 50.0, "x": 5.0, "cut": 12, "p_cut": 4}
        )
        self.assertEqual((cfg.p_cut, cfg.h_cut), (4, 12))

    def test_invalid(self):
        for bad in (
            {"nu": 0.3, "ell": 0, "L": 0.0, "x": 1.0, "cut": 4},
            {"nu": 0.3, "ell": 0.5, "L": 10.0, "x": 1.0, "cut": 4},
            {"nu": 0.3, "ell": 0, "L": 10.0, "x": 1.0, "cut": 0},
            {"ell": 0, "L": 10.0, "x": 1.0, "cut": 4},
        ):
            with self.assertRaises(InvalidConfigError, msg=str(bad)):
                prepare_restricted_sum(bad)
