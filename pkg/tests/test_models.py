import math
import unittest

from xxzff.models import (
    DiscreteZ,
    ExcitationY,
    FermiData,
    ModelParams,
    MomentumK,
    NConfig,
    RestrictedSumConfig,
    StringSpec,
)


class TestModels(unittest.TestCase):
    def test_model_params(self):
        params = ModelParams({"J": 1.0, "zeta": math.pi / 2.0, "h": 2.0})
        self.assertAlmostEqual(params.h_c, 4.0, 13)
        self.assertTrue(params.is_free_fermion)
        self.assertFalse(ModelParams({"J": 1.0, "zeta": 1.0, "h": 2.0}).is_free_fermion)

    def test_light_cone(self):
        fermi = FermiData({"q": 0.6, "p_F": 1.2, "v_F": 2.0})
        self.assertEqual(fermi.light_cone(1, 5, 1.0), 3.0)
        self.assertEqual(fermi.light_cone(-1, 5, 1.0), -7.0)

    def test_excitation(self):
        Y = ExcitationY(
            {
                "holes": [0.1, [0.2, 0.5]],
                "strings": {"2": [[0.3, 1.0]], "1": [], "3": None},
                "umklapp": [2, -1],
                "operator_spin": -1,
            }
        )
        self.assertEqual(Y.n_holes, 2)
        self.assertEqual(Y.strings, ((2, (0.3 + 1.0j,)),))
        self.assertEqual(Y.particles, ())
        self.assertEqual(Y.rapidities(2), (0.3 + 1.0j,))
        self.assertEqual((Y.ell(1), Y.ell(-1)), (2, -1))
        self.assertEqual(Y.operator_spin, -1)

    def test_excitation_empty(self):
        Y = ExcitationY({})
        self.assertEqual(Y.holes, ())
        self.assertEqual(Y.strings, ())
        self.assertEqual(Y.umklapp, (0, 0))
        self.assertEqual(Y.operator_spin, 0)

    def test_n_config(self):
        tests = [
            {"input": {"n_holes": 1, "umklapp": [1, 0]}, "balanced": True},
            {
                "input": {"n_holes": 2, "n_strings": {1: 1}, "umklapp": [0, 1]},
                "balanced": True,
            },
            {
                "input": {"n_holes": 3, "n_strings": {2: 1}, "umklapp": [0, 0]},
                "balanced": False,
            },
            {"input": {"n_holes": 0, "umklapp": [1, -1]}, "balanced": True},
        ]
        for test in tests:
            config = NConfig(test["input"])
            self.assertEqual(config.is_balanced, test["balanced"], msg=str(test))
        config = NConfig({"n_holes": 2, "n_strings": {2: 1, 1: 0}, "umklapp": [0, 0]})
        self.assertEqual(config.n_strings, ((2, 1),))
        self.assertEqual(config.count(2), 1)
        self.assertEqual(config.count(1), 0)
        self.assertEqual(
            config.to_dict(),
            {"n_holes": 2, "n_strings": {"2": 1}, "umklapp": [0, 0]},
        )

    def test_discrete_z(self):
        Z = DiscreteZ({"particles": [0, 3], "holes": [1]})
        self.assertEqual(Z.ell, 1)
        self.assertEqual(Z.total, 0 + 3 + 2)

    def test_restricted_sum_config(self):
        cfg = RestrictedSumConfig(
            {"nu": 0.3, "ell": 1, "L": 50.0, "x": 25.0, "p_cut": 10, "h_cut": 8}
        )
        self.assertAlmostEqual(cfg.phase, 0.5, 15)
        self.assertEqual(cfg._replace(p_cut=11).p_cut, 11)

    def test_momentum_k(self):
        K = MomentumK({"holes": [0.1], "strings": {1: [2.0], 2: []}, "umklapp": [0, 0]})
        self.assertEqual(K.holes, (0.1,))
        self.assertEqual(K.strings, ((1, (2.0,)),))
        self.assertEqual(K.operator_spin, 0)

    def test_string_spec_defaults(self):
        spec = StringSpec({"r": 3})
        self.assertFalse(spec.exists)
        self.assertEqual(spec.status, "forbidden")
        self.assertEqual(spec.s_r, 0)
        self.assertIsNone(spec.kappa_r)
        self.assertEqual(spec.uncovered, ())

    def test_keyword_construction(self):
        fermi = FermiData(q=1.0, p_F=0.5, v_F=3.0)
        self.assertEqual(fermi.v_F, 3.0)
        with self.assertRaises(ValueError):
            FermiData({"q": 1.0}, v_F=3.0)
