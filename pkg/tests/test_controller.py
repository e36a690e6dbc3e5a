import tempfile
import unittest
from pathlib import Path

from numpy.testing import assert_allclose

from shiftlab.controllers.scenario_controller import ScenarioController
from shiftlab.main import main
from shiftlab.models.reports import Verdict
from shiftlab.models.scenario_config import ScenarioConfig
from shiftlab.services.plot_data import emit_plot_data
from shiftlab.services.storage import Storage, to_jsonable
from shiftlab.utils.config import merge_blocks
from shiftlab.utils.scenarios import UNIT_WEIGHTS, scenario_defaults


def run_scenario(name, **overrides):
    config = ScenarioConfig.from_dict(merge_blocks(scenario_defaults(name), overrides))
    return ScenarioController().run(config)


class TestScenarioController(unittest.TestCase):
    def test_example3(self):
        result = run_scenario("example3")
        self.assertEqual(result.exit_code, 0)
        sections = result.report["sections"]
        self.assertEqual(set(sections), {"criterion", "invariance_n1", "mhc", "lemma5"})
        self.assertEqual(sections["invariance_n1"]["verdict"], "violated")
        for row in sections["criterion"]["per_k"]:
            assert_allclose(row["inverse_tail_product"], 3.0 ** (-2 * row["k"]), rtol=1e-12)
            assert_allclose(row["inverse_product"], 6.0 * 3.0 ** (-2 * row["k"]), rtol=1e-12)

    def test_unit_weights_are_violated(self):
        result = run_scenario("criterion", operator={"weights": UNIT_WEIGHTS})
        self.assertIs(result.verdict, Verdict.VIOLATED)
        self.assertEqual(result.exit_code, 2)

    def test_example1(self):
        result = run_scenario("example1")
        self.assertEqual(result.exit_code, 0)
        sections = result.report["sections"]
        self.assertEqual(sections["coverage"]["report"]["score"], 1.0)
        self.assertTrue(sections["plan"]["x_in_subspace"])
        self.assertTrue(sections["orbit"]["inclusion"]["holds"])
        self.assertTrue(sections["orbit"]["nonzero_points_in_subspace_are_even"])
        self.assertTrue(sections["orbit"]["odd_powers_project_to_zero"])

    def test_saved_plan_replays(self):
        saved = to_jsonable(run_scenario("example1").report["sections"]["plan"])
        replay = run_scenario("coverage", constructor={"plan": saved})
        self.assertEqual(replay.exit_code, 0)
        self.assertEqual(replay.report["sections"]["plan"]["powers"], saved["powers"])
        self.assertEqual(replay.report["sections"]["coverage"]["report"]["score"], 1.0)

    def test_negative_lambda(self):
        result = run_scenario("coverage", constructor={"lambda": -2, "targets": 4})
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.report["sections"]["plan"]["lambda"], -2.0)

    def test_adjoint_pair(self):
        result = run_scenario("adjoint-pair")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.report["sections"]["adjoint_criterion"]["details"]["direction"], "backward")

    def test_witness(self):
        result = run_scenario("witness")
        self.assertEqual(result.exit_code, 0)
        rows = result.report["sections"]["witness"]["rows"]
        self.assertEqual(len(rows), 41)
        self.assertTrue(all(row["holds"] for row in rows))

    def test_compression_and_quotient(self):
        self.assertEqual(run_scenario("compression", compression={"samples": 5, "N": 10}).exit_code, 0)
        self.assertEqual(run_scenario("quotient").exit_code, 0)

    def test_reports_are_deterministic(self):
        controller = ScenarioController()
        config = ScenarioConfig.from_dict(scenario_defaults("example1"))
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            controller.write_outputs(controller.run(config), Path(first))
            controller.write_outputs(controller.run(config), Path(second))
            self.assertEqual((Path(first) / "report.json").read_bytes(), (Path(second) / "report.json").read_bytes())


class TestOutputs(unittest.TestCase):
    def test_plot_data_files(self):
        result = run_scenario("example3")
        with tempfile.TemporaryDirectory() as out:
            files = emit_plot_data(result.report, Storage(out))
            self.assertIn("product_vs_k_forward.csv", files)
            self.assertIn("product_vs_k_inverse.csv", files)
            self.assertIn("mhc_product_vs_k_forward.csv", files)
            table = Storage(out).load_table("product_vs_k_forward.csv")
            self.assertEqual(len(table), 20)
            self.assertEqual(Storage(out).list_tables(), sorted(files))
            inverse = Storage(out).load_table("product_vs_k_inverse.csv")
            assert_allclose(inverse["tail_product"], 3.0 ** (-2.0 * inverse["k"]), rtol=1e-12)

    def test_storage_round_trip(self):
        with tempfile.TemporaryDirectory() as out:
            storage = Storage(Path(out) / "nested")
            storage.save_report("r.json", {"z": 1 + 2j, "inf": float("inf"), "verdict": Verdict.SATISFIED})
            self.assertEqual(storage.load_report("r.json"), {"z": [1.0, 2.0], "inf": "inf", "verdict": "satisfied"})
            self.assertIsNone(storage.load_report("missing.json"))
            self.assertEqual(storage.list_reports(), ["r.json"])


class TestCommandLine(unittest.TestCase):
    def test_eigen_scan_writes_tables(self):
        with tempfile.TemporaryDirectory() as out:
            code = main(["run", "eigen-scan", "--grid", "annulus(0.1, 16, 24 points)", "--p", "2",
                         "--out", out, "--quiet"])
            self.assertEqual(code, 0)
            storage = Storage(out)
            self.assertEqual(len(storage.load_table("norm_vs_halfwidth.csv")), 96)
            self.assertEqual(len(storage.load_table("eigen_scan.csv")), 24)
            self.assertIn("note", storage.load_report("report.json")["sections"]["eigen_scan"])

    def test_flags_override_the_config_file(self):
        with tempfile.TemporaryDirectory() as out:
            scenario = Path(out) / "short.yaml"
            scenario.write_text("schedule:\n  k_max: 3\n")
            self.assertEqual(main(["run", "criterion", "--config", str(scenario), "--out", out, "--quiet"]), 3)
            self.assertEqual(main(["run", "criterion", "--config", str(scenario), "--kmax", "20",
                                   "--out", out, "--quiet"]), 0)

    def test_bad_config_is_an_error(self):
        with tempfile.TemporaryDirectory() as out:
            scenario = Path(out) / "broken.yaml"
            scenario.write_text("schedule: [1, 2\n")
            self.assertEqual(main(["run", "criterion", "--config", str(scenario), "--out", out, "--quiet"]), 1)
            scenario.write_text("schedule:\n  a: 0\n")
            self.assertEqual(main(["run", "criterion", "--config", str(scenario), "--out", out, "--quiet"]), 1)


if __name__ == '__main__':
    unittest.main()
