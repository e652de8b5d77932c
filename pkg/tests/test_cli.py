# tests/test_cli.py

import json
import os
import tempfile
import unittest
from io import StringIO
from unittest.mock import patch

from app.cli import main
from app.config import Settings


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, document):
        with open(self.path(name), "w", encoding="utf-8") as f:
            json.dump(document, f)
        return self.path(name)

    def load(self, name):
        with open(self.path(name), "r", encoding="utf-8") as f:
            return json.load(f)

    def run_cli(self, *argv):
        """Exit code and captured stderr."""
        with patch('sys.stderr', new_callable=StringIO) as err, patch('sys.stdout', new_callable=StringIO):
            code = main(list(argv))
        return code, err.getvalue()


class TestBuildAndStates(CliTestCase):

    def test_build_grid(self):
        code, _ = self.run_cli("build", "grid", "--n", "2", "-o", self.path("grid.json"))
        self.assertEqual(code, 0)
        document = self.load("grid.json")
        self.assertEqual(document["outcomes"], ["(a,a)", "(a,b)", "(b,a)", "(b,b)"])
        self.assertEqual(len(document["tests"]), 4)

    def test_build_ext_space_with_labels(self):
        code, _ = self.run_cli("build", "ext-space", "--ext", "trivial", "--labels", "x,y,z", "--name", "T3",
                               "-o", self.path("t3.json"))
        self.assertEqual(code, 0)
        document = self.load("t3.json")
        self.assertEqual(document["name"], "T3")
        self.assertEqual(sorted(document["outcomes"]), ["x", "y", "z"])

    def test_construction_file_round_trip(self):
        code, _ = self.run_cli("build", "construction", "--ext", "graph", "--n", "2",
                               "--write-construction", self.path("g2.construction.json"), "-o", self.path("g2.json"))
        self.assertEqual(code, 0)
        self.assertEqual(self.load("g2.construction.json")["labels"], ["a", "b"])
        code, _ = self.run_cli("build", "construction", "--from-file", self.path("g2.construction.json"),
                               "-o", self.path("again.json"))
        self.assertEqual(code, 0)
        self.assertEqual(len(self.load("again.json")["outcomes"]), 4)
        self.assertEqual(len(self.load("again.json")["tests"]), len(self.load("g2.json")["tests"]))

    def test_bad_construction_file_is_a_usage_error(self):
        path = self.write("bad.json", {"labels": ["a"], "group_spec": {"degree": 0, "generators": []},
                                       "subgroup_specs": {"h_images": []}})
        code, err = self.run_cli("build", "construction", "--from-file", path)
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:"))

    def test_duplicate_labels_are_a_usage_error(self):
        code, err = self.run_cli("build", "classical", "--labels", "a,a")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:"))

    def test_triangle_vertices(self):
        self.run_cli("build", "triangle", "-o", self.path("tri.json"))
        code, _ = self.run_cli("states", self.path("tri.json"), "-o", self.path("v.json"))
        self.assertEqual(code, 0)
        table = self.load("v.json")
        self.assertEqual(table["vertices"], [["1/2", "1/2", "1/2"]])
        self.assertEqual(table["affine_dim"], 0)

    def test_dimensions_and_csv(self):
        self.run_cli("build", "grid", "--n", "3", "-o", self.path("g3.json"))
        self.run_cli("states", self.path("g3.json"), "--dim", "-o", self.path("dim.json"))
        self.assertEqual(self.load("dim.json")["affine_dim"], 4)
        self.assertEqual(self.load("dim.json")["span_dim"], 5)
        self.run_cli("states", self.path("g3.json"), "--csv", "-o", self.path("v.csv"))
        with open(self.path("v.csv"), encoding="utf-8") as f:
            rows = f.read().splitlines()
        self.assertEqual(len(rows), 7)

    def test_missing_file(self):
        code, err = self.run_cli("states", self.path("nowhere.json"))
        self.assertEqual(code, 2)
        self.assertIn("cannot read", err)

    def test_malformed_file(self):
        path = self.write("bad.json", {"name": "x", "outcomes": ["a"]})
        code, err = self.run_cli("states", path)
        self.assertEqual(code, 2)
        self.assertIn("not a test-space file", err)


class TestChecks(CliTestCase):

    def setUp(self):
        super().setUp()
        self.run_cli("build", "triangle", "-o", self.path("tri.json"))
        self.binary = self.write("b.json", {"name": "B", "outcomes": ["a0", "a1", "b0", "b1"],
                                            "tests": [[0, 1], [2, 3]]})

    def test_triangle_is_not_algebraic(self):
        code, _ = self.run_cli("check", self.path("tri.json"), "--algebraic", "-o", self.path("out.json"))
        self.assertEqual(code, 1)
        result = self.load("out.json")
        self.assertEqual(result["status"], "refuted")
        self.assertEqual(sorted(result["witness"]), ["A", "B", "C"])

    def test_logic_of_the_triangle_is_refused(self):
        code, err = self.run_cli("logic", self.path("tri.json"))
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:"))

    def test_hasse_diagram(self):
        self.run_cli("build", "classical", "--n", "2", "-o", self.path("c2.json"))
        code, _ = self.run_cli("logic", self.path("c2.json"), "--dot", "-o", self.path("c2.dot"))
        self.assertEqual(code, 0)
        with open(self.path("c2.dot"), encoding="utf-8") as f:
            dot = f.read()
        self.assertTrue(dot.startswith('digraph "classical2"'))
        self.assertEqual(dot.count(" -> "), 5)

    def test_signaling_state(self):
        weights = ["0"] * 16
        # pair (x, y) sits at 4 * index(x) + index(y)
        for i in (0, 2, 9, 11):
            weights[i] = "1"
        state = self.write("s.json", {"space": "", "weights": weights})
        code, _ = self.run_cli("check", self.binary, self.binary, "--nonsignaling", "--state", state,
                               "-o", self.path("out.json"))
        self.assertEqual(code, 1)
        self.assertEqual(self.load("out.json")["witness"]["side"], "second")

    def test_bipartite_checks_need_a_state(self):
        code, err = self.run_cli("check", self.binary, self.binary, "--separable")
        self.assertEqual(code, 2)
        self.assertIn("--state", err)

    def test_swap_is_a_morphism(self):
        self.run_cli("build", "classical", "--n", "2", "-o", self.path("c2.json"))
        swap = self.write("swap.json", {"images": {"a": ["b"], "b": ["a"]}})
        code, _ = self.run_cli("check", self.path("c2.json"), self.path("c2.json"), "--morphism", swap,
                               "-o", self.path("out.json"))
        self.assertEqual(code, 0)
        self.assertEqual(self.load("out.json")["status"], "verified")

    def test_two_stage_product(self):
        code, _ = self.run_cli("product", self.binary, self.binary, "--fr", "-o", self.path("fr.json"))
        self.assertEqual(code, 0)
        self.assertEqual(len(self.load("fr.json")["tests"]), 12)

    def test_product_needs_two_files(self):
        code, _ = self.run_cli("product", self.binary)
        self.assertEqual(code, 2)


class TestExtensionsAndSuites(CliTestCase):

    def test_grid_is_not_regular(self):
        code, _ = self.run_cli("ext", "grid", "--regular", "--max-n", "2", "-o", self.path("out.json"))
        self.assertEqual(code, 1)
        self.assertEqual(self.load("out.json")[0]["claim"], "regular")

    def test_ext_needs_a_check(self):
        code, _ = self.run_cli("ext", "graph")
        self.assertEqual(code, 2)

    def test_unknown_suite_is_rejected_by_the_parser(self):
        with patch('sys.stderr', new_callable=StringIO):
            with self.assertRaises(SystemExit) as ctx:
                main(["verify", "appendix"])
        self.assertEqual(ctx.exception.code, 2)

    def test_verify_products(self):
        code, _ = self.run_cli("verify", "products", "--max-n", "2", "--report", self.path("r.json"),
                               "--markdown", self.path("r.md"))
        self.assertEqual(code, 0)
        report = self.load("r.json")
        self.assertEqual(report["suite"], "products")
        self.assertTrue(all(item["status"] == "verified" for item in report["items"]))
        with open(self.path("r.md"), encoding="utf-8") as f:
            self.assertTrue(f.read().startswith("# Verification report: products"))

    def test_store_and_history(self):
        settings = Settings(database=self.path("store.db"))
        with patch('app.database.get_settings', return_value=settings):
            code, err = self.run_cli("verify", "products", "--max-n", "2", "--report", self.path("r.json"),
                                     "--store")
            self.assertEqual(code, 0)
            self.assertIn("stored run 1", err)
            self.run_cli("history", "-o", self.path("runs.json"))
            self.run_cli("history", "--run", "1", "-o", self.path("run.json"))
            missing, _ = self.run_cli("history", "--run", "7")
        runs = self.load("runs.json")
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0]["item_count"], 4)
        self.assertEqual(len(self.load("run.json")["items"]), 4)
        self.assertEqual(missing, 2)


if __name__ == '__main__':
    unittest.main()
