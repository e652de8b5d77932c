# tests/test_serialization.py

import json
import os
import tempfile
import unittest

from app.errors import TestSpaceError, TestSumViolated
from app.extensions import get_extension, space_of
from app.groups import hom_extend, symmetric_group
from app.models import ReportItem, VerificationReport
from app.render import render_hasse, render_report
from app.serialization import (canonical_json, construction_from_file, construction_to_file, read_construction,
                               read_space, read_state, space_to_file, vertex_table, vertices_csv, write_construction,
                               write_space)
from app.states import state_polytope
from app.symmetry import basic_construction
from app.testspace import build_classical, build_grid, build_logic, build_triangle, isomorphism


class TestFiles(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_canonical_json_is_sorted(self):
        self.assertEqual(canonical_json({"b": 1, "a": [2]}), '{\n  "a": [\n    2\n  ],\n  "b": 1\n}\n')

    def test_pair_labels_are_written_as_text(self):
        document = space_to_file(build_grid(["a", "b"]))
        self.assertIn("(a,b)", document.outcomes)
        self.assertIn([0, 1], document.tests)

    def test_written_space_reads_back(self):
        text = write_space(build_triangle(), self.path("tri.json"))
        space = read_space(self.path("tri.json"))
        self.assertEqual(space.name, "triangle")
        self.assertEqual(space.tests, build_triangle().tests)
        with open(self.path("tri.json"), encoding="utf-8") as f:
            self.assertEqual(f.read(), text)

    def test_state_files(self):
        write_space(build_triangle(), self.path("tri.json"))
        space = read_space(self.path("tri.json"))
        with open(self.path("s.json"), "w", encoding="utf-8") as f:
            json.dump({"space": "triangle", "weights": ["1/2", "1/2", "1/2"]}, f)
        self.assertEqual(read_state(self.path("s.json"), space).as_strings(), ["1/2", "1/2", "1/2"])
        with open(self.path("bad.json"), "w", encoding="utf-8") as f:
            json.dump({"space": "triangle", "weights": ["1", "0", "0"]}, f)
        with self.assertRaises(TestSumViolated):
            read_state(self.path("bad.json"), space)

    def test_state_for_another_space(self):
        with open(self.path("s.json"), "w", encoding="utf-8") as f:
            json.dump({"space": "grid2", "weights": ["1/2", "1/2", "1/2"]}, f)
        with self.assertRaises(TestSpaceError):
            read_state(self.path("s.json"), build_triangle())

    def test_vertex_outputs(self):
        polytope = state_polytope(build_classical(["x", "y"]))
        table = vertex_table(polytope)
        self.assertEqual(table.vertices, [["1", "0"], ["0", "1"]])
        self.assertEqual(table.affine_dim, 1)
        self.assertEqual(vertices_csv(polytope), "x,y\n1,0\n0,1\n")

    def test_construction_files_round_trip(self):
        s3 = symmetric_group(3)
        embed = hom_extend({g: g for g in s3.generators}, s3, s3, require_injective=True)
        classical = basic_construction(s3, embed, s3.stabilizer(lambda g, x: g.act(x), 0), ("a", "b", "c"))
        graph = space_of(get_extension("graph"), 2).construction
        for name, data in (("s3", classical), ("graph-2", graph)):
            document = construction_to_file(data, name=name)
            rebuilt = construction_from_file(document)
            self.assertEqual(construction_to_file(rebuilt, name=name), document)
            self.assertIsNotNone(isomorphism(rebuilt.space, data.space), name)

    def test_construction_file_on_disk(self):
        data = space_of(get_extension("graph"), 2).construction
        write_construction(data, self.path("graph.json"), name="graph-2")
        rebuilt = read_construction(self.path("graph.json"))
        self.assertEqual(rebuilt.space.size, 4)
        with open(self.path("graph.json")) as f:
            self.assertEqual(json.load(f)["group_spec"]["degree"], 4)

    def test_bad_construction_file(self):
        with open(self.path("bad.json"), "w") as f:
            json.dump({"labels": ["a", "b"], "group_spec": {"degree": 2, "generators": [[0, 0]]},
                       "subgroup_specs": {"h_images": [[1, 0]]}}, f)
        with self.assertRaises(TestSpaceError):
            read_construction(self.path("bad.json"))


class TestRender(unittest.TestCase):

    def test_hasse_marks_atoms(self):
        dot = render_hasse(build_logic(build_classical(["a", "b"])))
        self.assertIn('label="p{a}", style=bold', dot)
        self.assertIn('label="0"', dot)
        self.assertIn("style=dotted", dot)

    def test_report_lists_witnesses(self):
        items = [ReportItem(claim_id="grid:regular", reference="regular", status="refuted", witness={"size": 2},
                            expected="refuted", note="the transpose is fixed"),
                 ReportItem(claim_id="graph:regular", reference="regular", status="verified")]
        report = VerificationReport(suite="paper", items=items, tool_version="0.4.0", config_echo={"max_n": 2})
        text = render_report(report)
        self.assertTrue(text.startswith("# Verification report: paper"))
        self.assertIn("**1** verified, **1** refuted, **0** skipped; exit code 0.", text)
        self.assertIn("### grid:regular (refuted)", text)
        self.assertIn("the transpose is fixed", text)
        self.assertNotIn("### graph:regular", text)
        self.assertIn("- max_n: 2", text)


if __name__ == '__main__':
    unittest.main()
