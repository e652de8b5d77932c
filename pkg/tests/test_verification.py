# tests/test_verification.py

import unittest
from unittest.mock import patch

from app.config import Settings
from app.errors import CapExceeded, NotRegular, TestSpaceError
from app.models import CheckResult, ReportItem, VerificationReport
from app.testspace import TestSpace
from app.verification import SuiteItem, load_expectations, run_items, run_suite, suite_items


def holds(claim="c"):
    return CheckResult(claim=claim, holds=True)


class TestRunItems(unittest.TestCase):

    def test_statuses(self):
        def capped():
            raise CapExceeded("G(9)", 100)

        def broken():
            raise NotRegular("grid is not regular")

        items = [
            SuiteItem("b:ok", "fine", holds),
            SuiteItem("a:capped", "too big", capped),
            SuiteItem("c:broken", "raises", broken),
            SuiteItem("d:false", "fails", lambda: CheckResult(claim="d", holds=False, details={"n": 2})),
        ]
        report = {r.claim_id: r for r in run_items(items, {})}
        self.assertEqual(list(report), ["a:capped", "b:ok", "c:broken", "d:false"])
        self.assertEqual(report["b:ok"].status, "verified")
        self.assertEqual(report["a:capped"].status, "skipped")
        self.assertIn("G(9)", report["a:capped"].witness["reason"])
        self.assertEqual(report["a:capped"].witness["error"], "CapExceeded")
        self.assertEqual(report["c:broken"].status, "refuted")
        self.assertEqual(report["c:broken"].witness["error"], "NotRegular")
        # a refutation always carries something to look at
        self.assertEqual(report["d:false"].witness, {"details": {"n": 2}})

    def test_validation_errors_become_refutations(self):
        # duplicate outcome labels are rejected inside the model validator
        item = SuiteItem("e:invalid", "bad space", lambda: TestSpace(outcomes=("a", "a"), tests=[[0, 1]]))
        report = run_items([item], {})
        self.assertEqual(report[0].status, "refuted")
        self.assertEqual(report[0].witness["error"], "ValidationError")

    def test_cap_skip_sets_exit_code_two(self):
        def capped():
            raise CapExceeded("G(9)", 100)

        items = run_items([SuiteItem("a:capped", "too big", capped), SuiteItem("b:ok", "fine", holds)], {})
        report = VerificationReport(suite="paper", items=items, tool_version="test", config_echo={})
        self.assertTrue(items[0].cap_breach)
        self.assertEqual(report.exit_code, 2)
        # an expected skip is not a breach
        items = run_items([SuiteItem("a:capped", "too big", capped)], {"a:capped": {"status": "skipped"}})
        self.assertEqual(VerificationReport(suite="paper", items=items, tool_version="test",
                                            config_echo={}).exit_code, 0)

    def test_unexpected_refutation_sets_exit_code_one(self):
        items = [ReportItem(claim_id="a", reference="", status="refuted", witness={"n": 1}),
                 ReportItem(claim_id="b", reference="", status="skipped", witness={"reason": "NotReasonable"})]
        self.assertEqual(VerificationReport(suite="paper", items=items, tool_version="test",
                                            config_echo={}).exit_code, 1)

    def test_list_outcomes_get_sub_ids(self):
        item = SuiteItem("graph:laws", "laws", lambda: [holds("functoriality"), holds("pullback")])
        report = run_items([item], {})
        self.assertEqual([r.claim_id for r in report], ["graph:laws:functoriality", "graph:laws:pullback"])
        self.assertEqual(report[1].reference, "the square j, G(f), S(f) is a pullback")

    def test_expectations_are_attached(self):
        item = SuiteItem("grid:regular", "regular", lambda: CheckResult(claim="regular", holds=False,
                                                                          witness={"size": 2}))
        expected = {"grid:regular": {"status": "refuted", "note": "transpose"}}
        report = run_items([item], expected)
        self.assertEqual(report[0].expected, "refuted")
        self.assertEqual(report[0].note, "transpose")
        self.assertFalse(report[0].unexpected)
        self.assertTrue(run_items([item], {})[0].unexpected)


class TestSuites(unittest.TestCase):

    def test_unknown_suite(self):
        with self.assertRaises(TestSpaceError):
            suite_items("appendix")

    def test_bad_arguments(self):
        with self.assertRaises(TestSpaceError):
            run_suite("paper", max_n=0, expectations={})
        with self.assertRaises(TestSpaceError):
            run_suite("paper", ext="hexagon", expectations={})

    def test_paper_suite_items(self):
        ids = [item.claim_id for item in suite_items("paper", "grid", 2)]
        self.assertIn("grid:regular", ids)
        self.assertIn("grid:pathology", ids)
        self.assertIn("states:birkhoff", ids)
        self.assertNotIn("trivial:pathology", [item.claim_id for item in suite_items("paper", "trivial", 2)])

    def test_extension_law_suite_covers_every_extension(self):
        prefixes = {item.claim_id.split(":")[0] for item in suite_items("extension-laws", max_n=2)}
        self.assertEqual(prefixes, {"graph", "grid", "trivial"})

    def test_bundled_expectations(self):
        expectations = load_expectations()
        self.assertEqual(expectations["grid:regular"]["status"], "refuted")

    def test_products_suite(self):
        report = run_suite("products", max_n=2, expectations={})
        self.assertEqual(report.exit_code, 0)
        self.assertEqual(report.counts(), {"verified": 4, "refuted": 0, "skipped": 0})
        self.assertEqual(report.config_echo["suite"], "products")
        self.assertEqual(report.config_echo["max_n"], 2)

    def test_grid_paper_suite(self):
        report = run_suite("paper", ext="grid", max_n=2, expectations=load_expectations())
        statuses = {item.claim_id: item.status for item in report.items}
        self.assertEqual(report.exit_code, 0)
        self.assertEqual(statuses["grid:outcome-maps"], "verified")
        self.assertEqual(statuses["grid:regular"], "refuted")
        structure = [s for claim_id, s in statuses.items() if claim_id.startswith("grid:structure:")]
        self.assertTrue(structure)
        self.assertEqual(set(structure), {"skipped"})

    def test_graph_paper_suite(self):
        report = run_suite("paper", ext="graph", max_n=2, expectations=load_expectations())
        self.assertEqual(report.exit_code, 0)
        self.assertEqual([i.claim_id for i in report.items if i.status == "refuted"], [])

    def test_trivial_paper_suite(self):
        report = run_suite("paper", ext="trivial", max_n=2, expectations=load_expectations())
        self.assertEqual(report.exit_code, 0)
        self.assertEqual([i.claim_id for i in report.items if i.status == "refuted"], [])

    @patch('app.verification.get_settings')
    def test_config_is_echoed(self, mock_settings):
        mock_settings.return_value = Settings(max_group=123)
        report = run_suite("products", max_n=2, expectations={})
        self.assertEqual(report.config_echo["max_group"], 123)


if __name__ == '__main__':
    unittest.main()
