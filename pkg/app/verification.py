# app/verification.py
"""
Suite runner: every claim becomes a ReportItem with a status, a witness when
refuted, and its runtime. Items are ordered by claim id.
"""

import json
import os
import time
from itertools import permutations
from typing import Callable, Dict, List, Optional, Union

from pydantic import ValidationError

from app.config import TOOL_VERSION, get_settings
from app.errors import CapExceeded, NotAlgebraic, TestSpaceError
from app.extensions import (EXTENSIONS, base_point_check, check_extension_laws, check_regular_morphisms,
                            get_extension, induced_outcome_map, injections, is_reasonable, is_regular,
                            pathology_witnesses, space_of, verify_structure)
from app.logging_config import get_logger
from app.models import CheckResult, ReportItem, Status, VerificationReport
from app.products import (bipartite, check_tensor_product_axioms, fr_product, is_separable,
                          non_signaling_polytope)
from app.states import dispersion_free_states, state_polytope
from app.symmetry import strongify
from app.testspace import (TestSpace, build_classical, build_graph, build_grid, build_logic, build_triangle,
                           check_morphism, is_algebraic, isomorphism)

logger = get_logger("verification")

SUITES = ("paper", "extension-laws", "products")
EXPECTATIONS_PATH = os.path.join(os.path.dirname(__file__), "expectations.json")

Outcome = Union[CheckResult, List[CheckResult]]


class SuiteItem:
    def __init__(self, claim_id: str, reference: str, run: Callable[[], Outcome]):
        self.claim_id = claim_id
        self.reference = reference
        self.run = run


def load_expectations(path: Optional[str] = None) -> Dict[str, Dict[str, str]]:
    """claim_id -> {"status": ..., "note": ...}."""
    with open(path or EXPECTATIONS_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def _reference_map() -> Dict[str, str]:
    return {
        "functoriality": "G preserves identities and composites of injections",
        "injectivity": "G(f) is an injective homomorphism",
        "naturality": "G(f) j_A = j_B S(f)",
        "pullback": "the square j, G(f), S(f) is a pullback",
        "image-meet": "G(A) meets j_B(S(B)) exactly in j_B(S(A))",
        "point-fixing": "G(A) fixes every point of X(B) inside X(A u B)",
        "sum-tests": "tests of G(A) + G(B) are tests of G(A u B), and complements of A come from G(B)",
        "algebraic": "G(A), G(B) and G(A u B) are algebraic",
        "perspectivity-class": "the class of A in G(A u B) is G(A)",
        "inclusion-morphism": "X(f) of an inclusion is a test-space morphism",
        "product-tests": "E x F is a test of G(A x B)",
        "two-stage-tests": "two-stage tests of G(A)G(B) are tests of G(A x B)",
        "tensor-nonsignaling": "states of G(A x B) are non-signaling on X(A) x X(B)",
        "tensor-bifunctor": "(p1 x p2)(q1 x q2) = p1q1 x p2q2",
        "tensor-associator": "X(alpha) is a natural isomorphism",
        "tensor-symmetry": "X(swap) is a natural isomorphism",
        "xab-well-defined": "X^A_B(f) does not depend on the witnesses g, h",
        "xab-composition": "X(f2) X(f1) = X(f2 f1)",
        "xab-restricts-action": "X_A(g|A') acts as g",
        "grid-signaling": "grid product states can signal",
        "grid-block-subgrid": "row x column is a block sub-grid, not a test",
        "graph-row-column-sum": "row state x column state is not a state of the graph product",
    }


def _outcome_maps(ext_name: str, max_n: int) -> CheckResult:
    ext = get_extension(ext_name)
    reasonable = is_reasonable(ext, max(2, max_n)).holds
    counted = 0
    for m in range(1, max_n + 1):
        target = space_of(ext, m)
        for n in range(1, m + 1):
            source = space_of(ext, n)
            for f in injections(n, m):
                induced = induced_outcome_map(ext, f, source, target)
                counted += 1
                if reasonable and f == tuple(sorted(f)):
                    check = check_morphism(induced.as_morphism())
                    if not check.ok:
                        return CheckResult(claim="outcome-maps", holds=False,
                                           witness={"f": list(f), "condition": check.condition})
    return CheckResult(claim="outcome-maps", holds=True, details={"maps": counted, "morphisms_checked": reasonable})


def _recovery(ext_name: str, max_n: int) -> CheckResult:
    builders = {"trivial": build_classical, "grid": build_grid, "graph": build_graph}
    for n in range(2, max_n + 1):
        built = space_of(get_extension(ext_name), n).space
        reference = builders[ext_name]([chr(ord("a") + i) for i in range(n)])
        if isomorphism(built, reference) is None:
            return CheckResult(claim="construction-recovery", holds=False, witness={"size": n})
    return CheckResult(claim="construction-recovery", holds=True, details={"sizes": list(range(2, max_n + 1))})


def _full_symmetry(ext_name: str, max_n: int) -> CheckResult:
    for n in range(1, min(max_n, 3) + 1):
        check = space_of(get_extension(ext_name), n).construction.full_symmetry()
        if not check.holds:
            return CheckResult(claim="full-symmetry", holds=False, witness=dict(check.witness or {}, size=n))
    return CheckResult(claim="full-symmetry", holds=True)


def _base_points(ext_name: str, max_n: int) -> CheckResult:
    for n in range(2, max_n + 1):
        result = base_point_check(get_extension(ext_name), space_of(get_extension(ext_name), n).labels)
        if not result.holds:
            return result
    return CheckResult(claim="base-point-independence", holds=True)


def _strongify(ext_name: str, size: int) -> CheckResult:
    data = space_of(get_extension(ext_name), size).construction
    result, check = strongify(data)
    return CheckResult(claim="strongify", holds=check.holds, witness=check.witness,
                       details={"group_order": result.group.order, "outcomes": result.space.size,
                                "tests": len(result.space.tests),
                                "same_space": isomorphism(result.space, data.space) is not None})


def _xab(ext_name: str, max_n: int) -> List[CheckResult]:
    ext = get_extension(ext_name)
    merged: Dict[str, CheckResult] = {}
    for n in range(2, min(max_n, 3) + 1):
        for result in check_regular_morphisms(ext, n):
            if result.claim not in merged or (merged[result.claim].holds and not result.holds):
                merged[result.claim] = result
    return list(merged.values())


def extension_items(ext_name: str, max_n: int, laws_size: Optional[int] = None) -> List[SuiteItem]:
    ext = get_extension(ext_name)
    prefix = f"{ext_name}:"
    return [
        SuiteItem(prefix + "laws", "extension laws", lambda: check_extension_laws(ext, laws_size or max_n)),
        SuiteItem(prefix + "regular", "stabilizers of the base test act by conjugation",
                  lambda: is_regular(ext, max_n)),
        SuiteItem(prefix + "reasonable", "groups of disjoint sets commute in the group of the union",
                  lambda: is_reasonable(ext, max(2, min(max_n + 1, 4)))),
    ]


def paper_items(ext_name: str, max_n: int) -> List[SuiteItem]:
    """Every claim about one extension, plus the extension-free claims about states, logic and pathologies."""
    prefix = f"{ext_name}:"
    items = extension_items(ext_name, max_n)
    items += [
        SuiteItem(prefix + "construction-recovery", "G(A) is the expected test space",
                  lambda: _recovery(ext_name, max_n)),
        SuiteItem(prefix + "full-symmetry", "G(A) is fully G(A)-symmetric",
                  lambda: _full_symmetry(ext_name, max_n)),
        SuiteItem(prefix + "base-point-independence", "G(A) does not depend on the base point",
                  lambda: _base_points(ext_name, max_n)),
        SuiteItem(prefix + "outcome-maps", "X(f) is well defined", lambda: _outcome_maps(ext_name, max_n)),
        SuiteItem(prefix + "strongify", "quotienting by the fixer of E gives a strongly symmetric space",
                  lambda: _strongify(ext_name, min(max_n, 3))),
        SuiteItem(prefix + "xab", "induced morphisms of a regular extension", lambda: _xab(ext_name, max_n)),
    ]
    right = 3 if ext_name == "trivial" and max_n >= 3 else 2
    items.append(SuiteItem(prefix + "structure", "structure of a reasonable extension",
                           lambda: verify_structure(get_extension(ext_name), 2, right)))
    if ext_name == "graph" and max_n >= 4:
        items.append(SuiteItem(prefix + "structure-2x3", "structure of a reasonable extension",
                               lambda: verify_structure(get_extension(ext_name), 2, 3, include_monoidal=False)))
    if ext_name in ("grid", "graph"):
        items.append(SuiteItem(prefix + "pathology", "pathologies of the product",
                               lambda: pathology_witnesses(ext=ext_name)))
    items += state_items(max_n)
    return items


def _triangle_unique() -> CheckResult:
    polytope = state_polytope(build_triangle())
    values = [v.as_strings() for v in polytope.vertices]
    return CheckResult(claim="triangle-unique-state", holds=values == [["1/2", "1/2", "1/2"]],
                       witness={"vertices": values})


def _birkhoff(max_n: int) -> CheckResult:
    for n in range(2, max_n + 1):
        space = build_grid([chr(ord("a") + i) for i in range(n)])
        polytope = state_polytope(space)
        vertices = sorted(tuple(v.weights) for v in polytope.vertices)
        oracle = sorted(tuple(v.weights) for v in dispersion_free_states(space))
        birkhoff_count = len(list(permutations(range(n))))
        if vertices != oracle or polytope.affine_dim != (n - 1) ** 2 or len(vertices) != birkhoff_count:
            return CheckResult(claim="birkhoff", holds=False,
                               witness={"size": n, "vertices": len(vertices), "affine_dim": polytope.affine_dim})
    return CheckResult(claim="birkhoff", holds=True, details={"sizes": list(range(2, max_n + 1))})


def _graph_states(max_n: int) -> CheckResult:
    for n in range(2, min(max_n, 3) + 1):
        space = build_graph([chr(ord("a") + i) for i in range(n)])
        polytope = state_polytope(space)
        if len(polytope.vertices) != 2 * n or not all(v.is_dispersion_free() for v in polytope.vertices):
            return CheckResult(claim="graph-row-column-states", holds=False,
                               witness={"size": n, "vertices": [v.as_strings() for v in polytope.vertices]})
    return CheckResult(claim="graph-row-column-states", holds=True)


def _logic() -> CheckResult:
    for n in range(1, 5):
        logic = build_logic(build_classical([chr(ord("a") + i) for i in range(n)]))
        if len(logic) != 2 ** n or not logic.is_boolean():
            return CheckResult(claim="logic", holds=False, witness={"classical": n, "elements": len(logic)})
    logic = build_logic(build_graph(["a", "b"]))
    if len(logic) != 6 or len(logic.atoms()) != 4 or logic.check_axioms():
        return CheckResult(claim="logic", holds=False, witness={"graph": 2, "elements": len(logic)})
    triangle = is_algebraic(build_triangle())
    if triangle.algebraic:
        return CheckResult(claim="logic", holds=False, witness={"triangle": "algebraic"})
    try:
        build_logic(build_triangle())
    except NotAlgebraic as exc:
        return CheckResult(claim="logic", holds=True, details={"triangle_witness": exc.witness})
    return CheckResult(claim="logic", holds=False, witness={"triangle": "logic built"})


def state_items(max_n: int) -> List[SuiteItem]:
    return [
        SuiteItem("states:triangle-unique-state", "the triangle has only one state", _triangle_unique),
        SuiteItem("states:birkhoff", "grid states are doubly stochastic matrices", lambda: _birkhoff(max_n)),
        SuiteItem("states:graph-row-column-states", "graph states mix row and column states",
                  lambda: _graph_states(max_n)),
        SuiteItem("logic:classical-graph-triangle", "logics of the classical, graph and triangle spaces", _logic),
    ]


def binary_pair() -> TestSpace:
    """Two binary tests on disjoint outcomes."""
    return TestSpace(name="B", outcomes=("a0", "a1", "b0", "b1"), tests=[[0, 1], [2, 3]])


def _fr_equals_ns(first: TestSpace, second: TestSpace, claim: str, expect_vertices: Optional[int]) -> CheckResult:
    fr = fr_product(first, second)
    fr_vertices = sorted(tuple(v.weights) for v in state_polytope(fr).vertices)
    ns_vertices = sorted(tuple(v.weights) for v in non_signaling_polytope(first, second).vertices)
    dispersion_free = sum(1 for v in fr_vertices if all(w in (0, 1) for w in v))
    details = {"fr_tests": len(fr.tests), "vertices": len(fr_vertices), "dispersion_free": dispersion_free,
               "entangled": len(fr_vertices) - dispersion_free}
    if fr_vertices != ns_vertices:
        return CheckResult(claim=claim, holds=False, witness={"fr": len(fr_vertices), "ns": len(ns_vertices)},
                           details=details)
    if expect_vertices is not None and len(fr_vertices) != expect_vertices:
        return CheckResult(claim=claim, holds=False, witness={"vertices": len(fr_vertices)}, details=details)
    return CheckResult(claim=claim, holds=True, details=details)


def _entangled_not_separable() -> CheckResult:
    b = binary_pair()
    pa, pb = state_polytope(b), state_polytope(b)
    checked = 0
    for vertex in non_signaling_polytope(b, b).vertices:
        if vertex.is_dispersion_free():
            continue
        checked += 1
        result = is_separable(bipartite(b, b, vertex.weights), pa, pb)
        if result.separable:
            return CheckResult(claim="entangled-not-separable", holds=False, witness={"vertex": vertex.as_strings()})
    return CheckResult(claim="entangled-not-separable", holds=True, details={"entangled": checked})


def _fr_tensor_axioms() -> CheckResult:
    b = binary_pair()
    fr = fr_product(b, b)
    report = check_tensor_product_axioms(b, b, fr, list(range(fr.size)))
    return CheckResult(claim="fr-tensor-axioms", holds=report.passed and report.missing_product_tests == 0,
                       witness=None if report.passed else [c.model_dump() for c in report.clauses if not c.passed],
                       details={"missing_product_tests": report.missing_product_tests})


def product_items(max_n: int) -> List[SuiteItem]:
    c2 = build_classical(["x", "y"])
    items = [
        SuiteItem("products:fr-equals-ns:classical", "states of the two-stage product are the non-signaling states",
                  lambda: _fr_equals_ns(c2, c2, "fr-equals-ns", None)),
        SuiteItem("products:fr-equals-ns:binary-pair", "states of the two-stage product are the non-signaling states",
                  lambda: _fr_equals_ns(binary_pair(), binary_pair(), "fr-equals-ns", 24)),
        SuiteItem("products:entangled-not-separable", "entangled non-signaling states are not separable",
                  _entangled_not_separable),
        SuiteItem("products:fr-tensor-axioms", "the two-stage product is a tensor product", _fr_tensor_axioms),
    ]
    if max_n >= 3:
        c3 = build_classical(["x", "y", "z"])
        items.append(SuiteItem("products:fr-equals-ns:classical3",
                               "states of the two-stage product are the non-signaling states",
                               lambda: _fr_equals_ns(c3, c2, "fr-equals-ns", None)))
    return items


def suite_items(suite: str, ext: str = "graph", max_n: int = 3) -> List[SuiteItem]:
    if suite == "paper":
        return paper_items(ext, max_n)
    if suite == "extension-laws":
        return [item for name in sorted(EXTENSIONS) for item in extension_items(name, min(max_n, 4), max_n)]
    if suite == "products":
        return product_items(max_n)
    raise TestSpaceError(f"unknown suite '{suite}'; choose from {', '.join(SUITES)}")


def _status(result: CheckResult) -> Status:
    if "skipped" in result.details:
        return "skipped"
    return "verified" if result.holds else "refuted"


def _to_items(item: SuiteItem, outcome: Outcome, elapsed_ms: float,
              expectations: Dict[str, Dict[str, str]]) -> List[ReportItem]:
    results = outcome if isinstance(outcome, list) else [outcome]
    refs = _reference_map()
    out = []
    for result in results:
        claim_id = item.claim_id if not isinstance(outcome, list) else f"{item.claim_id}:{result.claim}"
        status = _status(result)
        witness = result.witness
        if status == "refuted" and witness is None:
            witness = {"details": result.details}
        if status == "skipped":
            witness = witness or {"reason": result.details["skipped"]}
        expected = expectations.get(claim_id, {})
        runtime = result.details.get("runtime_ms", elapsed_ms / len(results))
        out.append(ReportItem(claim_id=claim_id, reference=refs.get(result.claim, item.reference), status=status,
                              witness=witness, runtime_ms=round(runtime, 3), expected=expected.get("status"),
                              note=expected.get("note", "")))
    return out


def run_items(items: List[SuiteItem], expectations: Dict[str, Dict[str, str]]) -> List[ReportItem]:
    report: List[ReportItem] = []
    for item in items:
        started = time.perf_counter()
        try:
            outcome = item.run()
        except CapExceeded as exc:
            outcome = CheckResult(claim=item.claim_id, holds=False, details={"skipped": str(exc)},
                                  witness={"error": "CapExceeded", "reason": str(exc)})
        except TestSpaceError as exc:
            outcome = CheckResult(claim=item.claim_id, holds=False,
                                  witness={"error": type(exc).__name__, "message": str(exc)})
        except ValidationError as exc:
            # library errors raised inside model validators arrive wrapped
            outcome = CheckResult(claim=item.claim_id, holds=False,
                                  witness={"error": "ValidationError", "message": exc.errors()[0]["msg"]})
        elapsed = (time.perf_counter() - started) * 1000
        produced = _to_items(item, outcome, elapsed, expectations)
        logger.info("%s: %s in %.1f ms", item.claim_id, [p.status for p in produced], elapsed)
        report.extend(produced)
    return sorted(report, key=lambda r: r.claim_id)


def run_suite(suite: str, ext: str = "graph", max_n: int = 3,
              expectations: Optional[Dict[str, Dict[str, str]]] = None) -> VerificationReport:
    if max_n < 1:
        raise TestSpaceError("--max-n must be at least 1")
    if suite == "paper" and ext not in EXTENSIONS:
        raise TestSpaceError(f"unknown extension '{ext}'")
    expectations = expectations if expectations is not None else load_expectations()
    items = run_items(suite_items(suite, ext, max_n), expectations)
    echo = dict(get_settings().model_dump(), suite=suite, ext=ext, max_n=max_n)
    report = VerificationReport(suite=suite, items=items, tool_version=TOOL_VERSION, config_echo=echo)
    logger.info("suite %s: %s", suite, report.counts())
    return report
