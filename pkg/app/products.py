# app/products.py
"""
Products of test spaces and bipartite states.

Outcomes of every product are the pairs (x, y) in X x Y, indexed
i * |Y| + j for x = outcomes[i], y = outcomes[j].
"""

from fractions import Fraction
from itertools import product as cartesian
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from app.config import get_settings
from app.errors import CapExceeded, MorphismMismatch
from app.labels import label_text
from app.logging_config import get_logger
from app.polytope import affine_dimension, enumerate_vertices
from app.simplex import membership_lp, solve_feasibility
from app.states import ProbWeight, StatePolytope, rational_text, state_polytope, test_sums, validate_weight
from app.testspace import TestSpace

logger = get_logger("products")


def pair_index(i: int, j: int, second: TestSpace) -> int:
    return i * second.size + j


def _pair_outcomes(first: TestSpace, second: TestSpace) -> Tuple[Tuple[Any, Any], ...]:
    return tuple((x, y) for x in first.outcomes for y in second.outcomes)


def cartesian_product(first: TestSpace, second: TestSpace, name: str = "") -> TestSpace:
    count = len(first.tests) * len(second.tests)
    cap = get_settings().max_events
    if count > cap:
        raise CapExceeded(f"{count} product tests", cap)
    tests = [[pair_index(i, j, second) for i in e for j in f] for e in first.tests for f in second.tests]
    return TestSpace(name=name or f"{first.name}x{second.name}", outcomes=_pair_outcomes(first, second), tests=tests)


def _two_stage(outer: TestSpace, inner: TestSpace, index, cap: int) -> List[List[int]]:
    total = sum(len(inner.tests) ** len(e) for e in outer.tests)
    if total > cap:
        logger.warning("two-stage tests: %d assignments over the cap", total)
        raise CapExceeded(f"{total} two-stage test assignments", cap)
    tests = []
    for e in outer.tests:
        for choice in cartesian(inner.tests, repeat=len(e)):
            tests.append([index(i, j) for i, f in zip(e, choice) for j in f])
    return tests


def forward_tests(first: TestSpace, second: TestSpace, cap: Optional[int] = None) -> List[List[int]]:
    """Perform E, then F_x on securing x."""
    cap = cap if cap is not None else get_settings().max_assignments
    return _two_stage(first, second, lambda i, j: pair_index(i, j, second), cap)


def backward_tests(first: TestSpace, second: TestSpace, cap: Optional[int] = None) -> List[List[int]]:
    cap = cap if cap is not None else get_settings().max_assignments
    return _two_stage(second, first, lambda j, i: pair_index(i, j, second), cap)


def fr_product(first: TestSpace, second: TestSpace, name: str = "", cap: Optional[int] = None) -> TestSpace:
    """The Foulis-Randall product: all forward and backward two-stage tests."""
    tests = forward_tests(first, second, cap) + backward_tests(first, second, cap)
    return TestSpace(name=name or f"{first.name}{second.name}", outcomes=_pair_outcomes(first, second), tests=tests)


class BipartiteState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    factor_a: TestSpace
    factor_b: TestSpace
    weights: Tuple[Fraction, ...]

    def value(self, i: int, j: int) -> Fraction:
        return self.weights[pair_index(i, j, self.factor_b)]

    def first_marginal(self, i: int, test_b: int) -> Fraction:
        """omega_1(x | F) = sum over y in F of omega(x, y)."""
        return sum((self.value(i, j) for j in self.factor_b.tests[test_b]), Fraction(0))

    def second_marginal(self, j: int, test_a: int) -> Fraction:
        return sum((self.value(i, j) for i in self.factor_a.tests[test_a]), Fraction(0))


def bipartite(first: TestSpace, second: TestSpace, weights: Sequence) -> BipartiteState:
    if len(weights) != first.size * second.size:
        raise MorphismMismatch(f"{len(weights)} weights for {first.size * second.size} outcome pairs")
    return BipartiteState(factor_a=first, factor_b=second, weights=tuple(Fraction(w) for w in weights))


def product_state(alpha: ProbWeight, beta: ProbWeight, target: Optional[TestSpace] = None) -> BipartiteState:
    """(alpha x beta)(x, y) = alpha(x) beta(y); checked against target's tests when one is given."""
    weights = tuple(a * b for a in alpha.weights for b in beta.weights)
    if target is not None:
        validate_weight(target, weights)
    return BipartiteState(factor_a=alpha.space, factor_b=beta.space, weights=weights)


class SignalingWitness(BaseModel):
    side: str
    outcome: Any
    tests: Tuple[Tuple[Any, ...], Tuple[Any, ...]]
    values: Tuple[str, str]


class NonSignalingCheck(BaseModel):
    holds: bool
    witness: Optional[SignalingWitness] = None


def is_non_signaling(state: BipartiteState) -> NonSignalingCheck:
    a, b = state.factor_a, state.factor_b
    for i, x in enumerate(a.outcomes):
        values = [state.first_marginal(i, t) for t in range(len(b.tests))]
        for t in range(1, len(values)):
            if values[t] != values[0]:
                return NonSignalingCheck(holds=False, witness=SignalingWitness(
                    side="first", outcome=x, tests=(b.test_labels()[0], b.test_labels()[t]),
                    values=(rational_text(values[0]), rational_text(values[t]))))
    for j, y in enumerate(b.outcomes):
        values = [state.second_marginal(j, t) for t in range(len(a.tests))]
        for t in range(1, len(values)):
            if values[t] != values[0]:
                return NonSignalingCheck(holds=False, witness=SignalingWitness(
                    side="second", outcome=y, tests=(a.test_labels()[0], a.test_labels()[t]),
                    values=(rational_text(values[0]), rational_text(values[t]))))
    return NonSignalingCheck(holds=True)


def non_signaling_system(first: TestSpace, second: TestSpace) -> Tuple[List[List[int]], List[int]]:
    """Product-test sums plus marginal equalities between consecutive tests."""
    n = first.size * second.size
    rows, rhs = [], []
    for e in first.tests:
        for f in second.tests:
            row = [0] * n
            for i in e:
                for j in f:
                    row[pair_index(i, j, second)] = 1
            rows.append(row)
            rhs.append(1)
    for i in range(first.size):
        for f, g in zip(second.tests, second.tests[1:]):
            row = [0] * n
            for j in f:
                row[pair_index(i, j, second)] += 1
            for j in g:
                row[pair_index(i, j, second)] -= 1
            rows.append(row)
            rhs.append(0)
    for j in range(second.size):
        for e, h in zip(first.tests, first.tests[1:]):
            row = [0] * n
            for i in e:
                row[pair_index(i, j, second)] += 1
            for i in h:
                row[pair_index(i, j, second)] -= 1
            rows.append(row)
            rhs.append(0)
    return rows, rhs


def non_signaling_polytope(first: TestSpace, second: TestSpace) -> StatePolytope:
    space = cartesian_product(first, second)
    rows, rhs = non_signaling_system(first, second)
    vectors = enumerate_vertices(rows, rhs, space.size)
    logger.info("non-signaling polytope %s: %d vertices", space.name, len(vectors))
    return StatePolytope(space=space, equalities=tuple(tuple(r) for r in rows),
                         vertices=tuple(ProbWeight(space=space, weights=v) for v in vectors),
                         affine_dim=affine_dimension(vectors))


class SeparabilityResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    separable: bool
    # (vertex of A, vertex of B, coefficient) triples
    decomposition: Optional[List[Tuple[int, int, Fraction]]] = None
    functional: Optional[Tuple[Fraction, ...]] = None
    offset: Optional[Fraction] = None


def is_separable(state: BipartiteState, polytope_a: Optional[StatePolytope] = None,
                 polytope_b: Optional[StatePolytope] = None) -> SeparabilityResult:
    """Membership of omega in the hull of the products of factor vertices."""
    polytope_a = polytope_a or state_polytope(state.factor_a)
    polytope_b = polytope_b or state_polytope(state.factor_b)
    pairs = [(p, q) for p in range(len(polytope_a.vertices)) for q in range(len(polytope_b.vertices))]
    generators = [tuple(a * b for a in polytope_a.vertices[p].weights for b in polytope_b.vertices[q].weights)
                  for p, q in pairs]
    result = membership_lp(state.weights, generators)
    if result.inside:
        decomposition = [(p, q, c) for (p, q), c in zip(pairs, result.coefficients) if c != 0]
        return SeparabilityResult(separable=True, decomposition=decomposition)
    return SeparabilityResult(separable=False, functional=result.functional, offset=result.offset)


class ClauseResult(BaseModel):
    clause: str
    passed: bool
    witness: Optional[Dict[str, Any]] = None


class TensorAxiomReport(BaseModel):
    container: str
    clauses: List[ClauseResult]
    # product tests E x F whose image is not a test of the container
    missing_product_tests: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)


def restriction(first: TestSpace, second: TestSpace, embedding: Sequence[int], weights: Sequence[Fraction]
                ) -> BipartiteState:
    return BipartiteState(factor_a=first, factor_b=second, weights=tuple(weights[k] for k in embedding))


def extends_to_state(container: TestSpace, fixed: Dict[int, Fraction]) -> bool:
    """Is there a state of the container taking the given values on the given outcomes?"""
    n = container.size
    rows, rhs = [], []
    for test in container.tests:
        row = [0] * n
        for k in test:
            row[k] = 1
        rows.append(row)
        rhs.append(1)
    for k, v in sorted(fixed.items()):
        row = [0] * n
        row[k] = 1
        rows.append(row)
        rhs.append(v)
    return solve_feasibility(rows, rhs).feasible


def check_tensor_product_axioms(first: TestSpace, second: TestSpace, container: TestSpace,
                                embedding: Sequence[int], container_polytope: Optional[StatePolytope] = None
                                ) -> TensorAxiomReport:
    """
    embedding[pair_index(i, j)] is the container outcome of (x_i, y_j).
    Clause (i): restrictions of container states are non-signaling.
    Clause (ii): every product of factor vertices extends to a container state.
    """
    if len(embedding) != first.size * second.size or len(set(embedding)) != len(embedding):
        raise MorphismMismatch("the embedding of X x Y must be injective and total")
    container_tests = set(container.test_masks)
    missing = 0
    for e in first.tests:
        for f in second.tests:
            mask = 0
            for i in e:
                for j in f:
                    mask |= 1 << embedding[pair_index(i, j, second)]
            if mask not in container_tests:
                missing += 1

    container_polytope = container_polytope or state_polytope(container)
    clause_one = ClauseResult(clause="i", passed=True)
    for k, vertex in enumerate(container_polytope.vertices):
        check = is_non_signaling(restriction(first, second, embedding, vertex.weights))
        if not check.holds:
            clause_one = ClauseResult(clause="i", passed=False,
                                      witness={"vertex": vertex.as_strings(), "signaling": check.witness.model_dump()})
            break

    clause_two = ClauseResult(clause="ii", passed=True)
    vertices_a = state_polytope(first).vertices
    vertices_b = state_polytope(second).vertices
    for alpha in vertices_a:
        for beta in vertices_b:
            fixed = {embedding[pair_index(i, j, second)]: a * b
                     for i, a in enumerate(alpha.weights) for j, b in enumerate(beta.weights)}
            if not extends_to_state(container, fixed):
                witness = {"alpha": alpha.as_strings(), "beta": beta.as_strings()}
                if len(fixed) == container.size:
                    values = [fixed[k] for k in range(container.size)]
                    bad = next(t for t, s in zip(container.tests, test_sums(container, values)) if s != 1)
                    witness["test"] = [label_text(container.outcomes[k]) for k in bad]
                    witness["sum"] = rational_text(sum((values[k] for k in bad), Fraction(0)))
                clause_two = ClauseResult(clause="ii", passed=False, witness=witness)
                break
        if not clause_two.passed:
            break
    return TensorAxiomReport(container=container.name, clauses=[clause_one, clause_two], missing_product_tests=missing)
