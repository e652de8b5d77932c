# app/states.py

from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict

from app.config import get_settings
from app.errors import CapExceeded, EmptyPolytope, RangeViolated, TestSpaceError, TestSumViolated
from app.labels import label_text
from app.logging_config import get_logger
from app.polytope import affine_dimension, enumerate_vertices, rank
from app.simplex import MembershipResult, membership_lp
from app.testspace import TestSpace, bits

logger = get_logger("states")

Weights = Tuple[Fraction, ...]


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    if isinstance(value, Fraction):
        return value
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise TestSpaceError(f"not an exact rational: {value!r}") from exc


def rational_text(value: Fraction) -> str:
    """Reduced "p/q", or the integer alone when q == 1."""
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class ProbWeight(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: TestSpace
    weights: Weights

    def __getitem__(self, label: Any) -> Fraction:
        return self.weights[self.space.index(label)]

    def probability(self, event: int) -> Fraction:
        """omega(A) = sum of omega(x) over x in A (A as an outcome bitmask)."""
        return sum((self.weights[i] for i in bits(event)), Fraction(0))

    def as_strings(self) -> List[str]:
        return [rational_text(w) for w in self.weights]

    def is_dispersion_free(self) -> bool:
        return all(w in (0, 1) for w in self.weights)


def probability(weight: ProbWeight, event: int) -> Fraction:
    return weight.probability(event)


def test_sums(space: TestSpace, weights: Sequence[Fraction]) -> List[Fraction]:
    return [sum((weights[i] for i in test), Fraction(0)) for test in space.tests]


def validate_weight(space: TestSpace, weights: Union[Sequence, Dict[Any, Any]]) -> ProbWeight:
    """Range and test-sum checks, in exact arithmetic."""
    if isinstance(weights, dict):
        missing = [x for x in space.outcomes if x not in weights]
        if missing:
            raise TestSpaceError(f"no weight given for outcome {label_text(missing[0])}")
        values = [parse_rational(weights[x]) for x in space.outcomes]
    else:
        if len(weights) != space.size:
            raise TestSpaceError(f"{len(weights)} weights for {space.size} outcomes")
        values = [parse_rational(w) for w in weights]
    for i, w in enumerate(values):
        if w < 0 or w > 1:
            raise RangeViolated(f"weight {rational_text(w)} of {label_text(space.outcomes[i])} is outside [0,1]",
                                witness=space.outcomes[i])
    for test, total in zip(space.tests, test_sums(space, values)):
        if total != 1:
            labels = tuple(space.outcomes[i] for i in test)
            raise TestSumViolated(f"test {{{','.join(label_text(x) for x in labels)}}} sums to {rational_text(total)}",
                                  witness=labels)
    return ProbWeight(space=space, weights=tuple(values))


def is_state(space: TestSpace, weights: Sequence[Fraction]) -> bool:
    return all(0 <= w <= 1 for w in weights) and all(t == 1 for t in test_sums(space, weights))


def equality_system(space: TestSpace) -> Tuple[List[List[int]], List[int]]:
    """One 0/1 row per test with right-hand side 1."""
    rows = []
    for test in space.tests:
        row = [0] * space.size
        for i in test:
            row[i] = 1
        rows.append(row)
    return rows, [1] * len(rows)


class StatePolytope(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: TestSpace
    equalities: Tuple[Tuple[int, ...], ...]
    vertices: Tuple[ProbWeight, ...]
    affine_dim: int

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def vertex_vectors(self) -> List[Weights]:
        return [v.weights for v in self.vertices]

    def contains(self, weights: Sequence[Fraction]) -> MembershipResult:
        return membership_lp(weights, self.vertex_vectors())


def state_polytope(space: TestSpace, cap: Optional[int] = None) -> StatePolytope:
    rows, rhs = equality_system(space)
    vectors = enumerate_vertices(rows, rhs, space.size, cap=cap)
    vertices = tuple(ProbWeight(space=space, weights=v) for v in vectors)
    dim = affine_dimension(vectors)
    logger.info("%s: %d vertices, affine dimension %d", space.name, len(vertices), dim)
    return StatePolytope(space=space, equalities=tuple(tuple(r) for r in rows), vertices=vertices, affine_dim=dim)


def dispersion_free_states(space: TestSpace, cap: Optional[int] = None) -> List[ProbWeight]:
    """All 0/1 states, by backtracking over outcomes in index order."""
    settings = get_settings()
    limit = cap if cap is not None else settings.max_vertex_dim
    if space.size > limit:
        raise CapExceeded(f"dispersion-free search over {space.size} outcomes", limit)
    containing = [[] for _ in range(space.size)]
    for t, test in enumerate(space.tests):
        for i in test:
            containing[i].append(t)
    last = [max(test) for test in space.tests]
    ones = [0] * len(space.tests)
    values = [0] * space.size
    found: List[Weights] = []

    def assign(i: int) -> None:
        if len(found) > settings.max_assignments:
            raise CapExceeded("dispersion-free states", settings.max_assignments)
        if i == space.size:
            found.append(tuple(Fraction(v) for v in values))
            return
        for v in (1, 0):
            if v == 1 and any(ones[t] for t in containing[i]):
                continue
            if v == 0 and any(last[t] == i and ones[t] == 0 for t in containing[i]):
                continue
            values[i] = v
            for t in containing[i]:
                ones[t] += v
            assign(i + 1)
            for t in containing[i]:
                ones[t] -= v
        values[i] = 0

    assign(0)
    return [ProbWeight(space=space, weights=w) for w in sorted(found, reverse=True)]


class LinearSpan(BaseModel):
    """V = span of the states, with effects f_x and the order unit u in basis coordinates."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: TestSpace
    basis: Tuple[ProbWeight, ...]
    order_unit: Tuple[Fraction, ...]
    effects: Tuple[Tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def check_order_unit(self) -> List[Tuple[int, ...]]:
        """Tests E for which sum of f_x over E differs from u; empty when the identity holds."""
        failing = []
        for test in self.space.tests:
            total = [sum((self.effects[i][k] for i in test), Fraction(0)) for k in range(self.dimension)]
            if tuple(total) != self.order_unit:
                failing.append(test)
        return failing


def span_dimension(space: TestSpace, polytope: Optional[StatePolytope] = None) -> LinearSpan:
    polytope = polytope or state_polytope(space)
    if polytope.is_empty:
        raise EmptyPolytope(f"{space.name} has no states, so its span is trivial")
    basis: List[ProbWeight] = []
    for v in polytope.vertices:
        if rank([b.weights for b in basis] + [v.weights]) > len(basis):
            basis.append(v)
    effects = tuple(tuple(b.weights[i] for b in basis) for i in range(space.size))
    return LinearSpan(space=space, basis=tuple(basis), order_unit=tuple(Fraction(1) for _ in basis), effects=effects)


class OutcomeWitness(BaseModel):
    holds: bool
    witness: Optional[Tuple[Any, ...]] = None


def is_sharp(space: TestSpace, polytope: Optional[StatePolytope] = None) -> OutcomeWitness:
    """Each outcome needs exactly one state giving it probability 1."""
    polytope = polytope or state_polytope(space)
    for i, x in enumerate(space.outcomes):
        attaining = [v for v in polytope.vertices if v.weights[i] == 1]
        if len(attaining) != 1:
            return OutcomeWitness(holds=False, witness=(x,))
    return OutcomeWitness(holds=True)


def separates_outcomes(space: TestSpace, polytope: Optional[StatePolytope] = None) -> OutcomeWitness:
    polytope = polytope or state_polytope(space)
    for i in range(space.size):
        for j in range(i + 1, space.size):
            if all(v.weights[i] == v.weights[j] for v in polytope.vertices):
                return OutcomeWitness(holds=False, witness=(space.outcomes[i], space.outcomes[j]))
    return OutcomeWitness(holds=True)


def extremality_failures(polytope: StatePolytope) -> List[int]:
    """Indices of vertices lying in the hull of the others (should be none)."""
    vectors = polytope.vertex_vectors()
    failing = []
    for k, v in enumerate(vectors):
        if membership_lp(v, vectors[:k] + vectors[k + 1:]).inside:
            failing.append(k)
    return failing
