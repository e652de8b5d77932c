# app/simplex.py
"""
Exact feasibility LP over the rationals.

Solves {x >= 0 : A x = b} with a phase-one tableau simplex in Fraction
arithmetic and Bland's pivot rule. An infeasible system comes back with a
Farkas certificate y: y.A >= 0 componentwise and y.b < 0.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from app.errors import DimensionMismatch
from app.logging_config import get_logger

logger = get_logger("simplex")

Vector = Tuple[Fraction, ...]


class FeasibilityResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    feasible: bool
    solution: Optional[Vector] = None
    certificate: Optional[Vector] = None


def _as_fractions(values: Sequence) -> List[Fraction]:
    return [v if isinstance(v, Fraction) else Fraction(v) for v in values]


def solve_feasibility(rows: Sequence[Sequence], rhs: Sequence) -> FeasibilityResult:
    m = len(rows)
    if len(rhs) != m:
        raise DimensionMismatch(f"{m} rows but {len(rhs)} right-hand sides")
    n = len(rows[0]) if m else 0
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("rows of unequal length")
    if m == 0:
        return FeasibilityResult(feasible=True, solution=tuple(Fraction(0) for _ in range(n)))

    # rows with negative rhs are negated; sign[i] remembers it for the certificate
    sign = []
    tableau: List[List[Fraction]] = []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        row, b = _as_fractions(row), Fraction(b)
        s = -1 if b < 0 else 1
        sign.append(s)
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        tableau.append([s * v for v in row] + artificial + [s * b])
    width = n + m
    basis = list(range(n, n + m))
    # reduced costs of the phase-one objective sum(artificials)
    cost = [Fraction(0)] * (width + 1)
    for j in range(width + 1):
        if n <= j < n + m:
            continue
        cost[j] = -sum(tableau[i][j] for i in range(m))

    pivots = 0
    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leaving = None
        best = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        # phase one is bounded below by zero, so some row always qualifies
        _pivot(tableau, cost, leaving, entering)
        basis[leaving] = entering
        pivots += 1

    logger.debug("phase one finished after %d pivots", pivots)
    if -cost[-1] > 0:
        # pi_i = 1 - reduced cost of artificial i; y = -pi in the original row signs
        certificate = tuple(-(1 - cost[n + i]) * sign[i] for i in range(m))
        return FeasibilityResult(feasible=False, certificate=certificate)
    solution = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            solution[var] = tableau[i][-1]
    return FeasibilityResult(feasible=True, solution=tuple(solution))


def _pivot(tableau: List[List[Fraction]], cost: List[Fraction], row: int, col: int) -> None:
    pivot_row = tableau[row]
    p = pivot_row[col]
    if p != 1:
        tableau[row] = pivot_row = [v / p for v in pivot_row]
    for i, other in enumerate(tableau):
        if i != row and other[col] != 0:
            f = other[col]
            tableau[i] = [v - f * w for v, w in zip(other, pivot_row)]
    f = cost[col]
    if f != 0:
        cost[:] = [v - f * w for v, w in zip(cost, pivot_row)]


class MembershipResult(BaseModel):
    """Convex coefficients when inside; otherwise (c, c0) with c.g + c0 >= 0 on generators and c.p + c0 < 0."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    inside: bool
    coefficients: Optional[Vector] = None
    functional: Optional[Vector] = None
    offset: Optional[Fraction] = None


def membership_lp(point: Sequence, generators: Sequence[Sequence]) -> MembershipResult:
    """Exact test of point in conv(generators)."""
    dim = len(point)
    if any(len(g) != dim for g in generators):
        raise DimensionMismatch(f"generators do not all have dimension {dim}")
    if not generators:
        return MembershipResult(inside=False, functional=tuple(Fraction(0) for _ in range(dim)),
                                offset=Fraction(-1))
    rows = [[Fraction(g[d]) for g in generators] for d in range(dim)]
    rows.append([Fraction(1)] * len(generators))
    rhs = [Fraction(v) for v in point] + [Fraction(1)]
    result = solve_feasibility(rows, rhs)
    if result.feasible:
        return MembershipResult(inside=True, coefficients=result.solution)
    y = result.certificate
    return MembershipResult(inside=False, functional=tuple(y[:dim]), offset=y[dim])
