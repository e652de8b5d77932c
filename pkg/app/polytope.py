# app/polytope.py
"""
Vertex enumeration of {x >= 0 : A x = b} by the double description method.

The affine solution set is parametrized as x = x0 + N t (sympy supplies
x0 and the nullspace N exactly). The constraints x >= 0 together with
t0 >= 0 cut out a pointed cone in (t0, t) whose extreme rays with t0 > 0
are the vertices. Rays are integer vectors reduced by their gcd; zero sets
are bitmasks over the constraints processed so far.
"""

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

import sympy

from app.config import get_settings
from app.errors import CapExceeded, DimensionMismatch
from app.logging_config import get_logger

logger = get_logger("polytope")

Vertex = Tuple[Fraction, ...]


def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _integer_row(values: Sequence[Fraction]) -> Tuple[int, ...]:
    scale = 1
    for v in values:
        scale = scale * v.denominator // gcd(scale, v.denominator)
    row = [int(v * scale) for v in values]
    return _reduce(row)


def _reduce(row: Sequence[int]) -> Tuple[int, ...]:
    g = 0
    for v in row:
        g = gcd(g, v)
    if g > 1:
        return tuple(v // g for v in row)
    return tuple(row)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(v) for v in r] for r in rows]).rank()


def affine_solution(rows: Sequence[Sequence], rhs: Sequence) -> Optional[Tuple[Vertex, List[Vertex]]]:
    """A particular solution and a nullspace basis of A x = b, or None when inconsistent."""
    A = sympy.Matrix([[sympy.Rational(v) for v in r] for r in rows])
    b = sympy.Matrix([sympy.Rational(v) for v in rhs])
    try:
        solution, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    x0 = solution.xreplace({p: 0 for p in params})
    particular = tuple(_to_fraction(v) for v in x0)
    basis = [tuple(_to_fraction(v) for v in col) for col in A.nullspace()]
    return particular, basis


def enumerate_vertices(rows: Sequence[Sequence], rhs: Sequence, dimension: int,
                       cap: Optional[int] = None) -> List[Vertex]:
    """Sorted vertices of {x in Q^dimension : x >= 0, rows . x = rhs}."""
    cap = cap if cap is not None else get_settings().max_vertex_dim
    if dimension > cap:
        logger.warning("vertex enumeration over %d coordinates refused", dimension)
        raise CapExceeded(f"vertex enumeration in dimension {dimension}", cap)
    if any(len(r) != dimension for r in rows):
        raise DimensionMismatch(f"equality rows must have {dimension} entries")
    if not rows:
        rows, rhs = [[0] * dimension], [0]
    solved = affine_solution(rows, rhs)
    if solved is None:
        return []
    x0, basis = solved
    d = len(basis)
    if d == 0:
        return [x0] if all(v >= 0 for v in x0) else []

    # constraint 0 is t0 >= 0; constraint i+1 is x_i >= 0
    constraints = [tuple([1] + [0] * d)]
    for i in range(dimension):
        constraints.append(_integer_row([x0[i]] + [col[i] for col in basis]))
    rays = _double_description(constraints, d + 1)
    vertices = set()
    for ray in rays:
        if ray[0] <= 0:
            continue
        t = [Fraction(v, ray[0]) for v in ray[1:]]
        vertices.add(tuple(x0[i] + sum(col[i] * tk for col, tk in zip(basis, t)) for i in range(dimension)))
    logger.info("enumerated %d vertices in dimension %d", len(vertices), dimension)
    return sorted(vertices, reverse=True)


def _initial_rows(constraints: Sequence[Tuple[int, ...]], dim: int) -> List[int]:
    """Indices of dim linearly independent constraints, lowest first."""
    M = sympy.Matrix(constraints).T
    _, pivots = M.rref()
    if len(pivots) < dim:
        raise DimensionMismatch("the homogenized cone is not pointed")
    return list(pivots[:dim])


def _double_description(constraints: Sequence[Tuple[int, ...]], dim: int) -> List[Tuple[int, ...]]:
    start = _initial_rows(constraints, dim)
    inverse = sympy.Matrix([constraints[i] for i in start]).inv()
    rays: List[Tuple[int, ...]] = []
    zeros: List[int] = []
    for j in range(dim):
        column = [_to_fraction(inverse[r, j]) for r in range(dim)]
        rays.append(_integer_row(column))
        zeros.append(sum(1 << start[k] for k in range(dim) if k != j))
    done = set(start)
    for c in range(len(constraints)):
        if c in done:
            continue
        row = constraints[c]
        bit = 1 << c
        values = [_dot(row, r) for r in rays]
        positive = [k for k, v in enumerate(values) if v > 0]
        negative = [k for k, v in enumerate(values) if v < 0]
        new_rays = [rays[k] for k, v in enumerate(values) if v >= 0]
        new_zeros = [zeros[k] | (bit if values[k] == 0 else 0) for k, v in enumerate(values) if v >= 0]
        for p in positive:
            for q in negative:
                common = zeros[p] & zeros[q]
                if bin(common).count("1") < dim - 2:
                    continue
                if any(k != p and k != q and zeros[k] & common == common for k in range(len(rays))):
                    continue
                vp, vq = values[p], -values[q]
                combined = _reduce([vp * a + vq * b for a, b in zip(rays[q], rays[p])])
                new_rays.append(combined)
                new_zeros.append(common | bit)
        rays, zeros = new_rays, new_zeros
        done.add(c)
    return rays


def affine_dimension(points: Sequence[Vertex]) -> int:
    """-1 for the empty set."""
    if not points:
        return -1
    origin = points[0]
    return rank([[a - b for a, b in zip(p, origin)] for p in points[1:]]) if len(points) > 1 else 0
