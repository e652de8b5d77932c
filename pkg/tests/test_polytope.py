# tests/test_polytope.py

import unittest
from fractions import Fraction

from app.errors import CapExceeded, DimensionMismatch
from app.polytope import affine_dimension, affine_solution, enumerate_vertices, rank
from app.simplex import membership_lp, solve_feasibility


class TestVertexEnumeration(unittest.TestCase):

    def test_standard_simplex(self):
        vertices = enumerate_vertices([[1, 1, 1]], [1], 3)
        self.assertEqual(vertices, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        self.assertEqual(affine_dimension(vertices), 2)

    def test_two_by_two_doubly_stochastic(self):
        rows = [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]]
        vertices = enumerate_vertices(rows, [1, 1, 1, 1], 4)
        self.assertEqual(vertices, [(1, 0, 0, 1), (0, 1, 1, 0)])

    def test_single_point(self):
        rows = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
        half = Fraction(1, 2)
        self.assertEqual(enumerate_vertices(rows, [1, 1, 1], 3), [(half, half, half)])

    def test_infeasible_system_has_no_vertices(self):
        self.assertEqual(enumerate_vertices([[1, 1], [1, 1]], [1, 2], 2), [])
        self.assertEqual(enumerate_vertices([[1, 1]], [-1], 2), [])

    def test_cap_and_shape_checks(self):
        with self.assertRaises(CapExceeded):
            enumerate_vertices([[1, 1]], [1], 2, cap=1)
        with self.assertRaises(DimensionMismatch):
            enumerate_vertices([[1, 1, 1]], [1], 2)

    def test_affine_helpers(self):
        self.assertEqual(rank([[1, 2], [2, 4]]), 1)
        self.assertEqual(affine_dimension([]), -1)
        self.assertEqual(affine_dimension([(Fraction(1),)]), 0)
        self.assertIsNone(affine_solution([[1, 1], [1, 1]], [0, 1]))


class TestSimplex(unittest.TestCase):

    def test_feasible_solution_satisfies_the_system(self):
        rows = [[1, 2, 0], [0, 1, 1]]
        rhs = [3, 2]
        result = solve_feasibility(rows, rhs)
        self.assertTrue(result.feasible)
        x = result.solution
        self.assertTrue(all(v >= 0 for v in x))
        for row, b in zip(rows, rhs):
            self.assertEqual(sum(a * v for a, v in zip(row, x)), b)

    def test_farkas_certificate(self):
        rows = [[1, 1], [1, 1]]
        rhs = [1, 2]
        result = solve_feasibility(rows, rhs)
        self.assertFalse(result.feasible)
        y = result.certificate
        for j in range(2):
            self.assertGreaterEqual(sum(y[i] * rows[i][j] for i in range(2)), 0)
        self.assertLess(sum(y[i] * rhs[i] for i in range(2)), 0)

    def test_negative_right_hand_side(self):
        result = solve_feasibility([[1, -1]], [-2])
        self.assertTrue(result.feasible)
        x, y = result.solution
        self.assertEqual(x - y, -2)

    def test_membership_inside(self):
        half = Fraction(1, 2)
        result = membership_lp((half, half), [(1, 0), (0, 1)])
        self.assertTrue(result.inside)
        self.assertEqual(sum(result.coefficients), 1)

    def test_membership_separating_functional(self):
        generators = [(1, 0), (0, 1)]
        point = (1, 1)
        result = membership_lp(point, generators)
        self.assertFalse(result.inside)
        c, c0 = result.functional, result.offset
        for g in generators:
            self.assertGreaterEqual(sum(a * b for a, b in zip(c, g)) + c0, 0)
        self.assertLess(sum(a * b for a, b in zip(c, point)) + c0, 0)

    def test_membership_dimension_check(self):
        with self.assertRaises(DimensionMismatch):
            membership_lp((1, 0), [(1, 0, 0)])


if __name__ == '__main__':
    unittest.main()
