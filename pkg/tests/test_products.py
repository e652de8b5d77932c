# tests/test_products.py

import unittest
from fractions import Fraction

from app.errors import MorphismMismatch, TestSumViolated
from app.products import (bipartite, cartesian_product, check_tensor_product_axioms, fr_product, is_non_signaling,
                          is_separable, non_signaling_polytope, pair_index, product_state)
from app.states import ProbWeight, state_polytope, validate_weight
from app.testspace import TestSpace, build_classical


def binary_pair() -> TestSpace:
    return TestSpace(name="B", outcomes=("a0", "a1", "b0", "b1"), tests=[[0, 1], [2, 3]])


class TestProductSpaces(unittest.TestCase):

    def setUp(self):
        self.b = binary_pair()

    def test_cartesian_tests_are_products(self):
        product = cartesian_product(self.b, self.b)
        self.assertEqual(product.size, 16)
        self.assertEqual(len(product.tests), 4)
        self.assertIn(("a0", "b1"), product.outcomes)
        self.assertEqual(product.outcomes[pair_index(0, 3, self.b)], ("a0", "b1"))

    def test_two_stage_tests(self):
        fr = fr_product(self.b, self.b)
        # 8 forward and 8 backward tests share the 4 product tests
        self.assertEqual(len(fr.tests), 12)
        product_tests = set(cartesian_product(self.b, self.b).test_masks)
        self.assertTrue(product_tests <= set(fr.test_masks))

    def test_classical_two_stage_product_is_classical(self):
        c2 = build_classical(["x", "y"])
        fr = fr_product(c2, c2)
        self.assertEqual(len(fr.tests), 1)
        self.assertEqual(len(state_polytope(fr).vertices), 4)


class TestBipartiteStates(unittest.TestCase):

    def setUp(self):
        self.b = binary_pair()
        self.vertices = state_polytope(self.b).vertices

    def signaling_weights(self):
        """Bob's a-test answer copies which test Alice ran."""
        weights = [0] * 16
        for x, y in [("a0", "a0"), ("a0", "b0"), ("b0", "a1"), ("b0", "b1")]:
            weights[pair_index(self.b.index(x), self.b.index(y), self.b)] = 1
        return weights

    def test_product_state_is_non_signaling_and_separable(self):
        state = product_state(self.vertices[0], self.vertices[-1], target=fr_product(self.b, self.b))
        self.assertTrue(is_non_signaling(state).holds)
        result = is_separable(state)
        self.assertTrue(result.separable)
        self.assertEqual(sum(c for _, _, c in result.decomposition), 1)

    def test_product_state_is_bilinear(self):
        first, second, beta = self.vertices[0], self.vertices[-1], self.vertices[1]
        t = Fraction(1, 3)

        def mix(x, y):
            return tuple(t * a + (1 - t) * b for a, b in zip(x, y))

        mixed = ProbWeight(space=self.b, weights=mix(first.weights, second.weights))
        self.assertEqual(product_state(mixed, beta).weights,
                         mix(product_state(first, beta).weights, product_state(second, beta).weights))
        self.assertEqual(product_state(beta, mixed).weights,
                         mix(product_state(beta, first).weights, product_state(beta, second).weights))

    def test_marginals_of_two_stage_states_are_states(self):
        fr = fr_product(self.b, self.b)
        for vertex in state_polytope(fr).vertices:
            state = bipartite(self.b, self.b, vertex.weights)
            for t in range(len(self.b.tests)):
                first = [state.first_marginal(i, t) for i in range(self.b.size)]
                second = [state.second_marginal(j, t) for j in range(self.b.size)]
                validate_weight(self.b, first)
                validate_weight(self.b, second)
                self.assertEqual(first, [state.first_marginal(i, 0) for i in range(self.b.size)])

    def test_signaling_state(self):
        weights = self.signaling_weights()
        # still a state of the cartesian product
        validate_weight(cartesian_product(self.b, self.b), weights)
        check = is_non_signaling(bipartite(self.b, self.b, weights))
        self.assertFalse(check.holds)
        self.assertEqual(check.witness.side, "second")
        self.assertEqual(check.witness.outcome, "a0")
        self.assertEqual(check.witness.values, ("1", "0"))

    def test_signaling_state_is_not_a_two_stage_state(self):
        with self.assertRaises(TestSumViolated):
            validate_weight(fr_product(self.b, self.b), self.signaling_weights())

    def test_wrong_length(self):
        with self.assertRaises(MorphismMismatch):
            bipartite(self.b, self.b, [0] * 15)

    def test_entangled_vertex_is_not_separable(self):
        polytope = non_signaling_polytope(self.b, self.b)
        self.assertEqual(len(polytope.vertices), 24)
        entangled = next(v for v in polytope.vertices if not v.is_dispersion_free())
        state = bipartite(self.b, self.b, entangled.weights)
        self.assertTrue(is_non_signaling(state).holds)
        result = is_separable(state)
        self.assertFalse(result.separable)
        # the functional separates the state from every product of vertices
        value = sum(c * w for c, w in zip(result.functional, state.weights)) + result.offset
        self.assertLess(value, 0)

    def test_two_stage_states_are_the_non_signaling_states(self):
        fr = fr_product(self.b, self.b)
        fr_vertices = sorted(v.weights for v in state_polytope(fr).vertices)
        ns_vertices = sorted(v.weights for v in non_signaling_polytope(self.b, self.b).vertices)
        self.assertEqual(fr_vertices, ns_vertices)


class TestTensorAxioms(unittest.TestCase):

    def setUp(self):
        self.b = binary_pair()

    def test_two_stage_product_passes(self):
        fr = fr_product(self.b, self.b)
        report = check_tensor_product_axioms(self.b, self.b, fr, list(range(fr.size)))
        self.assertTrue(report.passed)
        self.assertEqual(report.missing_product_tests, 0)

    def test_cartesian_product_admits_signaling(self):
        product = cartesian_product(self.b, self.b)
        report = check_tensor_product_axioms(self.b, self.b, product, list(range(product.size)))
        self.assertFalse(report.clauses[0].passed)
        self.assertTrue(report.clauses[1].passed)

    def test_embedding_must_be_injective(self):
        with self.assertRaises(MorphismMismatch):
            check_tensor_product_axioms(self.b, self.b, cartesian_product(self.b, self.b), [0] * 16)

    def test_classical_product_in_a_classical_container(self):
        c = build_classical(["a", "b", "c", "d"])
        c2 = build_classical(["x", "y"])
        report = check_tensor_product_axioms(c2, c2, c, [0, 1, 2, 3])
        self.assertTrue(report.passed)
        self.assertEqual(report.missing_product_tests, 0)


if __name__ == '__main__':
    unittest.main()
