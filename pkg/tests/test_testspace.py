# tests/test_testspace.py

import unittest

from app.errors import NotAlgebraic
from app.testspace import (TestSpace, bits, build_classical, build_graph, build_grid, build_logic, build_triangle,
                           check_morphism, class_as_test_space, compose_morphisms, direct_sum, event_relation,
                           events_of, identity_morphism, is_algebraic, isomorphism, mask_of, perspectivity_class,
                           point_morphism)


class TestConstruction(unittest.TestCase):

    def test_tests_are_normalized(self):
        space = TestSpace(outcomes=("x", "y", "z"), tests=[[2, 1, 1], [0, 1]])
        self.assertEqual(space.tests, ((0, 1), (1, 2)))

    def test_duplicate_labels_rejected(self):
        with self.assertRaises(ValueError):
            TestSpace(outcomes=("x", "x"), tests=[[0, 1]])

    def test_uncovered_outcome_rejected(self):
        with self.assertRaises(ValueError):
            TestSpace(outcomes=("x", "y", "z"), tests=[[0, 1]])

    def test_empty_test_rejected(self):
        with self.assertRaises(ValueError):
            TestSpace(outcomes=("x",), tests=[[0], []])

    def test_grid_rows_and_columns(self):
        grid = build_grid(["a", "b"])
        self.assertEqual(grid.outcomes, (("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")))
        self.assertEqual(grid.tests, ((0, 1), (0, 2), (1, 3), (2, 3)))

    def test_graph_has_one_test_per_permutation(self):
        self.assertEqual(len(build_graph(["a", "b", "c"]).tests), 6)
        self.assertTrue(build_graph(["a", "b", "c"]).is_equicardinal())

    def test_direct_sum_tags_clashing_labels(self):
        c2 = build_classical(["a", "b"])
        total = direct_sum(c2, c2)
        self.assertEqual(total.outcomes, ((0, "a"), (0, "b"), (1, "a"), (1, "b")))
        self.assertEqual(total.tests, ((0, 1, 2, 3),))

    def test_masks(self):
        self.assertEqual(mask_of([0, 2]), 5)
        self.assertEqual(bits(5), (0, 2))


class TestEvents(unittest.TestCase):

    def test_event_counts(self):
        self.assertEqual(len(events_of(build_classical(["a", "b", "c"]))), 8)
        self.assertEqual(len(events_of(build_triangle())), 7)
        self.assertEqual(len(events_of(build_grid(["a", "b"]))), 9)

    def test_relations_in_the_grid(self):
        grid = build_grid(["a", "b"])
        aa, ab, bb = (grid.mask([x]) for x in [("a", "a"), ("a", "b"), ("b", "b")])
        relation = event_relation(grid, aa, ab)
        self.assertTrue(relation.orthogonal)
        self.assertTrue(relation.complementary)
        self.assertFalse(relation.perspective)

        relation = event_relation(grid, aa, bb)
        self.assertFalse(relation.orthogonal)
        self.assertTrue(relation.perspective)
        self.assertIsNotNone(relation.axis)

    def test_non_event_rejected(self):
        grid = build_grid(["a", "b"])
        with self.assertRaises(ValueError):
            event_relation(grid, grid.mask([("a", "a"), ("b", "b")]), 0)

    def test_perspectivity_class(self):
        grid = build_grid(["a", "b"])
        aa = grid.mask([("a", "a")])
        self.assertEqual(perspectivity_class(grid, aa), [aa, grid.mask([("b", "b")])])

    def test_class_read_as_a_test_space(self):
        grid = build_grid(["a", "b"])
        space = class_as_test_space(grid, grid.mask([("a", "a")]))
        self.assertEqual(space.outcomes, (("a", "a"), ("b", "b")))
        self.assertEqual(space.tests, ((0,), (1,)))


class TestLogic(unittest.TestCase):

    def test_triangle_is_not_algebraic(self):
        result = is_algebraic(build_triangle())
        self.assertFalse(result.algebraic)
        self.assertEqual(len(result.witness), 3)
        with self.assertRaises(NotAlgebraic):
            build_logic(build_triangle())

    def test_classical_logic_is_boolean(self):
        logic = build_logic(build_classical(["a", "b", "c"]))
        self.assertEqual(len(logic), 8)
        self.assertEqual(len(logic.atoms()), 3)
        self.assertTrue(logic.is_boolean())
        self.assertEqual(logic.check_axioms(), [])

    def test_two_by_two_grid_logic(self):
        logic = build_logic(build_grid(["a", "b"]))
        self.assertEqual(len(logic), 4)
        self.assertTrue(logic.is_boolean())

    def test_graph_logic_is_not_boolean(self):
        """Two disjoint tests glue their units: 0, four atoms, 1."""
        logic = build_logic(build_graph(["a", "b"]))
        self.assertEqual(len(logic), 6)
        self.assertEqual(len(logic.atoms()), 4)
        self.assertFalse(logic.is_boolean())
        self.assertEqual(logic.check_axioms(), [])

    def test_covers_of_classical_two(self):
        logic = build_logic(build_classical(["a", "b"]))
        self.assertEqual(len(logic.covers()), 4)

    def test_partial_sum(self):
        space = build_classical(["a", "b"])
        logic = build_logic(space)
        a, b = logic.class_of[space.mask(["a"])], logic.class_of[space.mask(["b"])]
        self.assertEqual(logic.oplus(a, b), logic.unit)
        self.assertEqual(logic.oplus(b, a), logic.unit)
        self.assertIsNone(logic.oplus(a, a))
        self.assertEqual(logic.complement[a], b)


class TestMorphisms(unittest.TestCase):

    def setUp(self):
        self.c2 = build_classical(["a", "b"])
        self.grid = build_grid(["a", "b"])

    def test_identity(self):
        self.assertTrue(check_morphism(identity_morphism(self.grid)).ok)

    def test_row_inclusion_is_a_morphism(self):
        m = point_morphism(self.c2, self.grid, {"a": ("a", "a"), "b": ("a", "b")})
        self.assertTrue(m.point_form)
        self.assertTrue(check_morphism(m).ok)

    def test_diagonal_is_not_a_morphism(self):
        m = point_morphism(self.c2, self.grid, {"a": ("a", "a"), "b": ("b", "b")})
        check = check_morphism(m)
        self.assertFalse(check.ok)
        self.assertEqual(check.condition, "i")

    def test_composition(self):
        m = point_morphism(self.c2, self.grid, {"a": ("a", "a"), "b": ("a", "b")})
        composed = compose_morphisms(identity_morphism(self.grid), m)
        self.assertEqual(composed.images, m.images)
        with self.assertRaises(ValueError):
            compose_morphisms(m, m)


class TestIsomorphism(unittest.TestCase):

    def test_relabelled_grid(self):
        first = build_grid(["a", "b"])
        second = first.relabel({("a", "a"): "w", ("a", "b"): "x", ("b", "a"): "y", ("b", "b"): "z"})
        self.assertEqual(second.test_labels()[0], ("w", "x"))
        mapping = isomorphism(first, second)
        self.assertIsNotNone(mapping)
        targets = set(second.test_masks)
        for t in first.tests:
            self.assertIn(mask_of(mapping[i] for i in t), targets)

    def test_grid_is_not_the_graph(self):
        self.assertIsNone(isomorphism(build_grid(["a", "b"]), build_graph(["a", "b"])))


if __name__ == '__main__':
    unittest.main()
