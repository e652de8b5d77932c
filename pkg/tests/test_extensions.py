# tests/test_extensions.py

import unittest
from unittest.mock import patch

from app import extensions
from app.errors import EmptySet, MorphismMismatch, NotRegular, TestSpaceError, WitnessNotFound
from app.extensions import (check_extension_laws, check_monoidal, check_regular_morphisms, compose_injections,
                            get_extension, inclusions, induced_outcome_map, injections, is_reasonable, is_regular,
                            morphism_xab, pathology_witnesses, space_of, tensor_space, test_bijections,
                            verify_structure)
from app.groups import FlipPair
from app.testspace import build_classical, build_graph, build_grid, check_morphism, mask_of


def test_sets(space):
    return {frozenset(t) for t in space.test_labels()}


class TestInjections(unittest.TestCase):

    def test_counts(self):
        self.assertEqual(len(injections(2, 3)), 6)
        self.assertEqual(len(inclusions(3)), 8)
        self.assertEqual(injections(0, 2), [()])

    def test_composition(self):
        self.assertEqual(compose_injections((2, 0, 1), (1, 2)), (0, 1))


class TestBuiltInExtensions(unittest.TestCase):

    def test_shared_instances(self):
        self.assertIs(get_extension("graph"), get_extension("graph"))
        with self.assertRaises(TestSpaceError):
            get_extension("hexagon")

    def test_group_orders(self):
        self.assertEqual(get_extension("trivial").group(3).order, 6)
        self.assertEqual(get_extension("graph").group(3).order, 36)
        self.assertEqual(get_extension("grid").group(2).order, 8)

    def test_transpose_survives_on_the_empty_set(self):
        grid = get_extension("grid")
        self.assertEqual(grid.group(0).order, 2)
        self.assertEqual(grid.induced(FlipPair(((), (), 1)), (), 2), FlipPair(((0, 1), (0, 1), 1)))

    def test_laws_hold_for_every_built_in_extension(self):
        for name in ("trivial", "graph", "grid"):
            results = check_extension_laws(get_extension(name), 3)
            self.assertEqual([r.claim for r in results],
                             ["functoriality", "injectivity", "naturality", "pullback", "image-meet"])
            for result in results:
                self.assertTrue(result.holds, f"{name} {result.claim}: {result.witness}")
                self.assertGreater(result.details["checked"], 0)


class TestExtensionSpaces(unittest.TestCase):

    def test_trivial_extension_gives_the_classical_space(self):
        es = space_of(get_extension("trivial"), ("a", "b", "c"))
        self.assertEqual(test_sets(es.space), test_sets(build_classical(["a", "b", "c"])))

    def test_graph_extension_gives_the_graph_space(self):
        es = space_of(get_extension("graph"), ("a", "b", "c"))
        self.assertEqual(es.space.size, 9)
        self.assertEqual(test_sets(es.space), test_sets(build_graph(["a", "b", "c"])))

    def test_grid_extension_gives_the_grid(self):
        es = space_of(get_extension("grid"), ("a", "b"))
        self.assertEqual(test_sets(es.space), test_sets(build_grid(["a", "b"])))

    def test_labels_may_be_a_size(self):
        es = space_of(get_extension("graph"), 2)
        self.assertEqual(es.labels, ("a", "b"))

    def test_cached_per_labels_and_base_point(self):
        ext = get_extension("graph")
        self.assertIs(space_of(ext, 2), space_of(ext, ("a", "b"), 0))
        self.assertIsNot(space_of(ext, 2), space_of(ext, 2, 1))

    def test_base_point_check(self):
        es = space_of(get_extension("graph"), ("a", "b"), 1, check_base_point=True)
        self.assertTrue(es.base_point_independent)

    def test_bad_sets(self):
        with self.assertRaises(EmptySet):
            space_of(get_extension("graph"), ())
        with self.assertRaises(TestSpaceError):
            space_of(get_extension("graph"), 2, base_point=5)

    def test_orbit_times_stabilizer_is_the_group_order(self):
        for name in ("trivial", "graph", "grid"):
            es = space_of(get_extension(name), 2)
            for x in range(es.space.size):
                fixing = sum(1 for g in es.group.elements if es.act(g, x) == x)
                self.assertEqual(es.space.size * fixing, es.group.order, f"{name} {x}")

    def test_witnesses(self):
        es = space_of(get_extension("graph"), 2)
        # (p, q) fixes the identity graph exactly when p == q
        self.assertEqual(len(es.stabilizer()), 2)
        target = es.space.test_masks[-1]
        for g in es.witnesses(target):
            self.assertEqual(mask_of(es.act(g, p) for p in es.phi), target)
        self.assertEqual(len(es.witness_pair(target)), 2)
        with self.assertRaises(WitnessNotFound):
            es.witnesses(0)


class TestRegularity(unittest.TestCase):

    def test_trivial_and_graph_are_regular(self):
        for name in ("trivial", "graph"):
            result = is_regular(get_extension(name), 3)
            self.assertTrue(result.holds)
            self.assertEqual(result.details["orientation"], "forward")

    def test_grid_is_not_regular(self):
        result = is_regular(get_extension("grid"), 2)
        self.assertFalse(result.holds)
        self.assertEqual(result.witness["size"], 2)

    def test_reasonable(self):
        self.assertTrue(is_reasonable(get_extension("trivial"), 4).holds)
        self.assertTrue(is_reasonable(get_extension("graph"), 4).holds)
        result = is_reasonable(get_extension("grid"), 3)
        self.assertFalse(result.holds)
        self.assertNotEqual(result.witness["ab"], result.witness["ba"])
        # on two points both sides induce the same global transpose
        self.assertEqual((result.witness["A"], result.witness["B"]), ([0], [1, 2]))

    def test_every_split_is_tried(self):
        # totals 2 and 3: {0}|{1}, {0}|{1,2}, {0,1}|{2}, {0,2}|{1}
        self.assertEqual(is_reasonable(get_extension("graph"), 3).details["splits"], 4)


class TestOutcomeMaps(unittest.TestCase):

    def setUp(self):
        self.ext = get_extension("graph")
        self.small = space_of(self.ext, 2)
        self.large = space_of(self.ext, 3)

    def test_inclusion_keeps_labels(self):
        induced = induced_outcome_map(self.ext, (0, 1), self.small, self.large)
        self.assertTrue(induced.injective)
        for q, label in enumerate(self.small.space.outcomes):
            self.assertEqual(self.large.space.outcomes[induced.points[q]], label)
        self.assertTrue(check_morphism(induced.as_morphism()).ok)

    def test_injection_moves_labels(self):
        trivial = get_extension("trivial")
        source, target = space_of(trivial, 2), space_of(trivial, 3)
        induced = induced_outcome_map(trivial, (2, 0), source, target)
        self.assertEqual([target.space.outcomes[p] for p in induced.points], ["c", "a"])

    def test_grid_map_moving_the_base_point(self):
        grid = get_extension("grid")
        source, target = space_of(grid, ("a", "b")), space_of(grid, ("a", "b", "c"))
        f = (2, 0)
        induced = induced_outcome_map(grid, f, source, target)
        # f x f on carrier pairs
        for q, (x, y) in enumerate(source.space.outcomes):
            image = (target.labels[f[source.labels.index(x)]], target.labels[f[source.labels.index(y)]])
            self.assertEqual(target.space.outcomes[induced.points[q]], image)
        self.assertTrue(check_morphism(induced.as_morphism()).ok)

    def test_not_an_injection(self):
        with self.assertRaises(MorphismMismatch):
            induced_outcome_map(self.ext, (0, 0), self.small, self.large)


class TestRegularMorphisms(unittest.TestCase):

    def test_bijection_count(self):
        es = space_of(get_extension("graph"), 2)
        # 2 tests of size 2: 2 * 2 * 2! bijections
        self.assertEqual(len(test_bijections(es)), 8)

    def test_graph_morphisms(self):
        results = check_regular_morphisms(get_extension("graph"), 2)
        self.assertEqual([r.claim for r in results], ["xab-well-defined", "xab-composition", "xab-restricts-action"])
        for result in results:
            self.assertTrue(result.holds, f"{result.claim}: {result.witness}")

    def test_identity_bijection_gives_the_identity(self):
        ext = get_extension("trivial")
        es = space_of(ext, 3)
        f = {p: p for p in es.space.tests[0]}
        self.assertEqual(morphism_xab(ext, es, es, f).points, (0, 1, 2))

    def test_grid_is_skipped(self):
        for result in check_regular_morphisms(get_extension("grid"), 2):
            self.assertIn("skipped", result.details)
        es = space_of(get_extension("grid"), 2)
        with self.assertRaises(NotRegular):
            morphism_xab(get_extension("grid"), es, es, {p: p for p in es.space.tests[0]})


class TestTensorStructure(unittest.TestCase):

    def test_graph_tensor_contains_product_tests(self):
        tensor = tensor_space(get_extension("graph"), ("a", "b"), ("u1", "u2"))
        self.assertEqual(tensor.space.size, 16)
        self.assertEqual(len(set(tensor.embedding)), 16)
        self.assertEqual(tensor.product_tests_contained(), (4, 4))
        self.assertTrue(tensor.generic_agrees)

    def test_trivial_structure(self):
        results = verify_structure(get_extension("trivial"), 2, 2, include_monoidal=False)
        self.assertEqual(len(results), 8)
        for result in results:
            self.assertTrue(result.holds, f"{result.claim}: {result.witness}")
            self.assertIn("runtime_ms", result.details)

    def test_graph_structure(self):
        # the two factors share labels, so the direct sum tags them
        results = verify_structure(get_extension("graph"), 2, 2, include_monoidal=False)
        self.assertEqual(len(results), 8)
        for result in results:
            self.assertTrue(result.holds, f"{result.claim}: {result.witness}")

    def test_trivial_monoidal_structure(self):
        results = check_monoidal(get_extension("trivial"), 2, 2)
        self.assertEqual([r.claim for r in results], ["tensor-bifunctor", "tensor-symmetry", "tensor-associator"])
        for result in results:
            self.assertTrue(result.holds, f"{result.claim}: {result.witness}")
        self.assertEqual(results[-1].details["third_factor_size"], 1)
        self.assertIn("coverage", results[-1].details)

    def test_generic_embedding_must_match_the_labels(self):
        real = extensions._generic_embedding

        def shifted(*args):
            table = real(*args)
            return table[1:] + table[:1]

        with patch('app.extensions._generic_embedding', side_effect=shifted):
            results = verify_structure(get_extension("trivial"), 2, 2, include_monoidal=False)
        product = next(r for r in results if r.claim == "product-tests")
        self.assertFalse(product.holds)
        self.assertFalse(product.details["generic_embedding_matches_labels"])
        self.assertNotEqual(product.witness["generic"], product.witness["labelled"])

    def test_grid_structure_is_skipped(self):
        for result in verify_structure(get_extension("grid"), 2, 2):
            self.assertEqual(result.details["skipped"], "NotReasonable")

    def test_pathologies(self):
        results = pathology_witnesses()
        self.assertEqual([r.claim for r in results],
                         ["grid-signaling", "grid-block-subgrid", "graph-row-column-sum"])
        for result in results:
            self.assertTrue(result.holds, f"{result.claim}: {result.witness}")


if __name__ == '__main__':
    unittest.main()
