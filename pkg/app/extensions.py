# app/extensions.py
"""
Extensions (G, j) of the symmetric-group functor S and the theory each one
induces.

A finite set is range(n) with a tuple of display labels. An injection
f: range(n) -> range(m) is the tuple (f(0), ..., f(n-1)); G(f) is
ExtensionSpec.induced(g, f, m). Products A x B are indexed i * |B| + j.
"""

import random
import time
from itertools import combinations, permutations
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from app.config import get_settings
from app.errors import (CapExceeded, EmptySet, IllDefined, MorphismMismatch, NotInjective, NotRegular,
                        NotWellDefined, TestSpaceError, WitnessNotFound)
from app.groups import (FiniteGroup, FlipPair, GroupElement, Perm, PermPair, centralizes, hom_extend, identity_perm,
                        induced_perm, symmetric_group)
from app.labels import label_text, standard_labels
from app.logging_config import get_logger
from app.models import CheckResult
from app.products import fr_product, is_non_signaling, restriction
from app.states import rational_text, state_polytope, test_sums, validate_weight
from app.symmetry import ConstructionData, basic_construction
from app.testspace import (Morphism, TestSpace, bits, check_morphism, event_structure, is_algebraic, isomorphism,
                           mask_of, perspectivity_class)

logger = get_logger("extensions")


def _adjacent(n: int) -> List[Tuple[int, ...]]:
    out = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        out.append(tuple(p))
    return out


def injections(n: int, m: int) -> List[Tuple[int, ...]]:
    return list(permutations(range(m), n))


def inclusions(m: int) -> List[Tuple[int, ...]]:
    """Every subset of range(m) as an increasing index map."""
    return [c for n in range(m + 1) for c in combinations(range(m), n)]


def compose_injections(outer: Sequence[int], inner: Sequence[int]) -> Tuple[int, ...]:
    return tuple(outer[i] for i in inner)


class ExtensionSpec:
    """A functor G on finite sets and injections with j_A: S(A) -> G(A)."""

    name = "abstract"

    def __init__(self):
        self._groups: Dict[int, FiniteGroup] = {}
        self._spaces: Dict[Tuple, "ExtensionSpace"] = {}
        self._outcome_maps: Dict[Tuple, "InducedMap"] = {}
        self._regular: Dict[int, CheckResult] = {}
        self._reasonable: Dict[int, CheckResult] = {}

    def element_count(self, n: int) -> int:
        raise NotImplementedError

    def elements(self, n: int) -> List[GroupElement]:
        raise NotImplementedError

    def generators(self, n: int) -> List[GroupElement]:
        raise NotImplementedError

    def identity(self, n: int) -> GroupElement:
        raise NotImplementedError

    def embed(self, sigma: Perm) -> GroupElement:
        raise NotImplementedError

    def induced(self, g: GroupElement, f: Sequence[int], degree: int) -> GroupElement:
        raise NotImplementedError

    def base_carrier(self, a: int) -> Any:
        raise NotImplementedError

    def carrier_label(self, point: Any, labels: Sequence[Any]) -> Any:
        raise NotImplementedError

    def product_label(self, x: Any, y: Any) -> Any:
        """Label in X(A x B) of the pair (x, y) in X(A) x X(B)."""
        raise NotImplementedError

    def carrier_act(self, g: GroupElement, point: Any) -> Any:
        return g.act(point)

    def group(self, n: int) -> FiniteGroup:
        if n not in self._groups:
            count = self.element_count(n)
            cap = get_settings().max_group
            if count > cap:
                logger.warning("%s: G(%d) would have %d elements", self.name, n, count)
                raise CapExceeded(f"{self.name} group G({n}) of order {count}", cap)
            self._groups[n] = FiniteGroup(self.generators(n), identity=self.identity(n),
                                          name=f"{self.name}:G({n})", elements=self.elements(n))
        return self._groups[n]


class TrivialExtension(ExtensionSpec):
    """G = S, j = id."""

    name = "trivial"

    def element_count(self, n):
        return factorial(n)

    def elements(self, n):
        return [Perm(p) for p in permutations(range(n))]

    def generators(self, n):
        return [Perm(p) for p in _adjacent(n)]

    def identity(self, n):
        return Perm(identity_perm(n))

    def embed(self, sigma):
        return sigma

    def induced(self, g, f, degree):
        return Perm(induced_perm(g.normal_form, f, degree))

    def base_carrier(self, a):
        return a

    def carrier_label(self, point, labels):
        return labels[point]

    def product_label(self, x, y):
        return (x, y)


class _PairCarrier(ExtensionSpec):
    """Extensions acting on A x A, labelled by pairs of base labels."""

    def base_carrier(self, a):
        return (a, a)

    def carrier_label(self, point, labels):
        return (labels[point[0]], labels[point[1]])

    def product_label(self, x, y):
        return ((x[0], y[0]), (x[1], y[1]))


class GraphExtension(_PairCarrier):
    """G(A) = S(A) x S(A), j(s) = (s, s), G(f) = S(f) x S(f)."""

    name = "graph"

    def element_count(self, n):
        return factorial(n) ** 2

    def elements(self, n):
        perms = list(permutations(range(n)))
        return [PermPair((p, q)) for p in perms for q in perms]

    def generators(self, n):
        e = identity_perm(n)
        return [PermPair((t, e)) for t in _adjacent(n)] + [PermPair((e, t)) for t in _adjacent(n)]

    def identity(self, n):
        return PermPair((identity_perm(n), identity_perm(n)))

    def embed(self, sigma):
        return PermPair((sigma.normal_form, sigma.normal_form))

    def induced(self, g, f, degree):
        p1, p2 = g.normal_form
        return PermPair((induced_perm(p1, f, degree), induced_perm(p2, f, degree)))


class GridExtension(_PairCarrier):
    """
    G(A) = (S(A) x S(A)) extended by the transpose, j(s) = (s, id, 0),
    G(f)(s1, s2, k) = (S(f)s1, S(f)s2, k). The transpose survives in G(empty set).
    """

    name = "grid"

    def element_count(self, n):
        return 2 * factorial(n) ** 2

    def elements(self, n):
        perms = list(permutations(range(n)))
        return [FlipPair((p, q, k)) for p in perms for q in perms for k in (0, 1)]

    def generators(self, n):
        e = identity_perm(n)
        return ([FlipPair((t, e, 0)) for t in _adjacent(n)] + [FlipPair((e, t, 0)) for t in _adjacent(n)]
                + [FlipPair((e, e, 1))])

    def identity(self, n):
        return FlipPair((identity_perm(n), identity_perm(n), 0))

    def embed(self, sigma):
        return FlipPair((sigma.normal_form, identity_perm(len(sigma.normal_form)), 0))

    def induced(self, g, f, degree):
        p1, p2, k = g.normal_form
        return FlipPair((induced_perm(p1, f, degree), induced_perm(p2, f, degree), k))


EXTENSIONS = {"trivial": TrivialExtension, "graph": GraphExtension, "grid": GridExtension}
_instances: Dict[str, ExtensionSpec] = {}


def get_extension(name: str) -> ExtensionSpec:
    """Shared instance of a built-in extension (its caches are shared too)."""
    if name not in EXTENSIONS:
        raise TestSpaceError(f"unknown extension '{name}'; choose from {', '.join(sorted(EXTENSIONS))}")
    if name not in _instances:
        _instances[name] = EXTENSIONS[name]()
    return _instances[name]


class ExtensionSpace:
    """G(A) = A(G(A), S(A), K(A, a)) together with its extension."""

    def __init__(self, ext: ExtensionSpec, labels: Tuple[Any, ...], base_point: int, construction: ConstructionData):
        self.ext = ext
        self.labels = labels
        self.base_point = base_point
        self.construction = construction
        self.phi = construction.phi
        self.phi_index = {p: i for i, p in enumerate(self.phi)}
        self.base_point_independent: Optional[bool] = None
        self._stabilizer: Optional[List[GroupElement]] = None

    @property
    def key(self) -> Tuple:
        return (self.labels, self.base_point)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def space(self) -> TestSpace:
        return self.construction.space

    @property
    def group(self) -> FiniteGroup:
        return self.construction.group

    @property
    def base_test(self) -> int:
        return mask_of(self.phi)

    def act(self, g: GroupElement, point: int) -> int:
        return self.construction.act(g, point)

    def representative(self, point: int) -> GroupElement:
        """Least g with g phi(a) equal to the point."""
        return self.construction.cosets.points[point]

    def stabilizer(self) -> List[GroupElement]:
        """G(A)_A: elements carrying the base test onto itself."""
        if self._stabilizer is None:
            base = set(self.phi)
            self._stabilizer = [g for g in self.group.elements if {self.act(g, p) for p in base} == base]
        return self._stabilizer

    def witnesses(self, test_mask: int) -> List[GroupElement]:
        """Every g with g A = A' for the test A' given as a mask."""
        try:
            first = self.construction.witness_for(test_mask)
        except KeyError:
            raise WitnessNotFound(f"{self.space.text_of(test_mask)} is not a test of {self.space.name}")
        return [first * s for s in self.stabilizer()]

    def witness_pair(self, test_mask: int) -> List[GroupElement]:
        """One witness for the test, plus a second one when the base test has a nontrivial stabilizer."""
        try:
            first = self.construction.witness_for(test_mask)
        except KeyError:
            raise WitnessNotFound(f"{self.space.text_of(test_mask)} is not a test of {self.space.name}")
        other = next((s for s in reversed(self.stabilizer()) if not s.is_identity()), None)
        return [first] if other is None else [first, first * other]


def space_of(ext: ExtensionSpec, labels, base_point: int = 0, check_base_point: bool = False) -> ExtensionSpace:
    """G(A) with K(A, a) the image of G(A minus a); labels may be a size."""
    if isinstance(labels, int):
        labels = standard_labels(labels)
    labels = tuple(labels)
    n = len(labels)
    if n == 0:
        raise EmptySet("G(A) needs a non-empty set A")
    if not 0 <= base_point < n:
        raise TestSpaceError(f"base point {base_point} outside a set of size {n}")
    key = (labels, base_point)
    cached = ext._spaces.get(key)
    if cached is None:
        group = ext.group(n)
        sym = symmetric_group(n)
        embed = hom_extend({s: ext.embed(s) for s in sym.generators}, sym, group, require_injective=True)
        rest = tuple(i for i in range(n) if i != base_point)
        k_elements = sorted({ext.induced(g, rest, n) for g in ext.group(n - 1).elements})
        subgroup = FiniteGroup(k_elements, identity=group.identity, name=f"K({n},{base_point})", elements=k_elements)
        c0 = ext.base_carrier(base_point)
        construction = basic_construction(
            group, embed, subgroup, labels, base_point,
            point_label=lambda k, rep: ext.carrier_label(ext.carrier_act(rep, c0), labels),
            name=f"{ext.name}({','.join(label_text(x) for x in labels)})", certify=False)
        for g in group.elements:
            expected = ext.carrier_label(ext.carrier_act(g, c0), labels)
            if construction.space.outcomes[construction.cosets.point_of(g)] != expected:
                raise IllDefined(f"coset of {g!r} is not labelled by its carrier point", witness=repr(g))
        cached = ExtensionSpace(ext, labels, base_point, construction)
        ext._spaces[key] = cached
    if check_base_point and n > 1 and cached.base_point_independent is None:
        cached.base_point_independent = base_point_check(ext, labels, base_point).holds
    return cached


def base_point_check(ext: ExtensionSpec, labels: Sequence[Any], base_point: int = 0) -> CheckResult:
    labels = tuple(labels)
    other = (base_point + 1) % len(labels)
    first = space_of(ext, labels, base_point).space
    second = space_of(ext, labels, other).space
    found = isomorphism(first, second)
    same = set(map(frozenset, first.test_labels())) == set(map(frozenset, second.test_labels()))
    return CheckResult(claim="base-point-independence", holds=found is not None,
                       witness=None if found is not None else {"base_points": [base_point, other]},
                       details={"identical_tests": same})


# --- Extension laws ---

def check_extension_laws(ext: ExtensionSpec, max_size: int) -> List[CheckResult]:
    """Functoriality, injectivity, naturality, the pullback square and G(A) n S(B) = S(A), for |B| <= max_size."""
    failures: Dict[str, Any] = {}
    checked = {"functoriality": 0, "injectivity": 0, "naturality": 0, "pullback": 0, "image-meet": 0}

    def fail(law: str, witness: Any) -> None:
        failures.setdefault(law, witness)

    for n in range(max_size + 1):
        ident = tuple(range(n))
        for g in ext.generators(n):
            checked["functoriality"] += 1
            if ext.induced(g, ident, n) != g:
                fail("functoriality", {"identity_on": n, "element": repr(g)})
    for n in range(max_size + 1):
        for m in range(n, max_size + 1):
            for p in range(m, max_size + 1):
                for f in injections(n, m):
                    for h in injections(m, p):
                        hf = compose_injections(h, f)
                        for g in ext.generators(n):
                            checked["functoriality"] += 1
                            if ext.induced(ext.induced(g, f, m), h, p) != ext.induced(g, hf, p):
                                fail("functoriality", {"f": list(f), "h": list(h), "element": repr(g)})

    for m in range(max_size + 1):
        sym_b = symmetric_group(m)
        j_b = {t: ext.embed(t) for t in sym_b.elements}
        j_b_image = set(j_b.values())
        for f in inclusions(m):
            n = len(f)
            where = {"A": list(f), "B_size": m}
            checked["injectivity"] += 1
            try:
                hom = hom_extend({g: ext.induced(g, f, m) for g in ext.generators(n)}, ext.group(n), ext.group(m),
                                 require_injective=True)
            except (NotWellDefined, NotInjective) as exc:
                fail("injectivity", dict(where, reason=str(exc)))
                continue
            stray = next((g for g in ext.group(n).elements if hom(g) != ext.induced(g, f, m)), None)
            if stray is not None:
                fail("functoriality", dict(where, element=repr(stray), reason="G(f) is not the generated hom"))

            sym_a = symmetric_group(n)
            j_a_inverse = {ext.embed(s): s for s in sym_a.elements}
            for s in sym_a.elements:
                checked["naturality"] += 1
                if hom(ext.embed(s)) != ext.embed(Perm(induced_perm(s.normal_form, f, m))):
                    fail("naturality", dict(where, sigma=list(s.normal_form)))

            g_inverse = {v: g for g, v in hom.mapping.items()}
            for t in sym_b.elements:
                checked["pullback"] += 1
                g = g_inverse.get(j_b[t])
                if g is None:
                    continue
                s = j_a_inverse.get(g)
                if s is None or induced_perm(s.normal_form, f, m) != t.normal_form:
                    fail("pullback", dict(where, tau=list(t.normal_form)))

            checked["image-meet"] += 1
            meet = set(hom.mapping.values()) & j_b_image
            expected = {ext.embed(Perm(induced_perm(s.normal_form, f, m))) for s in sym_a.elements}
            if meet != expected:
                odd = sorted(meet ^ expected)[0]
                fail("image-meet", dict(where, element=repr(odd)))

    logger.info("%s laws up to size %d: %s", ext.name, max_size, checked)
    return [CheckResult(claim=law, holds=law not in failures, witness=failures.get(law),
                        details={"checked": count}) for law, count in checked.items()]


# --- Regularity and reasonableness ---

def is_regular(ext: ExtensionSpec, max_size: int) -> CheckResult:
    """
    For s in G(A)_A, compares G(s|_A)(g) with s g s^-1 ("forward") and with
    s^-1 g s ("inverse"); regular when one orientation always holds. Both
    sides are homomorphisms in g, so g runs over the generators.
    """
    if max_size in ext._regular:
        return ext._regular[max_size]
    forward: Optional[Dict] = None
    inverse: Optional[Dict] = None
    for n in range(1, max_size + 1):
        es = space_of(ext, n)
        for s in es.stabilizer():
            restricted = tuple(es.phi_index[es.act(s, es.phi[i])] for i in range(n))
            s_inv = s.inverse()
            for g in es.group.generators:
                image = ext.induced(g, restricted, n)
                if forward is None and image != s * g * s_inv:
                    forward = {"size": n, "sigma": repr(s), "g": repr(g), "functor_image": repr(image),
                               "conjugate": repr(s * g * s_inv)}
                if inverse is None and image != s_inv * g * s:
                    inverse = {"size": n, "sigma": repr(s), "g": repr(g)}
                if forward and inverse:
                    break
            if forward and inverse:
                break
        if forward and inverse:
            break
    orientation = "forward" if forward is None else ("inverse" if inverse is None else None)
    result = CheckResult(claim="regular", holds=orientation is not None, witness=None if orientation else forward,
                         details={"orientation": orientation, "max_size": max_size})
    ext._regular[max_size] = result
    return result


def is_reasonable(ext: ExtensionSpec, max_size: int) -> CheckResult:
    """
    G(A) and G(B) commute inside G(A u B) for disjoint non-empty A, B.
    Every split of range(total) with 0 in A is tried, for each total up to max_size.
    """
    if max_size in ext._reasonable:
        return ext._reasonable[max_size]
    splits = 0
    witness: Optional[Dict] = None
    for total in range(2, max_size + 1):
        for n in range(1, total):
            for rest in combinations(range(1, total), n - 1):
                left = (0,) + rest
                right = tuple(i for i in range(total) if i not in left)
                splits += 1
                gens_a = [ext.induced(g, left, total) for g in ext.generators(n)]
                gens_b = [ext.induced(h, right, total) for h in ext.generators(total - n)]
                bad = next(((g, h) for g in gens_a for h in gens_b if not centralizes(g, h)), None)
                if bad:
                    witness = {"A": list(left), "B": list(right), "from_a": repr(bad[0]), "from_b": repr(bad[1]),
                               "ab": repr(bad[0] * bad[1]), "ba": repr(bad[1] * bad[0])}
                    break
            if witness:
                break
        if witness:
            break
    result = CheckResult(claim="reasonable", holds=witness is None, witness=witness,
                         details={"max_size": max_size, "splits": splits})
    ext._reasonable[max_size] = result
    return result


# --- Induced outcome maps ---

class InducedMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str
    source: TestSpace
    target: TestSpace
    points: Tuple[int, ...]
    witnesses: Tuple[str, ...] = ()

    @property
    def injective(self) -> bool:
        return len(set(self.points)) == len(self.points)

    def as_morphism(self) -> Morphism:
        return Morphism(source=self.source, target=self.target, images=tuple(1 << p for p in self.points))

    def image_of(self, mask: int) -> int:
        return mask_of(self.points[i] for i in bits(mask))


def induced_outcome_map(ext: ExtensionSpec, f: Sequence[int], source: ExtensionSpace,
                        target: ExtensionSpace) -> InducedMap:
    """
    X(f)(g a) = G(f)(g) f(a), read off the coset representatives at the base
    point, with f(a) the carrier point of f(a) in X(B). The embedding of B in
    X(B) moves with the base point, so X(f) phi_A is compared with phi_B f
    taken at the base point f(a). The map is then checked for equivariance
    under the generators, which gives the formula for every decomposition
    x = g a1.
    """
    f = tuple(f)
    key = (source.key, target.key, f)
    if key in ext._outcome_maps:
        return ext._outcome_maps[key]
    if len(f) != source.size or len(set(f)) != len(f) or any(not 0 <= j < target.size for j in f):
        raise MorphismMismatch(f"{list(f)} is not an injection of a {source.size}-set into a {target.size}-set")
    moved_base = f[source.base_point]
    anchor = target.space.index(ext.carrier_label(ext.base_carrier(moved_base), target.labels))
    points = tuple(target.act(ext.induced(source.representative(q), f, target.size), anchor)
                   for q in range(source.space.size))

    def conflict(q: int, **where) -> IllDefined:
        text = label_text(source.space.outcomes[q])
        return IllDefined(f"X(f) sends {text} to two outcomes", witness=dict(where, point=text))

    rebased = target if moved_base == target.base_point else space_of(ext, target.labels, moved_base)
    for a1 in range(source.size):
        expected = target.space.index(rebased.space.outcomes[rebased.phi[f[a1]]])
        if points[source.phi[a1]] != expected:
            raise conflict(source.phi[a1], a=a1)
    for g in source.group.generators:
        gf = ext.induced(g, f, target.size)
        for q in range(source.space.size):
            if points[source.act(g, q)] != target.act(gf, points[q]):
                raise conflict(source.act(g, q), g=repr(g))
    result = InducedMap(kind="X(f)", source=source.space, target=target.space, points=points)
    ext._outcome_maps[key] = result
    return result


def morphism_xab(ext: ExtensionSpec, source: ExtensionSpace, target: ExtensionSpace,
                 f_points: Dict[int, int]) -> InducedMap:
    """
    X^A_B(f) = h X(h^-1 o f o g) g^-1 for a bijection f: A' -> B' between
    tests, with g A = A' and h B = B'. Recomputed with a second witness pair.
    """
    n = source.size
    if target.size != n or len(f_points) != n or len(set(f_points.values())) != n:
        raise MorphismMismatch("X^A_B(f) needs a bijection between tests of equal size")
    regular = is_regular(ext, n)
    if not regular.holds:
        raise NotRegular(f"{ext.name} is not regular", witness=regular.witness)
    gs = source.witness_pair(mask_of(f_points))
    hs = target.witness_pair(mask_of(f_points.values()))

    def build(g: GroupElement, h: GroupElement) -> Tuple[int, ...]:
        h_inv = h.inverse()
        k = []
        for i in range(n):
            w = target.act(h_inv, f_points[source.act(g, source.phi[i])])
            if w not in target.phi_index:
                raise IllDefined("h^-1 f g does not land in the base test", witness={"g": repr(g), "h": repr(h)})
            k.append(target.phi_index[w])
        inner = induced_outcome_map(ext, tuple(k), source, target).points
        g_inv = g.inverse()
        return tuple(target.act(h, inner[source.act(g_inv, x)]) for x in range(source.space.size))

    points = build(gs[0], hs[0])
    pairs = [(gs[0], hs[0])]
    if len(gs) > 1 or len(hs) > 1:
        alternative = build(gs[-1], hs[-1])
        pairs.append((gs[-1], hs[-1]))
        if alternative != points:
            raise IllDefined("X^A_B(f) depends on the choice of g and h",
                             witness={"pairs": [[repr(g), repr(h)] for g, h in pairs]})
    return InducedMap(kind="X^A_B(f)", source=source.space, target=target.space, points=points,
                      witnesses=tuple(repr(x) for pair in pairs for x in pair))


def test_bijections(es: ExtensionSpace) -> List[Dict[int, int]]:
    """Every bijection between two tests of G(A), tests in canonical order."""
    out = []
    for source in es.space.tests:
        for target in es.space.tests:
            for images in permutations(target):
                out.append(dict(zip(source, images)))
    return out


def check_regular_morphisms(ext: ExtensionSpec, labels) -> List[CheckResult]:
    """Witness independence, the composition law and X_A(g|A') = g on one G(A)."""
    es = space_of(ext, labels)
    regular = is_regular(ext, es.size)
    if not regular.holds:
        reason = {"skipped": "extension is not regular"}
        return [CheckResult(claim=c, holds=False, details=reason)
                for c in ("xab-well-defined", "xab-composition", "xab-restricts-action")]
    maps: Dict[Tuple, Tuple[int, ...]] = {}
    well_defined: Optional[Dict] = None
    for f in test_bijections(es):
        try:
            maps[tuple(sorted(f.items()))] = morphism_xab(ext, es, es, f).points
        except IllDefined as exc:
            well_defined = well_defined or {"f": sorted(f.items()), "reason": str(exc)}
    composition_failure: Optional[Dict] = None
    composites = 0
    for f1_key, m1 in maps.items():
        f1 = dict(f1_key)
        image = mask_of(f1.values())
        for f2_key, m2 in maps.items():
            f2 = dict(f2_key)
            if mask_of(f2) != image:
                continue
            composites += 1
            direct = maps[tuple(sorted((x, f2[y]) for x, y in f1.items()))]
            if tuple(m2[p] for p in m1) != direct:
                composition_failure = composition_failure or {"f1": sorted(f1.items()), "f2": sorted(f2.items())}
    restriction_failure: Optional[Dict] = None
    for g in es.group.elements:
        action = tuple(es.act(g, x) for x in range(es.space.size))
        for test in es.space.tests:
            restricted = {x: es.act(g, x) for x in test}
            if maps[tuple(sorted(restricted.items()))] != action:
                restriction_failure = restriction_failure or {
                    "g": repr(g), "test": [label_text(es.space.outcomes[x]) for x in test]}
    return [
        CheckResult(claim="xab-well-defined", holds=well_defined is None, witness=well_defined,
                    details={"morphisms": len(maps)}),
        CheckResult(claim="xab-composition", holds=composition_failure is None, witness=composition_failure,
                    details={"composites": composites}),
        CheckResult(claim="xab-restricts-action", holds=restriction_failure is None, witness=restriction_failure,
                    details={"elements": es.group.order}),
    ]


# --- Tensor spaces ---

class TensorSpace:
    """G(A x B) with X(A) x X(B) embedded; embedding[i * |X(B)| + j] is the image of (x_i, y_j)."""

    def __init__(self, ext: ExtensionSpec, left: ExtensionSpace, right: ExtensionSpace, product: ExtensionSpace,
                 embedding: Tuple[int, ...], generic: Optional[Tuple[int, ...]]):
        self.ext = ext
        self.left = left
        self.right = right
        self.product = product
        self.embedding = embedding
        self.generic = generic

    @property
    def space(self) -> TestSpace:
        return self.product.space

    @property
    def generic_agrees(self) -> Optional[bool]:
        return None if self.generic is None else self.generic == self.embedding

    def pair(self, x: int, y: int) -> int:
        return self.embedding[x * self.right.space.size + y]

    def product_test(self, mask_a: int, mask_b: int) -> int:
        return mask_of(self.pair(x, y) for x in bits(mask_a) for y in bits(mask_b))

    def product_tests_contained(self) -> Tuple[int, int]:
        tests = set(self.space.test_masks)
        pairs = [(a, b) for a in self.left.space.test_masks for b in self.right.space.test_masks]
        return sum(1 for a, b in pairs if self.product_test(a, b) in tests), len(pairs)


def _generic_embedding(ext: ExtensionSpec, left: ExtensionSpace, right: ExtensionSpace,
                       product: ExtensionSpace) -> Tuple[int, ...]:
    """(g a0, h b0) -> Phi_A(g) Phi_B(h) (a0, b0) with Phi_A(g) = prod_b G(k_b)(g), Phi_B(h) = prod_a G(i_a)(h)."""
    n, m = left.size, right.size
    degree = n * m
    kappas = [tuple(i * m + b for i in range(n)) for b in range(m)]
    iotas = [tuple(a * m + j for j in range(m)) for a in range(n)]

    def phi_a(g):
        out = product.group.identity
        for k in kappas:
            out = out * ext.induced(g, k, degree)
        return out

    def phi_b(h):
        out = product.group.identity
        for i in iotas:
            out = out * ext.induced(h, i, degree)
        return out

    base = product.phi[0]
    size_b = right.space.size
    table = [product.act(phi_a(left.representative(x)) * phi_b(right.representative(y)), base)
             for x in range(left.space.size) for y in range(size_b)]
    for g in left.group.elements:
        x = left.act(g, left.phi[0])
        ga = phi_a(g)
        for y in range(size_b):
            if product.act(ga * phi_b(right.representative(y)), base) != table[x * size_b + y]:
                raise IllDefined("the product embedding depends on the coset representative",
                                 witness={"g": repr(g), "y": y})
    for h in right.group.elements:
        y = right.act(h, right.phi[0])
        hb = phi_b(h)
        for x in range(left.space.size):
            if product.act(phi_a(left.representative(x)) * hb, base) != table[x * size_b + y]:
                raise IllDefined("the product embedding depends on the coset representative",
                                 witness={"h": repr(h), "x": x})
    return tuple(table)


def tensor_space(ext: ExtensionSpec, labels_a, labels_b, generic: Optional[bool] = None) -> TensorSpace:
    left = space_of(ext, labels_a)
    right = space_of(ext, labels_b)
    product_labels = tuple((x, y) for x in left.labels for y in right.labels)
    product = space_of(ext, product_labels)
    embedding = []
    for x in left.space.outcomes:
        for y in right.space.outcomes:
            label = ext.product_label(x, y)
            try:
                embedding.append(product.space.index(label))
            except KeyError:
                raise IllDefined(f"{label_text(label)} is not an outcome of {product.space.name}")
    if generic is None:
        generic = is_reasonable(ext, min(len(product_labels), 4)).holds
    generic_table = _generic_embedding(ext, left, right, product) if generic else None
    tensor = TensorSpace(ext, left, right, product, tuple(embedding), generic_table)
    logger.info("tensor %s: %d outcomes, %d tests", product.space.name, product.space.size, len(product.space.tests))
    return tensor


def tensor_morphism(tensor: TensorSpace, first: Sequence[int], second: Sequence[int],
                    target: Optional[TensorSpace] = None) -> Tuple[int, ...]:
    """phi_1 (x) phi_2 = X^{AxB}(f1 x f2) with f_i the restrictions to the base tests."""
    target = target or tensor
    f = {tensor.pair(x, y): target.pair(first[x], second[y]) for x in tensor.left.phi for y in tensor.right.phi}
    return morphism_xab(tensor.ext, tensor.product, target.product, f).points


# --- The reasonable-structure suite ---

def _sum_space(ext: ExtensionSpec, left: ExtensionSpace,
               right: ExtensionSpace) -> Tuple[ExtensionSpace, InducedMap, InducedMap]:
    """G(A + B) with A and B tagged 0/1 when their labels clash, plus X of both inclusions."""
    if set(left.labels) & set(right.labels):
        labels = tuple((0, x) for x in left.labels) + tuple((1, y) for y in right.labels)
    else:
        labels = left.labels + right.labels
    union = space_of(ext, labels)
    n, m = left.size, right.size
    into_a = induced_outcome_map(ext, tuple(range(n)), left, union)
    into_b = induced_outcome_map(ext, tuple(range(n, n + m)), right, union)
    return union, into_a, into_b


def _timed(claim: str, check) -> CheckResult:
    started = time.perf_counter()
    result = check()
    result.details.setdefault("runtime_ms", round((time.perf_counter() - started) * 1000, 3))
    result.claim = claim
    return result


def verify_structure(ext: ExtensionSpec, labels_a, labels_b, include_monoidal: bool = True) -> List[CheckResult]:
    """Direct-sum, product and non-signaling structure of a reasonable extension, then the monoidal checks."""
    left, right = space_of(ext, labels_a), space_of(ext, labels_b)
    claims = ["point-fixing", "sum-tests", "algebraic", "perspectivity-class", "inclusion-morphism", "product-tests",
              "two-stage-tests", "tensor-nonsignaling"]
    reasonable = is_reasonable(ext, left.size + right.size)
    if not reasonable.holds:
        skip = {"skipped": "NotReasonable", "reasonable_witness": reasonable.witness}
        return [CheckResult(claim=c, holds=False, details=dict(skip)) for c in claims]
    union, into_a, into_b = _sum_space(ext, left, right)
    results: List[CheckResult] = []

    def point_fixing() -> CheckResult:
        n, m = left.size, right.size
        for inner, outer_map, shift in ((left, into_b, 0), (right, into_a, n)):
            inclusion = tuple(range(shift, shift + inner.size))
            for g in inner.group.generators:
                image = ext.induced(g, inclusion, n + m)
                moved = next((p for p in set(outer_map.points) if union.act(image, p) != p), None)
                if moved is not None:
                    return CheckResult(claim="", holds=False,
                                       witness={"g": repr(image), "point": label_text(union.space.outcomes[moved])})
        return CheckResult(claim="", holds=True)

    def sum_tests() -> CheckResult:
        tests = set(union.space.test_masks)
        for a in left.space.test_masks:
            for b in right.space.test_masks:
                joined = into_a.image_of(a) | into_b.image_of(b)
                if joined not in tests:
                    return CheckResult(claim="", holds=False, witness={"test": union.space.text_of(joined)})
        structure = event_structure(union.space)
        images_b = {into_b.image_of(b) for b in right.space.test_masks}
        base_a = into_a.image_of(left.base_test)
        stray = [c for c in structure.complements(base_a) if c not in images_b]
        if stray:
            return CheckResult(claim="", holds=False,
                               witness={"complement_not_in_G(B)": union.space.text_of(stray[0])})
        return CheckResult(claim="", holds=True, details={"sum_tests": len(images_b) * len(left.space.tests)})

    def algebraic() -> CheckResult:
        for es in (left, right, union):
            check = is_algebraic(es.space)
            if not check.algebraic:
                return CheckResult(claim="", holds=False, witness={"space": es.space.name, "triple": check.witness})
        return CheckResult(claim="", holds=True)

    def perspectivity() -> CheckResult:
        base_a = into_a.image_of(left.base_test)
        klass = set(perspectivity_class(union.space, base_a))
        images = {into_a.image_of(a) for a in left.space.test_masks}
        if klass != images:
            odd = sorted(klass ^ images)[0]
            return CheckResult(claim="", holds=False, witness={"event": union.space.text_of(odd)})
        return CheckResult(claim="", holds=True)

    def inclusion_morphisms() -> CheckResult:
        for induced in (into_a, into_b):
            check = check_morphism(induced.as_morphism())
            if not check.ok:
                return CheckResult(claim="", holds=False, witness=check.model_dump())
        return CheckResult(claim="", holds=True)

    tensor = tensor_space(ext, left.labels, right.labels, generic=True)

    def product_tests() -> CheckResult:
        contained, total = tensor.product_tests_contained()
        details = {"product_tests": total, "generic_embedding_matches_labels": tensor.generic_agrees}
        if contained != total:
            return CheckResult(claim="", holds=False, witness={"missing": total - contained}, details=details)
        if tensor.generic_agrees is False:
            k = next(i for i, (p, q) in enumerate(zip(tensor.generic, tensor.embedding)) if p != q)
            x, y = divmod(k, right.space.size)
            return CheckResult(claim="", holds=False, details=details, witness={
                "pair": [label_text(left.space.outcomes[x]), label_text(right.space.outcomes[y])],
                "generic": label_text(tensor.space.outcomes[tensor.generic[k]]),
                "labelled": label_text(tensor.space.outcomes[tensor.embedding[k]])})
        return CheckResult(claim="", holds=True, details=details)

    def two_stage_tests() -> CheckResult:
        fr = fr_product(left.space, right.space)
        tests = set(tensor.space.test_masks)
        for t in fr.tests:
            image = mask_of(tensor.embedding[k] for k in t)
            if image not in tests:
                return CheckResult(claim="", holds=False, witness={"two_stage_test": tensor.space.text_of(image)})
        return CheckResult(claim="", holds=True, details={"fr_tests": len(fr.tests)})

    def non_signaling() -> CheckResult:
        polytope = state_polytope(tensor.space)
        for vertex in polytope.vertices:
            check = is_non_signaling(restriction(left.space, right.space, tensor.embedding, vertex.weights))
            if not check.holds:
                return CheckResult(claim="", holds=False, witness=check.witness.model_dump())
        return CheckResult(claim="", holds=True, details={"vertices": len(polytope.vertices)})

    checks = (point_fixing, sum_tests, algebraic, perspectivity, inclusion_morphisms, product_tests, two_stage_tests,
              non_signaling)
    for claim, check in zip(claims, checks):
        results.append(_timed(claim, check))
    if include_monoidal:
        results.extend(check_monoidal(ext, left.labels, right.labels))
    return results


def check_monoidal(ext: ExtensionSpec, labels_a, labels_b, sample_cap: int = 10_000,
                   sample_size: int = 1_000) -> List[CheckResult]:
    """Bifunctoriality of the tensor, then symmetry and the associator (with a one-point C) as natural isomorphisms."""
    claims = ("tensor-bifunctor", "tensor-associator", "tensor-symmetry")
    left, right = space_of(ext, labels_a), space_of(ext, labels_b)
    size = left.size * right.size
    regular = is_regular(ext, size)
    reasonable = is_reasonable(ext, left.size + right.size)
    if not (regular.holds and reasonable.holds):
        why = "extension is not regular" if not regular.holds else "NotReasonable"
        return [CheckResult(claim=c, holds=False, details={"skipped": why}) for c in claims]
    tensor = tensor_space(ext, left.labels, right.labels, generic=True)
    maps_a = [morphism_xab(ext, left, left, f).points for f in test_bijections(left)]
    maps_b = [morphism_xab(ext, right, right, f).points for f in test_bijections(right)]
    cache: Dict[Tuple, Tuple[int, ...]] = {}

    def tensored(m1, m2, t=tensor):
        key = (id(t), m1, m2)
        if key not in cache:
            cache[key] = tensor_morphism(t, m1, m2)
        return cache[key]

    def then(first, second):
        return tuple(second[p] for p in first)

    quadruples = [(p1, p2, q1, q2) for p1 in maps_a for p2 in maps_b for q1 in maps_a for q2 in maps_b]
    sampled = len(quadruples) > sample_cap
    if sampled:
        quadruples = random.Random(0).sample(quadruples, sample_size)
    bifunctor: Optional[Dict] = None
    for p1, p2, q1, q2 in quadruples:
        lhs = then(tensored(q1, q2), tensored(p1, p2))
        rhs = tensored(then(q1, p1), then(q2, p2))
        if lhs != rhs:
            bifunctor = {"phi": [list(p1), list(p2)], "psi": [list(q1), list(q2)]}
            break
    results = [CheckResult(claim=claims[0], holds=bifunctor is None, witness=bifunctor,
                           details={"quadruples": len(quadruples), "sampled": sampled, "tensor_maps": len(cache)})]

    # symmetry: X(swap) from G(A x B) to G(B x A)
    flipped = tensor_space(ext, right.labels, left.labels, generic=True)
    n, m = left.size, right.size
    swap = tuple(j * n + i for i in range(n) for j in range(m))
    x_swap = induced_outcome_map(ext, swap, tensor.product, flipped.product)
    symmetry = _isomorphism_problem(x_swap)
    if symmetry is None:
        for p1 in maps_a:
            for p2 in maps_b:
                if then(tensored(p1, p2), x_swap.points) != then(x_swap.points, tensored(p2, p1, flipped)):
                    symmetry = {"phi": [list(p1), list(p2)]}
                    break
            if symmetry:
                break
    results.append(CheckResult(claim=claims[2], holds=symmetry is None, witness=symmetry,
                               details={"pairs": len(maps_a) * len(maps_b)}))

    # associator: X(alpha) from G((A x B) x C) to G(A x (B x C)) with |C| = 1
    third = space_of(ext, ("c",))
    left_assoc = tensor_space(ext, tensor.product.labels, third.labels, generic=True)
    bc = tensor_space(ext, right.labels, third.labels, generic=True)
    right_assoc = tensor_space(ext, left.labels, bc.product.labels, generic=True)
    alpha = tuple(right_assoc.product.labels.index((a, (b, c))) for (a, b), c in left_assoc.product.labels)
    x_alpha = induced_outcome_map(ext, alpha, left_assoc.product, right_assoc.product)
    associator = _isomorphism_problem(x_alpha)
    identity_c = tuple(range(third.space.size))
    if associator is None:
        for p1 in maps_a:
            for p2 in maps_b:
                before = tensored(tensored(p1, p2), identity_c, left_assoc)
                after = tensored(p1, tensored(p2, identity_c, bc), right_assoc)
                if then(before, x_alpha.points) != then(x_alpha.points, after):
                    associator = {"phi": [list(p1), list(p2)]}
                    break
            if associator:
                break
    results.append(CheckResult(claim=claims[1], holds=associator is None, witness=associator,
                               details={"third_factor_size": 1,
                                        "coverage": "coherence is checked against a one-point third factor only"}))
    return results


def _isomorphism_problem(induced: InducedMap) -> Optional[Dict]:
    """None when the map is a bijection carrying tests onto tests."""
    if not induced.injective or len(induced.points) != induced.target.size:
        return {"reason": "not a bijection"}
    images = {induced.image_of(t) for t in induced.source.test_masks}
    if images != set(induced.target.test_masks):
        return {"reason": "tests are not carried onto tests"}
    return None


# --- Pathologies of the grid and graph extensions ---

def pathology_witnesses(labels_a: Sequence[Any] = ("a", "b"), labels_b: Sequence[Any] = ("u1", "u2"),
                        ext: Optional[str] = None) -> List[CheckResult]:
    """Signaling grid state, a block sub-grid product test, and a graph product weight failing a test sum."""
    results = []
    a0, a1 = labels_a[0], labels_a[1]
    u1, u2 = labels_b[0], labels_b[1]
    if ext in (None, "grid"):
        grid = tensor_space(get_extension("grid"), labels_a, labels_b, generic=False)
        space = grid.space
        perm = {(a0, u1): (a0, u1), (a0, u2): (a1, u2), (a1, u1): (a1, u1), (a1, u2): (a0, u2)}
        for x in labels_a[2:]:
            for u in labels_b:
                perm[(x, u)] = (x, u)
        for u in labels_b[2:]:
            for x in labels_a[:2]:
                perm[(x, u)] = (x, u)
        weights = [1 if perm[p] == q else 0 for p, q in space.outcomes]
        state = validate_weight(space, weights)
        x = grid.left.space.index((a0, a0))

        def row_sum(u):
            return sum((state.weights[grid.pair(x, grid.right.space.index((u, v)))] for v in labels_b), 0)

        first, second = row_sum(u1), row_sum(u2)
        results.append(CheckResult(
            claim="grid-signaling", holds=first != second,
            witness={"outcome": label_text((a0, a0)), "rows": [label_text(u1), label_text(u2)],
                     "marginals": [rational_text(first), rational_text(second)]},
            details={"state": [label_text(o) for o, w in zip(space.outcomes, weights) if w]}))

        row = grid.left.space.mask([(a0, y) for y in labels_a])
        column = grid.right.space.mask([(u, u1) for u in labels_b])
        image = grid.product_test(row, column)
        results.append(CheckResult(claim="grid-block-subgrid", holds=image not in set(space.test_masks),
                                   witness={"image": space.text_of(image)}))
    if ext in (None, "graph"):
        graph = tensor_space(get_extension("graph"), labels_a, labels_b, generic=False)
        space = graph.space
        weights = [0] * space.size
        for i, (x, y) in enumerate(graph.left.space.outcomes):
            for j, (u, v) in enumerate(graph.right.space.outcomes):
                weights[graph.pair(i, j)] = (1 if x == a0 else 0) * (1 if v == u1 else 0)
        sums = test_sums(space, weights)
        worst = max(range(len(sums)), key=lambda t: sums[t])
        results.append(CheckResult(
            claim="graph-row-column-sum", holds=sums[worst] != 1,
            witness={"test": space.text_of(space.test_masks[worst]), "sum": rational_text(sums[worst])},
            details={"row_state": label_text(a0), "column_state": label_text(u1)}))
    return results
