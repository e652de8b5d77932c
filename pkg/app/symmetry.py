# app/symmetry.py
"""
The Basic Construction A(G, H, K) and symmetry analysis of G-test spaces.

A group acts on a test space through a function act(g, i) -> j on outcome
indices. H is always handed over as an injective GroupHom S(E) -> G.
"""

from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from app.config import get_settings
from app.errors import CapExceeded, Condition1Violated, NotInjective, NotTransitive, NotWellDefined, SeedNotAState
from app.groups import CosetSpace, FiniteGroup, GroupElement, GroupHom, left_cosets, orbit, quotient_group
from app.labels import label_text
from app.logging_config import get_logger
from app.polytope import rank
from app.states import ProbWeight, is_state, rational_text
from app.testspace import TestSpace, mask_of

logger = get_logger("symmetry")

Action = Callable[[GroupElement, int], int]


class SymmetryCheck(BaseModel):
    holds: bool
    witness: Optional[Dict[str, Any]] = None


def _implemented(space: TestSpace, group: FiniteGroup, act: Action, cap: int) -> Tuple[Dict, Optional[Dict]]:
    """(source test, target test, images of the source members) -> implementing elements."""
    work = group.order * len(space.tests)
    if work > cap:
        raise CapExceeded(f"symmetry scan of {work} (element, test) pairs", cap)
    test_index = {m: t for t, m in enumerate(space.test_masks)}
    implemented: Dict[Tuple[int, int, Tuple[int, ...]], List[GroupElement]] = {}
    for g in group.elements:
        for s, test in enumerate(space.tests):
            images = tuple(act(g, i) for i in test)
            t = test_index.get(mask_of(images))
            if t is None:
                return implemented, {"element": repr(g), "test": [label_text(space.outcomes[i]) for i in test],
                                     "reason": "image is not a test"}
            implemented.setdefault((s, t, images), []).append(g)
    return implemented, None


def check_full_symmetry(space: TestSpace, group: FiniteGroup, act: Action, cap: Optional[int] = None) -> SymmetryCheck:
    """Every bijection between two tests is implemented by some group element."""
    cap = cap if cap is not None else get_settings().max_bijection_checks
    if not space.is_equicardinal():
        return SymmetryCheck(holds=False, witness={"reason": "tests have different sizes"})
    n = len(space.tests[0])
    if len(space.tests) ** 2 * factorial(n) > cap:
        raise CapExceeded(f"{len(space.tests)}^2 * {n}! test bijections", cap)
    implemented, broken = _implemented(space, group, act, cap)
    if broken:
        return SymmetryCheck(holds=False, witness=broken)
    for s, source in enumerate(space.tests):
        for t, target in enumerate(space.tests):
            for images in permutations(target):
                if (s, t, images) not in implemented:
                    mapping = {label_text(space.outcomes[i]): label_text(space.outcomes[j])
                               for i, j in zip(source, images)}
                    return SymmetryCheck(holds=False, witness={"bijection": mapping})
    return SymmetryCheck(holds=True)


def check_strong_symmetry(space: TestSpace, group: FiniteGroup, act: Action,
                          cap: Optional[int] = None) -> SymmetryCheck:
    """Full symmetry with a unique implementing element for every bijection."""
    full = check_full_symmetry(space, group, act, cap)
    if not full.holds:
        return full
    implemented, _ = _implemented(space, group, act, cap if cap is not None else get_settings().max_bijection_checks)
    for (s, t, images), elements in sorted(implemented.items(), key=lambda item: item[0]):
        if len(elements) > 1:
            mapping = {label_text(space.outcomes[i]): label_text(space.outcomes[j])
                       for i, j in zip(space.tests[s], images)}
            return SymmetryCheck(holds=False, witness={"bijection": mapping, "implementers": len(elements),
                                                       "elements": [repr(g) for g in elements[:2]]})
    return SymmetryCheck(holds=True)


class ConstructionData:
    """X = G/K with E embedded by phi(h x0) = hK, and the test space orbit(G, phi(E))."""

    def __init__(self, group: FiniteGroup, embed: GroupHom, subgroup: FiniteGroup, base_labels: Sequence[Any],
                 base_point: int, cosets: CosetSpace, phi: Tuple[int, ...], space: TestSpace,
                 test_witnesses: List[Tuple[int, GroupElement]]):
        self.group = group
        self.embed = embed
        self.subgroup = subgroup
        self.base_labels = tuple(base_labels)
        self.base_point = base_point
        self.cosets = cosets
        self.phi = phi
        self.space = space
        self.test_witnesses = test_witnesses
        self.certificate: Optional[SymmetryCheck] = None

    @property
    def base_test(self) -> int:
        return mask_of(self.phi)

    @property
    def h_subgroup(self) -> FiniteGroup:
        return self.embed.image(name="H")

    def act(self, g: GroupElement, point: int) -> int:
        return self.cosets.act(g, point)

    def witness_for(self, test_mask: int) -> GroupElement:
        """Some g with g phi(E) equal to the given test."""
        for mask, g in self.test_witnesses:
            if mask == test_mask:
                return g
        raise KeyError(test_mask)

    def orbit_size_matches(self) -> bool:
        """|E| == |H| / |H n K|."""
        h = self.h_subgroup
        return len(self.base_labels) * h.intersection(self.subgroup).order == h.order

    def full_symmetry(self) -> SymmetryCheck:
        if self.certificate is None:
            self.certificate = check_full_symmetry(self.space, self.group, self.act)
        return self.certificate


def basic_construction(group: FiniteGroup, embed: GroupHom, subgroup: FiniteGroup, base_labels: Sequence[Any],
                       base_point: int = 0, point_label: Optional[Callable[[int, GroupElement], Any]] = None,
                       name: str = "", certify: bool = True) -> ConstructionData:
    """
    Builds A(G, H, K) for H = embed(S(E)). point_label(k, rep) names the
    k-th coset point from its least representative; the default is "x<k>".
    """
    if not embed.injective:
        raise NotInjective("H must be an isomorphic copy of S(E)")
    reached = {x for x, _ in orbit(embed.domain, base_point, lambda s, x: s.act(x))}
    if len(reached) != len(base_labels):
        missing = min(set(range(len(base_labels))) - reached)
        raise NotTransitive(f"H does not move {label_text(base_labels[base_point])} to "
                            f"{label_text(base_labels[missing])}", witness=missing)
    stabilizer = {embed(s) for s in embed.domain.elements if s.act(base_point) == base_point}
    h_elements = set(embed.mapping.values())
    in_k = {h for h in h_elements if h in subgroup}
    if in_k != stabilizer:
        odd = sorted(in_k ^ stabilizer)[0]
        raise Condition1Violated(f"K n H differs from the stabilizer of the base point at {odd!r}", witness=odd)

    cosets = left_cosets(group, subgroup)
    phi_map: Dict[int, int] = {}
    for s in embed.domain.elements:
        x = s.act(base_point)
        point = cosets.point_of(embed(s))
        if phi_map.setdefault(x, point) != point:
            raise NotWellDefined(f"phi({label_text(base_labels[x])}) is not well defined")
    phi = tuple(phi_map[x] for x in range(len(base_labels)))
    if len(set(phi)) != len(phi):
        raise NotInjective("phi identifies two base outcomes")
    for s in embed.domain.generators:
        for x in range(len(base_labels)):
            if phi[s.act(x)] != cosets.act(embed(s), phi[x]):
                raise NotWellDefined(f"phi is not H-equivariant at {label_text(base_labels[x])}")

    members = orbit(group, frozenset(phi), cosets.act)
    labels = tuple((point_label or (lambda k, rep: f"x{k}"))(k, rep) for k, rep in enumerate(cosets.points))
    space = TestSpace(name=name or f"A({group.name})", outcomes=labels, tests=[sorted(m) for m, _ in members])
    witnesses = [(mask_of(m), g) for m, g in members]
    data = ConstructionData(group, embed, subgroup, base_labels, base_point, cosets, phi, space, witnesses)
    logger.info("basic construction %s: %d points, %d tests", space.name, space.size, len(space.tests))
    if certify:
        data.full_symmetry()
    return data


def strongify(data: ConstructionData, name: str = "") -> Tuple[ConstructionData, SymmetryCheck]:
    """
    G' = N(F)/F, H' = HF/F, K' = (N n K)F/F with F the pointwise stabilizer
    of phi(E). Returns the new construction and its strong-symmetry check.
    """
    group = data.group
    fixer = group.pointwise_stabilizer(data.act, data.phi, name="F")
    normalizer = group.normalizer(fixer, name="N(F)")
    quotient, project = quotient_group(normalizer, fixer, name=f"{group.name}'")
    mapping = {s: project(h) for s, h in data.embed.mapping.items()}
    embed = GroupHom(data.embed.domain, quotient, mapping, {s: mapping[s] for s in data.embed.domain.generators})
    k_elements = sorted({project(k) for k in data.subgroup.elements if k in normalizer})
    k_prime = FiniteGroup(k_elements, identity=quotient.identity, name="K'", elements=k_elements)
    logger.info("strongify: |F|=%d, |N(F)|=%d, |G'|=%d, |K'|=%d",
                fixer.order, normalizer.order, quotient.order, k_prime.order)
    result = basic_construction(quotient, embed, k_prime, data.base_labels, data.base_point,
                                name=name or f"{data.space.name}'", certify=False)
    return result, check_strong_symmetry(result.space, result.group, result.act)


class SymmetricModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    space: TestSpace
    vertices: Tuple[ProbWeight, ...]
    witnesses: Tuple[Any, ...]
    invariant: bool


def act_on_weights(act: Action, g: GroupElement, weights: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    """(g alpha)(x) = alpha(g^-1 x)."""
    inverse = g.inverse()
    return tuple(weights[act(inverse, x)] for x in range(len(weights)))


def orbit_model(space: TestSpace, group: FiniteGroup, act: Action, seed: ProbWeight) -> SymmetricModel:
    """Gamma = hull of the orbit of the seed; the orbit points are its extreme points."""
    if not is_state(space, seed.weights):
        raise SeedNotAState(f"seed {seed.as_strings()} is not a state of {space.name}")
    members = orbit(group, seed.weights, lambda g, w: act_on_weights(act, g, w))
    members = sorted(members, key=lambda item: item[0], reverse=True)
    weights = {w for w, _ in members}
    invariant = all(act_on_weights(act, g, w) in weights for g in group.generators for w in weights)
    return SymmetricModel(space=space, vertices=tuple(ProbWeight(space=space, weights=w) for w, _ in members),
                          witnesses=tuple(g for _, g in members), invariant=invariant)


class InvariantInnerProduct:
    """<alpha, beta> = sum over g in G of alpha(g x0) beta(g x0)."""

    def __init__(self, model: SymmetricModel, group: FiniteGroup, act: Action, base_point: int):
        self.model = model
        self.group = group
        self.act = act
        self.base_point = base_point
        self.images = [act(g, base_point) for g in group.elements]
        self.basis: List[ProbWeight] = []
        for v in model.vertices:
            if rank([b.weights for b in self.basis] + [v.weights]) > len(self.basis):
                self.basis.append(v)
        self.gram = [[self.inner(a.weights, b.weights) for b in self.basis] for a in self.basis]

    def inner(self, alpha: Sequence[Fraction], beta: Sequence[Fraction]) -> Fraction:
        return sum((alpha[x] * beta[x] for x in self.images), Fraction(0))

    def positivity_failures(self) -> List[Tuple[int, int]]:
        vs = self.model.vertices
        return [(i, j) for i in range(len(vs)) for j in range(len(vs)) if self.inner(vs[i].weights, vs[j].weights) < 0]

    def invariance_failures(self) -> List[Tuple[str, int, int]]:
        vs = [v.weights for v in self.model.vertices]
        failures = []
        for g in self.group.generators:
            for i, a in enumerate(vs):
                for j, b in enumerate(vs):
                    ga, gb = act_on_weights(self.act, g, a), act_on_weights(self.act, g, b)
                    if self.inner(ga, gb) != self.inner(a, b):
                        failures.append((repr(g), i, j))
        return failures

    def gram_strings(self) -> List[List[str]]:
        return [[rational_text(v) for v in row] for row in self.gram]


def invariant_inner_product(model: SymmetricModel, group: FiniteGroup, act: Action,
                            base_point: int = 0) -> InvariantInnerProduct:
    return InvariantInnerProduct(model, group, act, base_point)
