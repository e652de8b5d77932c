# app/groups.py
"""
Finite groups given by generators.

Elements carry a structural normal form (a nested tuple of ints) and are
compared, hashed and ordered by it alone. Three families are built in:

    Perm      one-line permutation of range(n)
    PermPair  (p1, p2), componentwise product; the graph extension's S(A) x S(A)
    FlipPair  (p1, p2, k); (S(A) x S(A)) extended by the transpose flag k

All products read right to left: (g * h)(x) == g(h(x)).
"""

from itertools import permutations
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from app.config import get_settings
from app.errors import ActionUndefined, CapExceeded, NotASubgroup, NotInjective, NotWellDefined
from app.logging_config import get_logger

logger = get_logger("groups")


def compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(p[i] for i in q)


def invert(p: Tuple[int, ...]) -> Tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def identity_perm(n: int) -> Tuple[int, ...]:
    return tuple(range(n))


def induced_perm(sigma: Tuple[int, ...], index_map: Sequence[int], degree: int) -> Tuple[int, ...]:
    """S(f)(sigma) for an injection f given as index_map[i] = f(i) in range(degree)."""
    image = list(range(degree))
    for i, j in enumerate(index_map):
        image[j] = index_map[sigma[i]]
    return tuple(image)


class GroupElement:
    """Abstract element; subclasses define the product, inverse and action."""

    __slots__ = ("normal_form",)
    family = "abstract"

    def __init__(self, normal_form):
        self.normal_form = normal_form

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        raise NotImplementedError

    def inverse(self) -> "GroupElement":
        raise NotImplementedError

    def identity(self) -> "GroupElement":
        raise NotImplementedError

    def act(self, point: Any) -> Any:
        raise ActionUndefined(f"{self.family} elements have no natural action")

    def is_identity(self) -> bool:
        return self == self.identity()

    def key(self):
        return (self.family, self.normal_form)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __lt__(self, other: "GroupElement") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        return f"{type(self).__name__}{self.normal_form}"


class Perm(GroupElement):
    __slots__ = ()
    family = "perm"

    def __mul__(self, other):
        return Perm(compose(self.normal_form, other.normal_form))

    def inverse(self):
        return Perm(invert(self.normal_form))

    def identity(self):
        return Perm(identity_perm(len(self.normal_form)))

    def act(self, point: int) -> int:
        return self.normal_form[point]

    @property
    def degree(self) -> int:
        return len(self.normal_form)


class PermPair(GroupElement):
    __slots__ = ()
    family = "perm-pair"

    def __mul__(self, other):
        (p1, p2), (q1, q2) = self.normal_form, other.normal_form
        return PermPair((compose(p1, q1), compose(p2, q2)))

    def inverse(self):
        p1, p2 = self.normal_form
        return PermPair((invert(p1), invert(p2)))

    def identity(self):
        n = len(self.normal_form[0])
        return PermPair((identity_perm(n), identity_perm(n)))

    def act(self, point: Tuple[int, int]) -> Tuple[int, int]:
        p1, p2 = self.normal_form
        return (p1[point[0]], p2[point[1]])


class FlipPair(GroupElement):
    """(p1, p2, k) acting on pairs by (x, y) -> (p1 x, p2 y), after a transpose when k = 1."""

    __slots__ = ()
    family = "flip-pair"

    def __mul__(self, other):
        p1, p2, k = self.normal_form
        q1, q2, l = other.normal_form
        if k == 0:
            return FlipPair((compose(p1, q1), compose(p2, q2), l))
        return FlipPair((compose(p1, q2), compose(p2, q1), 1 - l))

    def inverse(self):
        p1, p2, k = self.normal_form
        if k == 0:
            return FlipPair((invert(p1), invert(p2), 0))
        return FlipPair((invert(p2), invert(p1), 1))

    def identity(self):
        n = len(self.normal_form[0])
        return FlipPair((identity_perm(n), identity_perm(n), 0))

    def act(self, point: Tuple[int, int]) -> Tuple[int, int]:
        p1, p2, k = self.normal_form
        x, y = point if k == 0 else (point[1], point[0])
        return (p1[x], p2[y])


class QuotientElement(GroupElement):
    """Coset gN of a normal subgroup N, normalized to its least member."""

    __slots__ = ("normal_subgroup", "_rep")
    family = "quotient"

    def __init__(self, representative: GroupElement, normal_subgroup: Tuple[GroupElement, ...]):
        least = min(representative * n for n in normal_subgroup)
        super().__init__(least.key())
        self.normal_subgroup = normal_subgroup
        self._rep = least

    @property
    def representative(self) -> GroupElement:
        return self._rep

    def __mul__(self, other):
        return QuotientElement(self._rep * other._rep, self.normal_subgroup)

    def inverse(self):
        return QuotientElement(self._rep.inverse(), self.normal_subgroup)

    def identity(self):
        return QuotientElement(self._rep.identity(), self.normal_subgroup)


def element_family(element: GroupElement) -> Tuple[str, int]:
    nf = element.normal_form
    if isinstance(element, Perm):
        return (element.family, len(nf))
    if isinstance(element, (PermPair, FlipPair)):
        return (element.family, len(nf[0]))
    return (element.family, 0)


def as_permutation(element: GroupElement) -> Tuple[int, ...]:
    """One-line form on range(n), or on the pairs of range(n) numbered x * n + y."""
    if isinstance(element, Perm):
        return element.normal_form
    if isinstance(element, (PermPair, FlipPair)):
        n = len(element.normal_form[0])
        return tuple(x * n + y for x, y in (element.act(divmod(i, n)) for i in range(n * n)))
    raise ActionUndefined(f"{element.family} elements have no permutation form")


class FiniteGroup:
    """A group given by generators; the element list is closed on demand."""

    def __init__(self, generators: Sequence[GroupElement], identity: Optional[GroupElement] = None,
                 name: str = "", cap: Optional[int] = None, elements: Optional[Sequence[GroupElement]] = None):
        if identity is None:
            if not generators:
                raise ValueError("a group without generators needs an explicit identity")
            identity = generators[0].identity()
        self.generators: Tuple[GroupElement, ...] = tuple(generators)
        self.identity = identity
        self.name = name
        self.cap = cap if cap is not None else get_settings().max_group
        self._elements: Optional[Tuple[GroupElement, ...]] = tuple(sorted(elements)) if elements is not None else None
        self._element_set = frozenset(self._elements) if self._elements is not None else None

    @property
    def is_enumerated(self) -> bool:
        return self._elements is not None

    @property
    def elements(self) -> Tuple[GroupElement, ...]:
        if self._elements is None:
            enumerated = _bfs_closure(self.generators, self.identity, self.cap, self.name)
            self._elements = tuple(sorted(enumerated))
            self._element_set = frozenset(enumerated)
        return self._elements

    @property
    def element_set(self) -> frozenset:
        self.elements
        return self._element_set

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, element: GroupElement) -> bool:
        return element in self.element_set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        size = len(self._elements) if self._elements is not None else "?"
        return f"FiniteGroup({self.name or 'unnamed'}, order={size})"

    def intersection(self, other: "FiniteGroup", name: str = "") -> "FiniteGroup":
        common = [g for g in self.elements if g in other]
        return FiniteGroup(common, identity=self.identity, name=name, elements=common)

    def subgroup(self, generators: Sequence[GroupElement], name: str = "") -> "FiniteGroup":
        return closure(generators, cap=self.cap, identity=self.identity, name=name)

    def filter(self, predicate: Callable[[GroupElement], bool], name: str = "") -> "FiniteGroup":
        """The subgroup of elements satisfying a predicate already known to define a subgroup."""
        chosen = [g for g in self.elements if predicate(g)]
        return FiniteGroup(chosen, identity=self.identity, name=name, elements=chosen)

    def stabilizer(self, act: Callable[[GroupElement, Any], Any], point: Any, name: str = "") -> "FiniteGroup":
        return self.filter(lambda g: act(g, point) == point, name=name)

    def pointwise_stabilizer(self, act: Callable[[GroupElement, Any], Any], points: Iterable[Any],
                             name: str = "") -> "FiniteGroup":
        points = tuple(points)
        return self.filter(lambda g: all(act(g, p) == p for p in points), name=name)

    def normalizer(self, subgroup: "FiniteGroup", name: str = "") -> "FiniteGroup":
        members = subgroup.element_set
        gens = subgroup.generators or (subgroup.identity,)
        return self.filter(lambda g: all(g * s * g.inverse() in members for s in gens), name=name)


def _bfs_closure(generators: Sequence[GroupElement], identity: GroupElement, cap: int, name: str) -> set:
    elements = {identity}
    elements.update(generators)
    frontier = list(elements)
    while frontier:
        next_frontier = []
        for a in generators:
            for b in frontier:
                c = a * b
                if c not in elements:
                    elements.add(c)
                    next_frontier.append(c)
                    if len(elements) > cap:
                        logger.warning("closure of %s passed %d elements", name or "group", cap)
                        raise CapExceeded(f"closure of {name or 'group'}", cap)
        frontier = next_frontier
    logger.info("closed %s: %d elements", name or "group", len(elements))
    return elements


def closure(generators: Sequence[GroupElement], cap: Optional[int] = None,
            identity: Optional[GroupElement] = None, name: str = "") -> FiniteGroup:
    """Breadth-first closure; the element list comes back sorted by normal form."""
    families = {element_family(g) for g in generators}
    if identity is not None:
        families.add(element_family(identity))
    if len(families) > 1:
        raise ValueError(f"generators mix normal-form families: {sorted(families)}")
    group = FiniteGroup(generators, identity=identity, name=name, cap=cap)
    group.elements
    return group


def symmetric_group(n: int, name: str = "") -> FiniteGroup:
    """S(n) on range(n), generated by adjacent transpositions."""
    gens = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(Perm(tuple(p)))
    if n <= 8:
        elements = [Perm(p) for p in permutations(range(n))]
        return FiniteGroup(gens, identity=Perm(identity_perm(n)), name=name or f"S{n}", elements=elements)
    return FiniteGroup(gens, identity=Perm(identity_perm(n)), name=name or f"S{n}")


def _lift_action(act: Callable[[GroupElement, Any], Any], seed: Any) -> Tuple[Callable, Any]:
    if isinstance(seed, frozenset):
        return (lambda g, s: frozenset(act(g, x) for x in s)), seed
    return act, seed


def orbit(group: FiniteGroup, seed: Any, act: Callable[[GroupElement, Any], Any]
          ) -> List[Tuple[Any, GroupElement]]:
    """
    Orbit of a point (or of a frozenset of points, acted on pointwise) with,
    for each member, one element carrying the seed to it. Sorted by member.
    """
    lifted, start = _lift_action(act, seed)
    witnesses: Dict[Hashable, GroupElement] = {start: group.identity}
    frontier = [start]
    gens = group.generators
    while frontier:
        next_frontier = []
        for point in frontier:
            for g in gens:
                try:
                    image = lifted(g, point)
                except (KeyError, IndexError, TypeError) as exc:
                    raise ActionUndefined(f"action undefined for {g!r} on {point!r}: {exc}")
                if image not in witnesses:
                    witnesses[image] = g * witnesses[point]
                    next_frontier.append(image)
        frontier = next_frontier
    return sorted(witnesses.items(), key=lambda item: _orbit_key(item[0]))


def _orbit_key(member: Any):
    if isinstance(member, frozenset):
        return (len(member), tuple(sorted(member)))
    return (0, member)


class CosetSpace:
    """Left cosets gK; points are the least elements of their cosets, in order."""

    def __init__(self, group: FiniteGroup, subgroup: FiniteGroup):
        self.group = group
        self.subgroup = subgroup
        self.coset_index: Dict[GroupElement, int] = {}
        points: List[GroupElement] = []
        members = subgroup.elements
        for g in group.elements:
            if g in self.coset_index:
                continue
            index = len(points)
            points.append(g)
            for k in members:
                self.coset_index[g * k] = index
        self.points: Tuple[GroupElement, ...] = tuple(points)
        self.action_table: Dict[GroupElement, Tuple[int, ...]] = {
            g: self.permutation(g) for g in group.generators
        }

    def __len__(self) -> int:
        return len(self.points)

    def act(self, g: GroupElement, point: int) -> int:
        return self.coset_index[g * self.points[point]]

    def point_of(self, g: GroupElement) -> int:
        """The coset gK as a point index."""
        return self.coset_index[g]

    def permutation(self, g: GroupElement) -> Tuple[int, ...]:
        return tuple(self.coset_index[g * rep] for rep in self.points)


def left_cosets(group: FiniteGroup, subgroup: FiniteGroup) -> CosetSpace:
    if not all(k in group for k in subgroup.elements):
        raise NotASubgroup(f"{subgroup!r} is not contained in {group!r}")
    return CosetSpace(group, subgroup)


class GroupHom:
    """A homomorphism recorded on every domain element."""

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, mapping: Dict[GroupElement, GroupElement],
                 generator_images: Dict[GroupElement, GroupElement]):
        self.domain = domain
        self.codomain = codomain
        self.mapping = mapping
        self.generator_images = generator_images
        self.injective = len(set(mapping.values())) == len(mapping)

    def __call__(self, g: GroupElement) -> GroupElement:
        return self.mapping[g]

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner."""
        mapping = {g: self.mapping[h] for g, h in inner.mapping.items()}
        gen_images = {g: mapping[g] for g in inner.domain.generators}
        return GroupHom(inner.domain, self.codomain, mapping, gen_images)

    def kernel(self) -> List[GroupElement]:
        return sorted(g for g, h in self.mapping.items() if h == self.codomain.identity)

    def image(self, name: str = "") -> FiniteGroup:
        values = sorted(set(self.mapping.values()))
        return FiniteGroup(values, identity=self.codomain.identity, name=name, elements=values)


def hom_extend(generator_images: Dict[GroupElement, GroupElement], domain: FiniteGroup, codomain: FiniteGroup,
               require_injective: bool = False) -> GroupHom:
    """
    Extends generator images multiplicatively over the whole domain, checking
    hom[a * b] == hom[a] * hom[b] for every generator a and element b.
    """
    for g in domain.generators:
        if g not in generator_images:
            raise NotWellDefined(f"no image given for generator {g!r}")
    hom: Dict[GroupElement, GroupElement] = {domain.identity: codomain.identity}
    for g in domain.generators:
        image = generator_images[g]
        if g in hom and hom[g] != image:
            raise NotWellDefined(f"{g!r} maps to both {hom[g]!r} and {image!r}", witness=(g, hom[g], image))
        hom[g] = image
    frontier = list(hom)
    while frontier:
        next_frontier = []
        for a in domain.generators:
            for b in frontier:
                c = a * b
                value = hom[a] * hom[b]
                if c not in hom:
                    hom[c] = value
                    next_frontier.append(c)
                elif hom[c] != value:
                    raise NotWellDefined(f"{c!r} maps to both {hom[c]!r} and {value!r}", witness=(c, hom[c], value))
        frontier = next_frontier
    if codomain.is_enumerated:
        stray = [g for g, h in hom.items() if h not in codomain]
        if stray:
            raise NotWellDefined(f"image of {stray[0]!r} lies outside {codomain!r}", witness=stray[0])
    result = GroupHom(domain, codomain, hom, {g: hom[g] for g in domain.generators})
    if require_injective and not result.injective:
        raise NotInjective(f"kernel of the map {domain!r} -> {codomain!r} is nontrivial",
                           witness=[g for g in result.kernel() if g != domain.identity][0])
    return result


def centralizes(g: GroupElement, h: GroupElement) -> bool:
    return g * h == h * g


def quotient_group(group: FiniteGroup, normal: FiniteGroup, name: str = "") -> Tuple[FiniteGroup, Callable]:
    """G/N together with the projection g -> gN."""
    members = normal.elements
    project = lambda g: QuotientElement(g, members)  # noqa: E731
    gens = sorted({project(g) for g in group.generators})
    elements = sorted({project(g) for g in group.elements})
    quotient = FiniteGroup(gens, identity=project(group.identity), name=name, elements=elements)
    return quotient, project
