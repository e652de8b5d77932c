# app/testspace.py
"""
Test spaces, events, the orthogonality / perspectivity calculus, the logic
of an algebraic test space and test-space morphisms.

Inside this module an event is an int bitmask over outcome indices; bit i
set means outcome i belongs to the event.
"""

from functools import lru_cache
from itertools import permutations
from typing import Any, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from app.config import get_settings
from app.errors import CapExceeded, EmptySet, MorphismMismatch, NotAlgebraic, TestSpaceError
from app.labels import label_text
from app.logging_config import get_logger

logger = get_logger("testspace")


def bits(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def event_key(mask: int) -> Tuple[int, Tuple[int, ...]]:
    """Canonical event order: by size, then by sorted member indices."""
    members = bits(mask)
    return (len(members), members)


class TestSpace(BaseModel):
    """A finite outcome set with a family of non-empty tests covering it."""

    model_config = ConfigDict(frozen=True)

    name: str = ""
    outcomes: Tuple[Any, ...]
    tests: Tuple[Tuple[int, ...], ...]

    _index: Dict[Any, int] = PrivateAttr(default_factory=dict)
    _test_masks: Tuple[int, ...] = PrivateAttr(default=())

    @model_validator(mode="before")
    @classmethod
    def normalize_tests(cls, data: Any) -> Any:
        if isinstance(data, dict) and "tests" in data:
            normalized = {tuple(sorted(set(int(i) for i in test))) for test in data["tests"]}
            data = dict(data)
            data["tests"] = tuple(sorted(normalized, key=lambda t: (len(t), t)))
        return data

    @model_validator(mode="after")
    def check_tests(self) -> "TestSpace":
        n = len(self.outcomes)
        if len(set(self.outcomes)) != n:
            raise TestSpaceError(f"duplicate outcome labels in {self.name or 'test space'}")
        covered = set()
        for test in self.tests:
            if not test:
                raise TestSpaceError("tests must be non-empty")
            if test[0] < 0 or test[-1] >= n:
                raise TestSpaceError(f"test {test} refers to an unknown outcome")
            covered.update(test)
        if len(covered) != n:
            orphan = min(set(range(n)) - covered)
            raise TestSpaceError(f"outcome {label_text(self.outcomes[orphan])} lies in no test")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._index = {label: i for i, label in enumerate(self.outcomes)}
        self._test_masks = tuple(mask_of(t) for t in self.tests)

    @property
    def size(self) -> int:
        return len(self.outcomes)

    @property
    def test_masks(self) -> Tuple[int, ...]:
        return self._test_masks

    def index(self, label: Any) -> int:
        return self._index[label]

    def mask(self, labels: Iterable[Any]) -> int:
        return mask_of(self._index[label] for label in labels)

    def labels_of(self, mask: int) -> Tuple[Any, ...]:
        return tuple(self.outcomes[i] for i in bits(mask))

    def text_of(self, mask: int) -> str:
        return "{" + ",".join(label_text(x) for x in self.labels_of(mask)) + "}"

    def test_labels(self) -> List[Tuple[Any, ...]]:
        return [tuple(self.outcomes[i] for i in test) for test in self.tests]

    def relabel(self, mapping: Dict[Any, Any], name: Optional[str] = None) -> "TestSpace":
        """The same space with outcome labels replaced (outcome order kept)."""
        return TestSpace(name=self.name if name is None else name,
                         outcomes=tuple(mapping[x] for x in self.outcomes), tests=self.tests)

    def is_equicardinal(self) -> bool:
        return len({len(t) for t in self.tests}) <= 1


class Event(NamedTuple):
    mask: int
    witness_test: int


# --- Builders ---

def build_classical(labels: Sequence[Any], name: str = "") -> TestSpace:
    labels = tuple(labels)
    if not labels:
        raise EmptySet("a classical test space needs at least one outcome")
    return TestSpace(name=name or f"classical{len(labels)}", outcomes=labels, tests=[list(range(len(labels)))])


def build_grid(labels: Sequence[Any], name: str = "") -> TestSpace:
    """Outcomes E x E; tests are the rows and the columns."""
    labels = tuple(labels)
    if not labels:
        raise EmptySet("a grid needs at least one row")
    n = len(labels)
    outcomes = tuple((x, y) for x in labels for y in labels)
    rows = [[i * n + j for j in range(n)] for i in range(n)]
    columns = [[i * n + j for i in range(n)] for j in range(n)]
    return TestSpace(name=name or f"grid{n}", outcomes=outcomes, tests=rows + columns)


def build_graph(labels: Sequence[Any], name: str = "", cap: Optional[int] = None) -> TestSpace:
    """Outcomes E x E; tests are the graphs of the permutations of E."""
    labels = tuple(labels)
    if not labels:
        raise EmptySet("a graph test space needs a non-empty base set")
    n = len(labels)
    cap = cap if cap is not None else get_settings().max_group
    count = 1
    for k in range(2, n + 1):
        count *= k
    if count > cap:
        raise CapExceeded(f"{n}! graph tests", cap)
    outcomes = tuple((x, y) for x in labels for y in labels)
    tests = [[i * n + f[i] for i in range(n)] for f in permutations(range(n))]
    return TestSpace(name=name or f"graph{n}", outcomes=outcomes, tests=tests)


def build_triangle(name: str = "triangle") -> TestSpace:
    return TestSpace(name=name, outcomes=("a", "b", "c"), tests=[[0, 1], [1, 2], [0, 2]])


def direct_sum(first: TestSpace, second: TestSpace, name: str = "") -> TestSpace:
    """Outcomes X + Y (tagged 0/1 when labels clash); tests E u F."""
    if set(first.outcomes) & set(second.outcomes):
        outcomes = tuple((0, x) for x in first.outcomes) + tuple((1, y) for y in second.outcomes)
    else:
        outcomes = first.outcomes + second.outcomes
    shift = first.size
    tests = [list(e) + [shift + j for j in f] for e in first.tests for f in second.tests]
    return TestSpace(name=name or f"{first.name}+{second.name}", outcomes=outcomes, tests=tests)


# --- Events and relations ---

class EventStructure:
    """Events of a space with their complement sets, computed once per space."""

    def __init__(self, space: TestSpace, cap: int):
        total = sum(1 << len(t) for t in space.tests)
        if total > cap:
            logger.warning("%s: %d candidate events over the cap", space.name, total)
            raise CapExceeded(f"event enumeration of {space.name or 'test space'} ({total} subsets)", cap)
        witnesses: Dict[int, int] = {}
        for t_index, test_mask in enumerate(space.test_masks):
            sub = test_mask
            while True:
                if sub not in witnesses:
                    witnesses[sub] = t_index
                if sub == 0:
                    break
                sub = (sub - 1) & test_mask
        self.space = space
        self.events: List[Event] = [Event(m, witnesses[m]) for m in sorted(witnesses, key=event_key)]
        self.event_set: FrozenSet[int] = frozenset(witnesses)
        self.test_set: FrozenSet[int] = frozenset(space.test_masks)
        self._complements: Dict[int, FrozenSet[int]] = {}
        # events sharing the complement c, keyed by c
        self.with_complement: Dict[int, List[int]] = {}
        for e in self.events:
            comps = self.complements(e.mask)
            for c in comps:
                self.with_complement.setdefault(c, []).append(e.mask)

    def complements(self, mask: int) -> FrozenSet[int]:
        if mask not in self._complements:
            self._complements[mask] = frozenset(t & ~mask for t in self.space.test_masks if t & mask == mask)
        return self._complements[mask]

    def is_event(self, mask: int) -> bool:
        return mask in self.event_set

    def orthogonal(self, a: int, b: int) -> bool:
        return a & b == 0 and (a | b) in self.event_set

    def complementary(self, a: int, b: int) -> bool:
        return a & b == 0 and (a | b) in self.test_set

    def axis(self, a: int, b: int) -> Optional[int]:
        common = self.complements(a) & self.complements(b)
        if not common:
            return None
        return min(common, key=event_key)

    def perspective(self, a: int, b: int) -> bool:
        return bool(self.complements(a) & self.complements(b))

    def perspective_pairs(self, cap: int):
        """Every ordered perspective pair (a, b), grouped by a shared axis."""
        count = sum(len(v) ** 2 for v in self.with_complement.values())
        if count > cap:
            raise CapExceeded(f"perspective pair scan ({count} pairs)", cap)
        for axis in sorted(self.with_complement, key=event_key):
            group = self.with_complement[axis]
            for a in group:
                for b in group:
                    yield a, b, axis

    def orthogonal_pairs(self, cap: int):
        """Every ordered orthogonal pair (a, b), found as splits of an event."""
        count = sum(1 << len(bits(e.mask)) for e in self.events)
        if count > cap:
            raise CapExceeded(f"orthogonal pair scan ({count} pairs)", cap)
        for e in self.events:
            union = e.mask
            sub = union
            while True:
                yield sub, union & ~sub
                if sub == 0:
                    break
                sub = (sub - 1) & union


@lru_cache(maxsize=128)
def _structure(space: TestSpace, cap: int) -> EventStructure:
    return EventStructure(space, cap)


def event_structure(space: TestSpace, cap: Optional[int] = None) -> EventStructure:
    return _structure(space, cap if cap is not None else get_settings().max_events)


def events_of(space: TestSpace, cap: Optional[int] = None) -> List[Event]:
    return list(event_structure(space, cap).events)


class Relation(BaseModel):
    orthogonal: bool
    complementary: bool
    perspective: bool
    axis: Optional[Tuple[int, ...]] = None


def event_relation(space: TestSpace, a: int, b: int) -> Relation:
    """Flags every relation that holds between two events; perspectivity reports its first axis."""
    structure = event_structure(space)
    for m in (a, b):
        if not structure.is_event(m):
            raise TestSpaceError(f"{space.text_of(m)} is not an event of {space.name}")
    axis = structure.axis(a, b)
    return Relation(orthogonal=structure.orthogonal(a, b), complementary=structure.complementary(a, b),
                    perspective=axis is not None, axis=bits(axis) if axis is not None else None)


class AlgebraicityResult(BaseModel):
    algebraic: bool
    witness: Optional[Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]] = None


def is_algebraic(space: TestSpace, cap: Optional[int] = None) -> AlgebraicityResult:
    """
    Algebraic iff perspective events have the same complements. A witness
    (A, B, C) has A ~ B and C complementary to A but not to B.
    """
    structure = event_structure(space)
    pair_cap = cap if cap is not None else get_settings().max_event_pairs
    for a, b, _ in structure.perspective_pairs(pair_cap):
        ca, cb = structure.complements(a), structure.complements(b)
        if ca != cb:
            c = min(ca - cb, key=event_key) if ca - cb else None
            if c is None:
                a, b = b, a
                c = min(cb - ca, key=event_key)
            return AlgebraicityResult(algebraic=False, witness=(bits(a), bits(b), bits(c)))
    return AlgebraicityResult(algebraic=True)


def perspectivity_class(space: TestSpace, a: int) -> List[int]:
    """All events B with B ~ A (the raw class when the space is not algebraic)."""
    structure = event_structure(space)
    members = set()
    for c in structure.complements(a):
        members.update(structure.with_complement.get(c, ()))
    return sorted(members, key=event_key)


def class_as_test_space(space: TestSpace, a: int) -> TestSpace:
    """The perspectivity class of A read as a test space on its own outcomes."""
    members = perspectivity_class(space, a)
    used = sorted({i for m in members for i in bits(m)})
    if not used:
        raise EmptySet(f"the class of {space.text_of(a)} has no outcomes")
    position = {i: k for k, i in enumerate(used)}
    return TestSpace(name=f"{space.name}_{space.text_of(a)}", outcomes=tuple(space.outcomes[i] for i in used),
                     tests=[[position[i] for i in bits(m)] for m in members])


# --- The logic ---

class Orthoalgebra:
    """Perspectivity classes of an algebraic test space with the partial sum."""

    def __init__(self, space: TestSpace, representatives: List[int], class_of: Dict[int, int],
                 sums: Dict[Tuple[int, int], int], zero: int, unit: int, complement: List[int]):
        self.space = space
        self.representatives = representatives
        self.class_of = class_of
        self.sums = sums
        self.zero = zero
        self.unit = unit
        self.complement = complement
        self.leq = frozenset((a, s) for (a, _), s in sums.items())

    def __len__(self) -> int:
        return len(self.representatives)

    def oplus(self, a: int, b: int) -> Optional[int]:
        return self.sums.get((a, b))

    def le(self, a: int, b: int) -> bool:
        return (a, b) in self.leq

    def atoms(self) -> List[int]:
        return [a for a in range(len(self)) if a != self.zero and
                not any(self.le(b, a) for b in range(len(self)) if b not in (a, self.zero))]

    def covers(self) -> List[Tuple[int, int]]:
        """Hasse diagram edges (a, b) with a < b and nothing strictly between."""
        edges = []
        for a, b in sorted(self.leq):
            if a == b:
                continue
            if not any(c not in (a, b) and self.le(a, c) and self.le(c, b) for c in range(len(self))):
                edges.append((a, b))
        return edges

    def check_axioms(self) -> List[str]:
        """Returns the violated orthoalgebra and partial-order laws (empty when all hold)."""
        problems = []
        k = len(self)
        for (a, b), s in self.sums.items():
            if self.sums.get((b, a)) != s:
                problems.append(f"commutativity fails at ({a},{b})")
            if a == b and a != self.zero:
                problems.append(f"{a} + {a} is defined but {a} is not zero")
        for (a, b), ab in self.sums.items():
            for c in range(k):
                abc = self.sums.get((ab, c))
                if abc is None:
                    continue
                bc = self.sums.get((b, c))
                if bc is None or self.sums.get((a, bc)) != abc:
                    problems.append(f"associativity fails at ({a},{b},{c})")
        for a in range(k):
            partners = [b for b in range(k) if self.sums.get((a, b)) == self.unit]
            if partners != [self.complement[a]]:
                problems.append(f"orthocomplement of {a} is not unique: {partners}")
            if self.sums.get((a, self.zero)) != a:
                problems.append(f"{a} + 0 != {a}")
            if not (self.le(self.zero, a) and self.le(a, self.unit)):
                problems.append(f"{a} is not between zero and unit")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                problems.append(f"order is not antisymmetric at ({a},{b})")
        for a, b in self.leq:
            for c in range(k):
                if (b, c) in self.leq and (a, c) not in self.leq:
                    problems.append(f"order is not transitive at ({a},{b},{c})")
                    break
        return problems

    def is_boolean(self) -> bool:
        """True when the logic is the power set of its atoms."""
        atoms = self.atoms()
        if len(self) != 1 << len(atoms):
            return False
        below = [frozenset(t for t in atoms if self.le(t, a)) for a in range(len(self))]
        return len(set(below)) == len(self)


def build_logic(space: TestSpace, cap: Optional[int] = None) -> Orthoalgebra:
    check = is_algebraic(space, cap)
    if not check.algebraic:
        raise NotAlgebraic(f"{space.name} is not algebraic", witness=check.witness)
    structure = event_structure(space)
    pair_cap = cap if cap is not None else get_settings().max_event_pairs
    keyed: Dict[FrozenSet[int], int] = {}
    representatives: List[int] = []
    for e in structure.events:
        key = structure.complements(e.mask)
        if key not in keyed:
            keyed[key] = len(representatives)
            representatives.append(e.mask)
    class_of = {e.mask: keyed[structure.complements(e.mask)] for e in structure.events}
    sums: Dict[Tuple[int, int], int] = {}
    for a, b in structure.orthogonal_pairs(pair_cap):
        pair = (class_of[a], class_of[b])
        value = class_of[a | b]
        if sums.setdefault(pair, value) != value:
            raise NotAlgebraic(f"partial sum of classes {pair} is not single-valued",
                               witness=(bits(a), bits(b)))
    complement = [class_of[min(structure.complements(rep), key=event_key)] for rep in representatives]
    logic = Orthoalgebra(space, representatives, class_of, sums, zero=class_of[0],
                         unit=class_of[space.test_masks[0]], complement=complement)
    logger.info("logic of %s: %d elements", space.name, len(logic))
    return logic


# --- Morphisms ---

class Morphism(BaseModel):
    """Outcome x of the source goes to the event images[x] (a bitmask) of the target."""

    model_config = ConfigDict(frozen=True)

    source: TestSpace
    target: TestSpace
    images: Tuple[int, ...]

    @model_validator(mode="after")
    def check_total(self) -> "Morphism":
        if len(self.images) != self.source.size:
            raise MorphismMismatch("a morphism needs one image per source outcome")
        return self

    @property
    def point_form(self) -> bool:
        return all(len(bits(m)) == 1 for m in self.images)

    def apply(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.images[i]
        return out


def point_morphism(source: TestSpace, target: TestSpace, mapping: Dict[Any, Any]) -> Morphism:
    """A point-form morphism from a label-to-label dictionary."""
    return Morphism(source=source, target=target,
                    images=tuple(1 << target.index(mapping[x]) for x in source.outcomes))


def identity_morphism(space: TestSpace) -> Morphism:
    return Morphism(source=space, target=space, images=tuple(1 << i for i in range(space.size)))


class MorphismCheck(BaseModel):
    ok: bool
    condition: Optional[str] = None
    witness: Optional[Tuple[Tuple[int, ...], ...]] = None


def check_morphism(m: Morphism, cap: Optional[int] = None) -> MorphismCheck:
    """(i) images of events are events, (ii) orthogonality and (iii) perspectivity are preserved."""
    pair_cap = cap if cap is not None else get_settings().max_event_pairs
    src = event_structure(m.source)
    tgt = event_structure(m.target)
    for e in src.events:
        if not tgt.is_event(m.apply(e.mask)):
            return MorphismCheck(ok=False, condition="i", witness=(bits(e.mask),))
    for a, b in src.orthogonal_pairs(pair_cap):
        if not tgt.orthogonal(m.apply(a), m.apply(b)):
            return MorphismCheck(ok=False, condition="ii", witness=(bits(a), bits(b)))
    for a, b, _ in src.perspective_pairs(pair_cap):
        if not tgt.perspective(m.apply(a), m.apply(b)):
            return MorphismCheck(ok=False, condition="iii", witness=(bits(a), bits(b)))
    return MorphismCheck(ok=True)


def compose_morphisms(second: Morphism, first: Morphism) -> Morphism:
    """second o first: x -> union of second(y) over y in first(x)."""
    if first.target != second.source:
        raise MorphismMismatch(f"cannot compose: {first.target.name} is not {second.source.name}")
    return Morphism(source=first.source, target=second.target,
                    images=tuple(second.apply(m) for m in first.images))


# --- Isomorphism search ---

def isomorphism(first: TestSpace, second: TestSpace) -> Optional[Dict[int, int]]:
    """An outcome bijection carrying the tests of one space onto the other, or None."""
    if first.size != second.size or len(first.tests) != len(second.tests):
        return None
    if sorted(len(t) for t in first.tests) != sorted(len(t) for t in second.tests):
        return None

    def signature(space: TestSpace) -> List[Tuple[int, ...]]:
        sig = [[] for _ in range(space.size)]
        for t in space.tests:
            for i in t:
                sig[i].append(len(t))
        return [tuple(sorted(s)) for s in sig]

    sig1, sig2 = signature(first), signature(second)
    if sorted(sig1) != sorted(sig2):
        return None

    def together(space: TestSpace) -> List[List[int]]:
        counts = [[0] * space.size for _ in range(space.size)]
        for t in space.tests:
            for i in t:
                for j in t:
                    counts[i][j] += 1
        return counts

    co1, co2 = together(first), together(second)
    order = sorted(range(first.size), key=lambda i: (-sum(1 for c in co1[i] if c), sig1[i], i))
    target_tests = set(second.test_masks)
    assignment: Dict[int, int] = {}
    used = set()

    def extend(depth: int) -> bool:
        if depth == len(order):
            return all(mask_of(assignment[i] for i in t) in target_tests for t in first.tests)
        x = order[depth]
        for y in range(second.size):
            if y in used or sig2[y] != sig1[x] or co2[y][y] != co1[x][x]:
                continue
            if any(co1[x][p] != co2[y][assignment[p]] for p in assignment):
                continue
            assignment[x] = y
            used.add(y)
            if extend(depth + 1):
                return True
            del assignment[x]
            used.discard(y)
        return False

    return dict(assignment) if extend(0) else None
