# app/serialization.py

import csv
import io
import json
from typing import Any, Optional

from pydantic import BaseModel, ValidationError

from app.errors import TestSpaceError
from app.groups import Perm, as_permutation, closure, hom_extend, identity_perm, symmetric_group
from app.labels import label_text
from app.models import ConstructionFile, GroupSpec, StateFile, SubgroupSpecs, TestSpaceFile, VertexTable
from app.states import ProbWeight, StatePolytope, rational_text, validate_weight
from app.symmetry import ConstructionData, basic_construction
from app.testspace import TestSpace


def canonical_json(document: Any) -> str:
    """Sorted keys, two-space indent, trailing newline."""
    if isinstance(document, BaseModel):
        document = document.model_dump(mode="json")
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def space_to_file(space: TestSpace) -> TestSpaceFile:
    return TestSpaceFile(name=space.name, outcomes=[label_text(x) for x in space.outcomes],
                         tests=[list(t) for t in space.tests])


def space_from_file(document: TestSpaceFile) -> TestSpace:
    return TestSpace(name=document.name, outcomes=tuple(document.outcomes), tests=document.tests)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise TestSpaceError(f"cannot read {path}: {exc.strerror}") from exc


def write_text(text: str, path: Optional[str]) -> None:
    """Writes to a file, or to stdout when no path is given."""
    if path is None:
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def read_space(path: str) -> TestSpace:
    try:
        document = TestSpaceFile.model_validate_json(_read(path))
        return space_from_file(document)
    except ValidationError as exc:
        raise TestSpaceError(f"{path} is not a test-space file: {exc.errors()[0]['msg']}") from exc


def write_space(space: TestSpace, path: Optional[str] = None) -> str:
    text = canonical_json(space_to_file(space))
    write_text(text, path)
    return text


def read_state(path: str, space: TestSpace) -> ProbWeight:
    try:
        document = StateFile.model_validate_json(_read(path))
    except ValidationError as exc:
        raise TestSpaceError(f"{path} is not a state file: {exc.errors()[0]['msg']}") from exc
    if document.space and space.name and document.space != space.name:
        raise TestSpaceError(f"state is for '{document.space}', not '{space.name}'")
    return validate_weight(space, document.weights)


def vertex_table(polytope: StatePolytope) -> VertexTable:
    return VertexTable(space=polytope.space.name, outcomes=[label_text(x) for x in polytope.space.outcomes],
                       vertices=[v.as_strings() for v in polytope.vertices], affine_dim=polytope.affine_dim)


def vertices_csv(polytope: StatePolytope) -> str:
    """One row per vertex, one column per outcome."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([label_text(x) for x in polytope.space.outcomes])
    for vertex in polytope.vertices:
        writer.writerow([rational_text(w) for w in vertex.weights])
    return buffer.getvalue()


def construction_to_file(data: ConstructionData, name: str = "") -> ConstructionFile:
    """G, H and K written as permutations; H by the images of the adjacent transpositions of S(E)."""
    degree = len(as_permutation(data.group.identity))
    return ConstructionFile(
        name=name or data.space.name, labels=[label_text(x) for x in data.base_labels],
        group_spec=GroupSpec(degree=degree, generators=[list(as_permutation(g)) for g in data.group.generators]),
        subgroup_specs=SubgroupSpecs(
            h_images=[list(as_permutation(data.embed(s))) for s in data.embed.domain.generators],
            k_generators=[list(as_permutation(k)) for k in data.subgroup.generators]),
        base_point=data.base_point)


def construction_from_file(document: ConstructionFile) -> ConstructionData:
    spec = document.group_spec
    group = closure([Perm(tuple(g)) for g in spec.generators], identity=Perm(identity_perm(spec.degree)),
                    name=document.name or "G")
    sym = symmetric_group(len(document.labels))
    images = {s: Perm(tuple(h)) for s, h in zip(sym.generators, document.subgroup_specs.h_images)}
    embed = hom_extend(images, sym, group, require_injective=True)
    subgroup = group.subgroup([Perm(tuple(k)) for k in document.subgroup_specs.k_generators], name="K")
    return basic_construction(group, embed, subgroup, tuple(document.labels), document.base_point,
                              name=document.name)


def read_construction(path: str) -> ConstructionData:
    try:
        document = ConstructionFile.model_validate_json(_read(path))
    except ValidationError as exc:
        raise TestSpaceError(f"{path} is not a construction file: {exc.errors()[0]['msg']}") from exc
    return construction_from_file(document)


def write_construction(data: ConstructionData, path: Optional[str] = None, name: str = "") -> str:
    text = canonical_json(construction_to_file(data, name))
    write_text(text, path)
    return text
