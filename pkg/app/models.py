# app/models.py

from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# --- File Models ---

class TestSpaceFile(BaseModel):
    """On-disk test space: outcome labels plus tests as sorted outcome indices."""
    name: str
    outcomes: List[str]
    tests: List[List[int]]


class StateFile(BaseModel):
    space: str
    weights: List[str]  # exact rationals, "p/q"


class VertexTable(BaseModel):
    space: str
    outcomes: List[str]
    vertices: List[List[str]]
    affine_dim: int


def _check_permutation(p: List[int], degree: int) -> List[int]:
    if sorted(p) != list(range(degree)):
        raise ValueError(f"{p} is not a permutation of 0..{degree - 1}")
    return p


class GroupSpec(BaseModel):
    """A permutation group on 0..degree-1 given by generators."""
    degree: int = Field(ge=1)
    generators: List[List[int]]

    @model_validator(mode="after")
    def generators_are_permutations(self) -> "GroupSpec":
        for g in self.generators:
            _check_permutation(g, self.degree)
        return self


class SubgroupSpecs(BaseModel):
    """H as the images of the adjacent transpositions (i, i+1) of S(E); K by generators."""
    h_images: List[List[int]]
    k_generators: List[List[int]] = Field(default_factory=list)


class ConstructionFile(BaseModel):
    """(G, H, K, x0) for the Basic Construction."""
    name: str = ""
    labels: List[str]
    group_spec: GroupSpec
    subgroup_specs: SubgroupSpecs
    base_point: int = 0

    @model_validator(mode="after")
    def shapes_agree(self) -> "ConstructionFile":
        n, degree = len(self.labels), self.group_spec.degree
        if n == 0:
            raise ValueError("a construction needs at least one label")
        if len(set(self.labels)) != n:
            raise ValueError("duplicate labels")
        if not 0 <= self.base_point < n:
            raise ValueError(f"base point {self.base_point} outside 0..{n - 1}")
        if len(self.subgroup_specs.h_images) != n - 1:
            raise ValueError(f"H needs {n - 1} transposition images, got {len(self.subgroup_specs.h_images)}")
        for p in self.subgroup_specs.h_images + self.subgroup_specs.k_generators:
            _check_permutation(p, degree)
        return self


class MorphismFile(BaseModel):
    """Images of source outcomes as lists of target outcome labels."""
    images: Dict[str, List[str]]


# --- Check Models ---

class CheckResult(BaseModel):
    claim: str
    holds: bool
    witness: Optional[Any] = None
    details: Dict[str, Any] = Field(default_factory=dict)


# --- Report Models ---

Status = Literal["verified", "refuted", "skipped"]


class ReportItem(BaseModel):
    claim_id: str
    reference: str
    status: Status
    witness: Optional[Any] = None
    runtime_ms: float = 0.0
    expected: Optional[Status] = None
    note: str = ""

    @model_validator(mode="after")
    def refuted_needs_witness(self) -> "ReportItem":
        if self.status == "refuted" and self.witness is None:
            raise ValueError(f"refuted item {self.claim_id} carries no witness")
        return self

    @property
    def unexpected(self) -> bool:
        """A refutation nobody expected."""
        return self.status == "refuted" and self.expected != "refuted"

    @property
    def cap_breach(self) -> bool:
        """Skipped on a resource cap without being expected to skip."""
        return (self.status == "skipped" and isinstance(self.witness, dict)
                and self.witness.get("error") == "CapExceeded" and self.expected != "skipped")


class VerificationReport(BaseModel):
    suite: str
    items: List[ReportItem]
    tool_version: str
    config_echo: Dict[str, Any]
    created_at: datetime = Field(default_factory=datetime.now)

    @property
    def exit_code(self) -> int:
        """2 on a cap breach, 1 on an unexpected refutation, else 0."""
        if any(item.cap_breach for item in self.items):
            return 2
        return 1 if any(item.unexpected for item in self.items) else 0

    def counts(self) -> Dict[str, int]:
        out = {"verified": 0, "refuted": 0, "skipped": 0}
        for item in self.items:
            out[item.status] += 1
        return out


# --- Store Models ---

class StoredSpace(BaseModel):
    id: int
    name: str
    document: TestSpaceFile
    created_at: datetime

    model_config = ConfigDict(from_attributes=True)


class RunSummary(BaseModel):
    id: int
    suite: str
    tool_version: str
    created_at: datetime
    exit_code: int
    item_count: int = 0

    model_config = ConfigDict(from_attributes=True)
