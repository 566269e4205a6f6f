"""Pydantic schema of problem-specification files."""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

ComplexPair = Tuple[float, float]
ComplexMatrix = List[List[ComplexPair]]
AlgebraValue = List[ComplexMatrix]
ElementRef = Union[int, str]
LetterSpec = List[Union[int, float]]


class SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CyclicGroupSpec(SpecModel):
    kind: Literal["cyclic"]
    n: int

    @field_validator("n")
    @classmethod
    def n_must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("n must be >= 1")
        return v


class ProductGroupSpec(SpecModel):
    kind: Literal["product"]
    factors: List["GroupSpec"]

    @field_validator("factors")
    @classmethod
    def factors_not_empty(cls, v: List["GroupSpec"]) -> List["GroupSpec"]:
        if not v:
            raise ValueError("product needs at least one factor")
        return v


class KleinGroupSpec(SpecModel):
    kind: Literal["klein"]


class Symmetric3GroupSpec(SpecModel):
    kind: Literal["symmetric3"]


class TableGroupSpec(SpecModel):
    kind: Literal["table"]
    table: List[List[int]]
    labels: Optional[List[str]] = None


class VectorSpaceSpec(SpecModel):
    """R^d; only meaningful together with a spacetime twisting."""

    kind: Literal["vector_space"]
    dimension: int


GroupSpec = Annotated[
    Union[
        CyclicGroupSpec,
        ProductGroupSpec,
        KleinGroupSpec,
        Symmetric3GroupSpec,
        TableGroupSpec,
        VectorSpaceSpec,
    ],
    Field(discriminator="kind"),
]

ProductGroupSpec.model_rebuild()


class AlgebraSpec(SpecModel):
    blocks: List[int]

    @field_validator("blocks")
    @classmethod
    def blocks_valid(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("blocks must not be empty")
        if any(n < 1 for n in v):
            raise ValueError("block sizes must be >= 1")
        return v


class BlockPermEntry(SpecModel):
    x: ElementRef
    perm: List[int]


class XiEntry(SpecModel):
    x: ElementRef
    y: ElementRef
    value: AlgebraValue


class SigmaEntry(SpecModel):
    x: ElementRef
    perm: List[int]
    u: AlgebraValue


class TrivialTwistingSpec(SpecModel):
    kind: Literal["trivial"]
    block_perms: Optional[List[BlockPermEntry]] = None


class TableTwistingSpec(SpecModel):
    """Entries not listed default to ξ = 1 and σ = id."""

    kind: Literal["table"]
    xi: List[XiEntry] = []
    sigma: List[SigmaEntry] = []


class BicharacterTwistingSpec(SpecModel):
    kind: Literal["bicharacter"]
    modulus: int
    rank: int
    order: int
    matrix: List[List[int]]

    @field_validator("modulus", "rank", "order")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v


class ActionTwistingSpec(SpecModel):
    kind: Literal["action"]
    operators: List[ComplexMatrix]


class SampleSpec(SpecModel):
    e: Tuple[float, float, float]
    m: Tuple[float, float, float]


class SpacetimeTwistingSpec(SpecModel):
    kind: Literal["spacetime"]
    samples: List[SampleSpec]

    @field_validator("samples")
    @classmethod
    def samples_not_empty(cls, v: List[SampleSpec]) -> List[SampleSpec]:
        if not v:
            raise ValueError("at least one ε sample is required")
        return v


TwistingSpec = Annotated[
    Union[
        TrivialTwistingSpec,
        TableTwistingSpec,
        BicharacterTwistingSpec,
        ActionTwistingSpec,
        SpacetimeTwistingSpec,
    ],
    Field(discriminator="kind"),
]


class ElementEntry(SpecModel):
    at: ElementRef
    value: AlgebraValue


class SettingsSpec(SpecModel):
    tolerance: Optional[float] = None
    norm_tolerance: Optional[float] = None
    random_seed: Optional[int] = None
    random_fields: Optional[int] = None
    eigensolver: Optional[Literal["lapack", "jacobi"]] = None

    @field_validator("tolerance", "norm_tolerance")
    @classmethod
    def tolerance_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError("tolerance must be > 0")
        return v

    @field_validator("random_seed", "random_fields")
    @classmethod
    def non_negative(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError("must be >= 0")
        return v


class ProblemSpec(SpecModel):
    group: GroupSpec
    algebra: AlgebraSpec
    twisting: TwistingSpec
    elements: Dict[str, List[ElementEntry]] = {}
    words: List[List[LetterSpec]] = []
    settings: Optional[SettingsSpec] = None
