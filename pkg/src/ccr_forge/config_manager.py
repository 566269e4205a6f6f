"""Problem-spec parsing, validation, settings resolution and object construction."""

import json
import logging
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError as PydanticValidationError

from ccr_forge.crossed_product import CrossedProduct, crossed_product
from ccr_forge.cstar_algebra import AlgebraElement, AlgebraShape, Automorphism
from ccr_forge.exporter import decode_matrix
from ccr_forge.finite_group import (
    FiniteGroup,
    build_group,
    direct_product,
    lattice_group,
    validate_group,
)
from ccr_forge.linalg import Eigensolver
from ccr_forge.projective_action import CField, ProjectiveAction, action_from_pair, explicit_action
from ccr_forge.spec_models import (
    ActionTwistingSpec,
    AlgebraValue,
    BicharacterTwistingSpec,
    ProblemSpec,
    ProductGroupSpec,
    SpacetimeTwistingSpec,
    TableGroupSpec,
    TableTwistingSpec,
    TrivialTwistingSpec,
    VectorSpaceSpec,
)
from ccr_forge.twisting import TwistingPair, bicharacter_pair, pair_from_tables, trivial_pair
from ccr_forge.weyl_ccr import (
    FormMultiplier,
    SigmaMatrix,
    WeylWord,
    build_sigma_matrix,
    spacetime_multiplier,
)

logger = logging.getLogger(__name__)

SPACETIME_DIMENSION = 4


class ValidationError(ValueError):
    """Problem-spec validation error."""

    pass


class SpecSyntaxError(ValidationError):
    """Malformed JSON, positioned by line and column."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"Syntax error at line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class SchemaError(ValidationError):
    """Schema violation at a JSON-pointer path."""

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"Schema error at {path}: {message}")
        self.path = path


class DimensionMismatchError(ValidationError):
    """Sizes referenced in different sections disagree."""

    def __init__(self, message: str, path: str) -> None:
        super().__init__(f"Dimension mismatch at {path}: {message}")
        self.path = path


@dataclass(frozen=True)
class VerificationSettings:
    """
    Tolerances and randomness for a verification run.

    Precedence: these defaults, then the spec's settings section, then CLI flags.
    """

    tolerance: float = 1.0e-10
    norm_tolerance: float = 1.0e-8
    random_seed: int = 42
    random_fields: int = 16
    eigensolver: Eigensolver = "lapack"

    def merged(self, overrides: Optional[Dict[str, Any]]) -> "VerificationSettings":
        """Copy with every non-None override applied."""
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        values = {k: v for k, v in overrides.items() if k in known and v is not None}
        return replace(self, **values)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _pointer(loc: Sequence[Any], data: Any) -> str:
    """JSON pointer for a pydantic error location, dropping union tags."""
    parts: List[str] = []
    node = data
    for item in loc:
        if isinstance(node, dict) and isinstance(item, str) and item not in node:
            if node.get("kind") == item:
                continue
        parts.append(str(item))
        try:
            node = node[item]
        except (KeyError, IndexError, TypeError):
            node = None
    return "/" + "/".join(parts)


def parse_spec(text: str) -> ProblemSpec:
    """
    Parse and schema-validate a problem spec.

    Raises:
        SpecSyntaxError: Text is not valid JSON
        SchemaError: Unknown key, missing section or malformed value
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        return ProblemSpec.model_validate(data)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(first["msg"], _pointer(first["loc"], data)) from exc


def load_spec(path: str) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as f:
        return parse_spec(f.read())


def serialize_spec(spec: ProblemSpec) -> str:
    """Normalized JSON text; parse_spec(serialize_spec(s)) == s."""
    return json.dumps(spec.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)


def decode_element(shape: AlgebraShape, value: AlgebraValue) -> AlgebraElement:
    return AlgebraElement(shape, tuple(decode_matrix(block) for block in value))


def _group_from_spec(spec: Any) -> FiniteGroup:
    if isinstance(spec, TableGroupSpec):
        return validate_group(spec.table, spec.labels)
    if isinstance(spec, ProductGroupSpec):
        return direct_product([_group_from_spec(f) for f in spec.factors])
    return build_group(spec.model_dump())


class ConfigManager:
    """
    Validator and builder for one problem spec.

    Validation Rules:
    1. Group builds (table groups are validated exhaustively)
    2. vector_space groups appear only with spacetime twisting, and vice versa
    3. Every algebra value has one n_β×n_β matrix per block
    4. Element references name group elements
    5. σ permutations have one entry per block
    6. Action operators: one (N·M)×(N·M) matrix per group element
    7. Bicharacter data matches the group Z_n^d
    8. Spacetime: one 1×1 block per ε sample, letters of dimension 4
    """

    def __init__(self, spec: ProblemSpec, overrides: Optional[Dict[str, Any]] = None) -> None:
        """
        Initialize with a parsed spec.

        Args:
            spec: Schema-valid problem spec
            overrides: CLI settings (tolerance, random_seed, ...), None entries ignored
        """
        self.spec = spec
        spec_settings = spec.settings.model_dump(exclude_none=True) if spec.settings else {}
        self.settings = VerificationSettings().merged(spec_settings).merged(overrides)
        self.shape = AlgebraShape(tuple(spec.algebra.blocks))
        self._group: Optional[FiniteGroup] = None
        self._pair: Optional[TwistingPair] = None
        self._action: Optional[ProjectiveAction] = None
        self._product: Optional[CrossedProduct] = None

    @property
    def is_spacetime(self) -> bool:
        return isinstance(self.spec.twisting, SpacetimeTwistingSpec)

    @property
    def group(self) -> FiniteGroup:
        if self.is_spacetime:
            raise DimensionMismatchError("spacetime specs have no finite group", "/group")
        if self._group is None:
            self._group = _group_from_spec(self.spec.group)
            logger.info(f"Built group of order {self._group.size}")
        return self._group

    def _resolve(self, ref: Any, path: str) -> int:
        try:
            return self.group.index_of(ref)
        except KeyError as exc:
            raise DimensionMismatchError(str(exc.args[0]), path) from exc

    def _check_value(self, value: AlgebraValue, path: str, errors: List[Tuple[str, str]]) -> None:
        blocks = self.shape.blocks
        if len(value) != len(blocks):
            errors.append((path, f"expected {len(blocks)} blocks, got {len(value)}"))
            return
        for beta, (block, n) in enumerate(zip(value, blocks)):
            if len(block) != n or any(len(row) != n for row in block):
                errors.append((f"{path}/{beta}", f"block {beta} must be {n}×{n}"))

    def validate(self) -> "ConfigManager":
        """
        Run all cross-section checks.

        Returns:
            self, for chaining

        Raises:
            DimensionMismatchError: First failing path, with every problem listed
            GroupError: Table group fails validation
        """
        errors: List[Tuple[str, str]] = []
        spec = self.spec
        twisting = spec.twisting

        if isinstance(spec.group, VectorSpaceSpec) != self.is_spacetime:
            errors.append(("/group", "vector_space groups go with spacetime twisting only"))
            self._raise(errors)

        if self.is_spacetime:
            assert isinstance(twisting, SpacetimeTwistingSpec)
            assert isinstance(spec.group, VectorSpaceSpec)
            if spec.group.dimension != SPACETIME_DIMENSION:
                errors.append(("/group/dimension", f"must be {SPACETIME_DIMENSION}"))
            if list(self.shape.blocks) != [1] * len(twisting.samples):
                errors.append(
                    ("/algebra/blocks", f"need one 1×1 block per sample ({len(twisting.samples)})")
                )
            for w, word in enumerate(spec.words):
                for i, letter in enumerate(word):
                    if len(letter) != SPACETIME_DIMENSION:
                        errors.append((f"/words/{w}/{i}", "letters must be 4-vectors"))
            self._raise(errors)
            return self

        n = self.group.size
        if isinstance(twisting, TableTwistingSpec):
            for i, entry in enumerate(twisting.xi):
                self._resolve(entry.x, f"/twisting/xi/{i}/x")
                self._resolve(entry.y, f"/twisting/xi/{i}/y")
                self._check_value(entry.value, f"/twisting/xi/{i}/value", errors)
            for i, s in enumerate(twisting.sigma):
                self._resolve(s.x, f"/twisting/sigma/{i}/x")
                if len(s.perm) != len(self.shape.blocks):
                    errors.append((f"/twisting/sigma/{i}/perm", "one entry per block required"))
                self._check_value(s.u, f"/twisting/sigma/{i}/u", errors)
        elif isinstance(twisting, TrivialTwistingSpec):
            for i, bp in enumerate(twisting.block_perms or []):
                self._resolve(bp.x, f"/twisting/block_perms/{i}/x")
                if len(bp.perm) != len(self.shape.blocks):
                    errors.append((f"/twisting/block_perms/{i}/perm", "one entry per block"))
        elif isinstance(twisting, ActionTwistingSpec):
            d = n * self.shape.dim
            if len(twisting.operators) != n:
                errors.append(("/twisting/operators", f"expected {n} operators"))
            for i, op in enumerate(twisting.operators):
                if len(op) != d or any(len(row) != d for row in op):
                    errors.append((f"/twisting/operators/{i}", f"operator must be {d}×{d}"))
        elif isinstance(twisting, BicharacterTwistingSpec):
            if self.shape.blocks != (1,):
                errors.append(("/algebra/blocks", "bicharacter twisting needs A = C ([1])"))
            if len(twisting.matrix) != twisting.rank or any(
                len(row) != twisting.rank for row in twisting.matrix
            ):
                errors.append(("/twisting/matrix", f"must be {twisting.rank}×{twisting.rank}"))
            lattice = lattice_group(twisting.modulus, twisting.rank)
            if not self.group.matches(lattice):
                expected = f"Z_{twisting.modulus}^{twisting.rank}"
                errors.append(("/group", f"group must be {expected} (lexicographic)"))
            for w, word in enumerate(spec.words):
                for i, letter in enumerate(word):
                    integral = all(isinstance(c, int) for c in letter)
                    if len(letter) != twisting.rank or not integral:
                        message = f"letters must be integer {twisting.rank}-vectors"
                        errors.append((f"/words/{w}/{i}", message))

        for name, entries in spec.elements.items():
            for i, entry in enumerate(entries):
                self._resolve(entry.at, f"/elements/{name}/{i}/at")
                self._check_value(entry.value, f"/elements/{name}/{i}/value", errors)

        self._raise(errors)
        return self

    @staticmethod
    def _raise(errors: List[Tuple[str, str]]) -> None:
        if errors:
            details = "; ".join(f"{path}: {msg}" for path, msg in errors)
            raise DimensionMismatchError(
                f"Specification validation failed: {details}", errors[0][0]
            )

    def build_pair(self) -> Optional[TwistingPair]:
        """Twisting pair of the spec; None for action and spacetime specs."""
        if self._pair is not None:
            return self._pair
        twisting = self.spec.twisting
        shape = self.shape
        if isinstance(twisting, TrivialTwistingSpec):
            perms = {
                self.group.index_of(bp.x): tuple(bp.perm) for bp in (twisting.block_perms or [])
            }
            self._pair = trivial_pair(self.group, shape, perms or None)
        elif isinstance(twisting, TableTwistingSpec):
            group = self.group
            xi: List[List[Any]] = [[shape.unit()] * group.size for _ in range(group.size)]
            for entry in twisting.xi:
                x, y = group.index_of(entry.x), group.index_of(entry.y)
                xi[x][y] = decode_element(shape, entry.value)
            sigma = [Automorphism.identity(shape) for _ in range(group.size)]
            for s in twisting.sigma:
                sigma[group.index_of(s.x)] = Automorphism(
                    shape, tuple(s.perm), decode_element(shape, s.u)
                )
            self._pair = pair_from_tables(group, shape, xi, sigma)
        elif isinstance(twisting, BicharacterTwistingSpec):
            self._pair = bicharacter_pair(
                twisting.modulus, twisting.rank, twisting.order, twisting.matrix
            )
        return self._pair

    def build_action(self) -> ProjectiveAction:
        if self._action is None:
            twisting = self.spec.twisting
            if isinstance(twisting, ActionTwistingSpec):
                mats = [decode_matrix(op) for op in twisting.operators]
                self._action = explicit_action(self.group, self.shape, mats)
            else:
                pair = self.build_pair()
                if pair is None:
                    raise DimensionMismatchError("no finite action for spacetime", "/twisting")
                self._action = action_from_pair(pair, self.settings.tolerance)
        return self._action

    def build_crossed_product(self) -> CrossedProduct:
        if self._product is None:
            self._product = crossed_product(
                self.build_action(),
                eigensolver=self.settings.eigensolver,
                tolerance=self.settings.tolerance,
            )
        return self._product

    def build_element(self, name: str) -> CField:
        """
        Named field from the elements section.

        Raises:
            KeyError: No element with that name
        """
        if name not in self.spec.elements:
            known = ", ".join(sorted(self.spec.elements)) or "none"
            raise KeyError(f"Unknown element {name!r} (defined: {known})")
        values = [self.shape.zero() for _ in range(self.group.size)]
        for entry in self.spec.elements[name]:
            x = self.group.index_of(entry.at)
            values[x] = values[x] + decode_element(self.shape, entry.value)
        return CField(self.group, self.shape, tuple(values))

    def spacetime_samples(self) -> List[SigmaMatrix]:
        twisting = self.spec.twisting
        if not isinstance(twisting, SpacetimeTwistingSpec):
            raise DimensionMismatchError("not a spacetime spec", "/twisting/kind")
        return [build_sigma_matrix(s.e, s.m) for s in twisting.samples]

    def spacetime_multiplier(self) -> FormMultiplier:
        return spacetime_multiplier(self.spacetime_samples())

    def words(self) -> List[WeylWord]:
        return [WeylWord(tuple(tuple(letter) for letter in word)) for word in self.spec.words]
