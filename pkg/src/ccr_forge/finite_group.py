"""Finite groups given by Cayley tables."""

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian_product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

KLEIN_LABELS = ("1", "i", "j", "k")
SYMMETRIC3_PERMS = ((0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1))
SYMMETRIC3_LABELS = ("e", "(01)", "(12)", "(02)", "(012)", "(021)")


class GroupError(ValueError):
    """Base class for invalid group tables."""

    pass


class NotClosedError(GroupError):
    """Table entry out of range, or a row/column is not a permutation."""

    pass


class NotAssociativeError(GroupError):
    """Associativity fails for some triple."""

    pass


class NoIdentityError(GroupError):
    """No two-sided identity element exists."""

    pass


class NoInverseError(GroupError):
    """Some element has no two-sided inverse."""

    pass


class UnknownKindError(GroupError):
    """Requested group kind is not one of the built-in families."""

    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """
    Group X with elements 0..N-1.

    Instances are produced by validate_group/build_group and are never
    mutated afterwards. `coordinates` is set for direct products and holds
    each element's tuple of factor indices (lexicographic order).
    """

    size: int
    cayley: np.ndarray = field(repr=False)
    identity: int
    inverse: np.ndarray = field(repr=False)
    labels: Tuple[str, ...] = ()
    coordinates: Optional[Tuple[Tuple[int, ...], ...]] = field(default=None, repr=False)

    def multiply(self, x: int, y: int) -> int:
        """Return xy."""
        return int(self.cayley[x, y])

    def inverse_of(self, x: int) -> int:
        """Return x⁻¹."""
        return int(self.inverse[x])

    def elements(self) -> range:
        return range(self.size)

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def index_of(self, ref: Union[int, str]) -> int:
        """
        Resolve an element reference from a spec file.

        Args:
            ref: Element index or label

        Returns:
            Element index

        Raises:
            KeyError: If the reference names no element
        """
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < self.size:
                return ref
            raise KeyError(f"Element index {ref} out of range 0..{self.size - 1}")
        if ref in self.labels:
            return self.labels.index(ref)
        raise KeyError(f"Unknown group element: {ref!r}")

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def matches(self, other: "FiniteGroup") -> bool:
        """True if both groups have the same Cayley table."""
        return self is other or (
            self.size == other.size and bool(np.array_equal(self.cayley, other.cayley))
        )


def validate_group(
    table: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None
) -> FiniteGroup:
    """
    Validate a Cayley table exhaustively and compute identity and inverses.

    Args:
        table: N×N table of element indices, table[x][y] = xy
        labels: Optional element names, used for reporting only

    Returns:
        Validated FiniteGroup

    Raises:
        NotClosedError: Entry outside 0..N-1, or a row/column is not a permutation
        NoIdentityError: No two-sided identity
        NoInverseError: Some element lacks a two-sided inverse
        NotAssociativeError: Some triple violates associativity
    """
    cayley = np.asarray(table)
    if cayley.ndim != 2 or cayley.shape[0] != cayley.shape[1] or cayley.shape[0] == 0:
        raise NotClosedError(f"Cayley table must be a non-empty square table, got {cayley.shape}")
    if not np.issubdtype(cayley.dtype, np.integer):
        raise NotClosedError("Cayley table entries must be integers")
    n = cayley.shape[0]
    cayley = cayley.astype(np.int64)

    out_of_range = np.argwhere((cayley < 0) | (cayley >= n))
    if out_of_range.size:
        x, y = (int(v) for v in out_of_range[0])
        raise NotClosedError(f"Product ({x},{y}) = {cayley[x, y]} is not an element of 0..{n - 1}")

    expected = np.arange(n)
    for x in range(n):
        if not np.array_equal(np.sort(cayley[x, :]), expected):
            raise NotClosedError(f"Row {x} is not a permutation of 0..{n - 1}")
        if not np.array_equal(np.sort(cayley[:, x]), expected):
            raise NotClosedError(f"Column {x} is not a permutation of 0..{n - 1}")

    identity = None
    for e in range(n):
        if np.array_equal(cayley[e, :], expected) and np.array_equal(cayley[:, e], expected):
            identity = e
            break
    if identity is None:
        raise NoIdentityError("No element e with ex = xe = x for all x")

    inverse = np.empty(n, dtype=np.int64)
    for x in range(n):
        candidates = np.flatnonzero(cayley[x, :] == identity)
        if candidates.size != 1 or cayley[candidates[0], x] != identity:
            raise NoInverseError(f"Element {x} has no two-sided inverse")
        inverse[x] = candidates[0]

    # lhs[x,y,z] = (xy)z, rhs[x,y,z] = x(yz)
    lhs = cayley[cayley]
    rhs = cayley[np.arange(n)[:, None, None], cayley[None, :, :]]
    violations = np.argwhere(lhs != rhs)
    if violations.size:
        x, y, z = (int(v) for v in violations[0])
        raise NotAssociativeError(
            f"(xy)z != x(yz) at (x,y,z)=({x},{y},{z}): {lhs[x, y, z]} vs {rhs[x, y, z]}"
        )

    if labels is not None and len(labels) != n:
        raise NotClosedError(f"Expected {n} labels, got {len(labels)}")

    cayley.setflags(write=False)
    inverse.setflags(write=False)
    logger.debug(f"Validated group of order {n} (identity={identity})")
    return FiniteGroup(
        size=n,
        cayley=cayley,
        identity=identity,
        inverse=inverse,
        labels=tuple(labels) if labels is not None else tuple(str(x) for x in range(n)),
    )


def cyclic_group(n: int) -> FiniteGroup:
    """Z_n under addition."""
    if n < 1:
        raise UnknownKindError(f"cyclic(n) requires n >= 1, got {n}")
    idx = np.arange(n)
    return validate_group((idx[:, None] + idx[None, :]) % n)


def klein_group() -> FiniteGroup:
    """Vierergruppe {1, i, j, k} with i² = j² = k² = 1 and ij = ji = k."""
    # 1=0, i=1, j=2, k=3; multiplication is XOR of the two-bit codes
    idx = np.arange(4)
    return validate_group(idx[:, None] ^ idx[None, :], labels=KLEIN_LABELS)


def symmetric3_group() -> FiniteGroup:
    """S_3, composition (xy)(t) = x(y(t))."""
    lookup = {p: i for i, p in enumerate(SYMMETRIC3_PERMS)}
    table = [
        [lookup[tuple(p[q[t]] for t in range(3))] for q in SYMMETRIC3_PERMS]
        for p in SYMMETRIC3_PERMS
    ]
    return validate_group(table, labels=SYMMETRIC3_LABELS)


def direct_product(factors: Sequence[FiniteGroup]) -> FiniteGroup:
    """
    Direct product with lexicographic indexing.

    Element (g_1, ..., g_r) gets index Σ g_i · Π_{j>i} |G_j|.
    """
    if not factors:
        raise UnknownKindError("product() needs at least one factor")
    coords = list(cartesian_product(*(range(g.size) for g in factors)))
    index = {c: i for i, c in enumerate(coords)}
    table = [
        [index[tuple(g.multiply(a, b) for g, a, b in zip(factors, cx, cy))] for cy in coords]
        for cx in coords
    ]
    labels = ["(" + ",".join(g.label(a) for g, a in zip(factors, c)) + ")" for c in coords]
    group = validate_group(table, labels=labels)
    return FiniteGroup(
        size=group.size,
        cayley=group.cayley,
        identity=group.identity,
        inverse=group.inverse,
        labels=group.labels,
        coordinates=tuple(coords),
    )


def build_group(kind: Union[str, Dict[str, Any]], **params: Any) -> FiniteGroup:
    """
    Build one of the named group families.

    Args:
        kind: "cyclic" | "product" | "klein" | "symmetric3", or a dict
            {"kind": ..., **params} as found in spec files
        **params: n for cyclic; factors (list of kinds/dicts/groups) for product

    Returns:
        The requested FiniteGroup

    Raises:
        UnknownKindError: Unknown family or bad parameters
    """
    if isinstance(kind, dict):
        params = {k: v for k, v in kind.items() if k != "kind"}
        kind = kind["kind"]

    if kind == "cyclic":
        if "n" not in params:
            raise UnknownKindError("cyclic group requires parameter n")
        return cyclic_group(int(params["n"]))
    if kind == "klein":
        return klein_group()
    if kind == "symmetric3":
        return symmetric3_group()
    if kind == "product":
        factors: List[FiniteGroup] = []
        for spec in params.get("factors", []):
            factors.append(spec if isinstance(spec, FiniteGroup) else build_group(spec))
        return direct_product(factors)
    raise UnknownKindError(f"Unknown group kind: {kind!r}")


def lattice_group(n: int, d: int) -> FiniteGroup:
    """Z_n^d as a lexicographic direct product."""
    return direct_product([cyclic_group(n)] * d)


def lattice_index(k: Sequence[int], n: int) -> int:
    """Index of the vector k (entries taken mod n) in lattice_group(n, len(k))."""
    index = 0
    for component in k:
        index = index * n + int(component) % n
    return index


def lattice_vector(index: int, n: int, d: int) -> Tuple[int, ...]:
    """Inverse of lattice_index."""
    digits = []
    for _ in range(d):
        index, r = divmod(index, n)
        digits.append(r)
    return tuple(reversed(digits))
