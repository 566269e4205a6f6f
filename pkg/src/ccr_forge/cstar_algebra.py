"""Finite-dimensional C*-algebras ⊕_β M_{n_β}(C), their elements and *-automorphisms."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np

from ccr_forge.linalg import Eigensolver, spectral_norm
from ccr_forge.reports import AxiomReport

logger = logging.getLogger(__name__)

UNITARY_TOLERANCE = 1.0e-12
FACTORIZATION_TOLERANCE = 1.0e-9

Scalar = Union[int, float, complex]
MatrixUnit = Tuple[int, int, int]  # (block, row, col)


class AlgebraError(ValueError):
    """Base class for algebra-level input errors."""

    pass


class ShapeMismatchError(AlgebraError):
    """Operands live in different algebras (or have wrong block sizes)."""

    pass


class SizeMismatchError(AlgebraError):
    """A block permutation exchanges blocks of different sizes."""

    pass


class NotUnitaryError(AlgebraError):
    """An element required to be unitary is not."""

    pass


class AutomorphismFactorizationError(AlgebraError):
    """A linear map on A is not of the form a ↦ u·P_perm(a)·u*."""

    pass


@dataclass(frozen=True)
class AlgebraShape:
    """Block sizes [n_1..n_B] of A = ⊕ M_{n_β}(C)."""

    blocks: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) < 1:
            raise ShapeMismatchError("An algebra needs at least one block")
        if any(int(n) < 1 for n in self.blocks):
            raise ShapeMismatchError(f"Block sizes must be >= 1, got {list(self.blocks)}")
        object.__setattr__(self, "blocks", tuple(int(n) for n in self.blocks))

    @property
    def dim(self) -> int:
        """Complex dimension M = Σ n_β²."""
        return sum(n * n for n in self.blocks)

    @property
    def offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return tuple(out)

    @property
    def is_scalar(self) -> bool:
        return self.blocks == (1,)

    def matrix_units(self) -> Iterator[MatrixUnit]:
        """Yield (β, i, j) in vectorization order."""
        for beta, n in enumerate(self.blocks):
            for i in range(n):
                for j in range(n):
                    yield beta, i, j

    def matrix_unit(self, beta: int, i: int, j: int) -> "AlgebraElement":
        mats = [np.zeros((n, n), dtype=np.complex128) for n in self.blocks]
        mats[beta][i, j] = 1.0
        return AlgebraElement(self, tuple(mats))

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n, dtype=np.complex128) for n in self.blocks))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(
            self, tuple(np.zeros((n, n), dtype=np.complex128) for n in self.blocks)
        )

    def scalar(self, c: Scalar) -> "AlgebraElement":
        return self.unit() * complex(c)

    def adjoint_permutation(self) -> np.ndarray:
        """Index map p with vec(a*) = conj(vec(a)[p])."""
        perm = np.empty(self.dim, dtype=np.int64)
        for beta, n in enumerate(self.blocks):
            base = self.offsets[beta]
            idx = np.arange(n * n).reshape(n, n)
            perm[base + idx.reshape(-1)] = base + idx.T.reshape(-1)
        return perm

    def left_unit_matrices(self) -> np.ndarray:
        """(M, M, M) stack; entry q is left_matrix of the q-th matrix unit."""
        return np.array([self.matrix_unit(*mu).left_matrix() for mu in self.matrix_units()])

    def trace_weights(self) -> np.ndarray:
        """Vector w with w·vec(a) = trace_functional(a)."""
        w = np.zeros(self.dim, dtype=np.complex128)
        for beta, n in enumerate(self.blocks):
            w[self.offsets[beta] + np.arange(n) * (n + 1)] = 1.0
        return w


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of A stored as one complex matrix per block."""

    shape: AlgebraShape
    mats: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        mats = tuple(np.asarray(m, dtype=np.complex128) for m in self.mats)
        if len(mats) != len(self.shape.blocks):
            raise ShapeMismatchError(
                f"Expected {len(self.shape.blocks)} blocks, got {len(mats)}"
            )
        for beta, (m, n) in enumerate(zip(mats, self.shape.blocks)):
            if m.shape != (n, n):
                raise ShapeMismatchError(f"Block {beta} must be {n}×{n}, got {m.shape}")
        object.__setattr__(self, "mats", mats)

    @classmethod
    def from_blocks(cls, blocks: Sequence[np.ndarray]) -> "AlgebraElement":
        """Infer the shape from the given square blocks."""
        arrays = [np.atleast_2d(np.asarray(b, dtype=np.complex128)) for b in blocks]
        return cls(AlgebraShape(tuple(a.shape[0] for a in arrays)), tuple(arrays))

    @classmethod
    def from_vector(cls, shape: AlgebraShape, vec: np.ndarray) -> "AlgebraElement":
        mats = []
        for offset, n in zip(shape.offsets, shape.blocks):
            mats.append(np.array(vec[offset : offset + n * n]).reshape(n, n))
        return cls(shape, tuple(mats))

    def to_vector(self) -> np.ndarray:
        """Block-major, row-major coordinates in C^M."""
        return np.concatenate([m.reshape(-1) for m in self.mats])

    def _check(self, other: "AlgebraElement") -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(
                f"Algebra shapes differ: {list(self.shape.blocks)} vs {list(other.shape.blocks)}"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, tuple(a + b for a, b in zip(self.mats, other.mats)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, tuple(a - b for a, b in zip(self.mats, other.mats)))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, tuple(-a for a in self.mats))

    def __mul__(self, other: Union["AlgebraElement", Scalar]) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.shape, tuple(a @ b for a, b in zip(self.mats, other.mats)))
        c = complex(other)
        return AlgebraElement(self.shape, tuple(a * c for a in self.mats))

    def __rmul__(self, other: Scalar) -> "AlgebraElement":
        c = complex(other)
        return AlgebraElement(self.shape, tuple(c * a for a in self.mats))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, tuple(a.conj().T for a in self.mats))

    def max_deviation(self, other: "AlgebraElement") -> float:
        """Max entrywise |self − other|."""
        self._check(other)
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.mats, other.mats))

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a))) for a in self.mats)

    def is_unitary(self, tol: float = UNITARY_TOLERANCE) -> bool:
        return unitarity_residual(self) <= tol

    def left_matrix(self) -> np.ndarray:
        """Matrix of b ↦ self·b on vectorized coordinates."""
        return _block_diag([np.kron(a, np.eye(a.shape[0])) for a in self.mats])

    def right_matrix(self) -> np.ndarray:
        """Matrix of b ↦ b·self on vectorized coordinates."""
        return _block_diag([np.kron(np.eye(a.shape[0]), a.T) for a in self.mats])


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size), dtype=np.complex128)
    start = 0
    for b in blocks:
        stop = start + b.shape[0]
        out[start:stop, start:stop] = b
        start = stop
    return out


def unitarity_residual(u: AlgebraElement) -> float:
    """max(|u*u − 1|, |uu* − 1|) entrywise."""
    one = u.shape.unit()
    return max((u.adjoint() * u).max_deviation(one), (u * u.adjoint()).max_deviation(one))


def operator_norm(a: AlgebraElement, method: Eigensolver = "jacobi") -> float:
    """Max over blocks of the largest singular value."""
    return max(spectral_norm(m, method) for m in a.mats)


def stacked_operator_norms(shape: AlgebraShape, vectors: np.ndarray) -> np.ndarray:
    """
    operator_norm of many vectorized elements at once (LAPACK SVD).

    Args:
        shape: Algebra the vectors belong to
        vectors: Array (..., M)

    Returns:
        Array (...) of norms
    """
    vectors = np.asarray(vectors)
    lead = vectors.shape[:-1]
    norms = np.zeros(lead)
    for offset, n in zip(shape.offsets, shape.blocks):
        block = vectors[..., offset : offset + n * n].reshape(lead + (n, n))
        if n == 1:
            block_norm = np.abs(block[..., 0, 0])
        else:
            block_norm = np.linalg.norm(block, ord=2, axis=(-2, -1))
        norms = np.maximum(norms, block_norm)
    return norms


def trace_functional(a: AlgebraElement) -> complex:
    """Unnormalized trace summed over blocks; the faithful state ω₀ (up to scale)."""
    return complex(sum(np.trace(m) for m in a.mats))


@dataclass(frozen=True, eq=False)
class Automorphism:
    """
    *-automorphism σ(a) = u · P_perm(a) · u*.

    P_perm moves block perm[β] into slot β, so only blocks of equal size may
    be exchanged.
    """

    shape: AlgebraShape
    perm: Tuple[int, ...]
    u: AlgebraElement

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        if self.u.shape != self.shape:
            raise ShapeMismatchError("Automorphism unitary lives in a different algebra")
        if sorted(self.perm) != list(range(len(self.shape.blocks))):
            raise SizeMismatchError(f"{list(self.perm)} is not a permutation of the blocks")
        for beta, source in enumerate(self.perm):
            if self.shape.blocks[source] != self.shape.blocks[beta]:
                raise SizeMismatchError(
                    f"Block {source} (M_{self.shape.blocks[source]}) cannot move into "
                    f"slot {beta} (M_{self.shape.blocks[beta]})"
                )
        residual = unitarity_residual(self.u)
        if residual > UNITARY_TOLERANCE:
            raise NotUnitaryError(f"Automorphism unitary deviates by {residual:.3e}")

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "Automorphism":
        return cls(shape, tuple(range(len(shape.blocks))), shape.unit())

    @classmethod
    def inner(cls, u: AlgebraElement) -> "Automorphism":
        """Ad u."""
        return cls(u.shape, tuple(range(len(u.shape.blocks))), u)

    def permute(self, a: AlgebraElement) -> AlgebraElement:
        """P_perm(a)."""
        return AlgebraElement(a.shape, tuple(a.mats[src] for src in self.perm))

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return apply_automorphism(self, a)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self ∘ other."""
        if other.shape != self.shape:
            raise ShapeMismatchError("Cannot compose automorphisms of different algebras")
        perm = tuple(other.perm[self.perm[beta]] for beta in range(len(self.perm)))
        return Automorphism(self.shape, perm, self.u * self.permute(other.u))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.perm)
        for beta, src in enumerate(self.perm):
            inv[src] = beta
        u_star = self.u.adjoint()
        return Automorphism(
            self.shape, tuple(inv), AlgebraElement(self.shape, tuple(u_star.mats[b] for b in inv))
        )

    @cached_property
    def matrix(self) -> np.ndarray:
        """M×M matrix of σ on vectorized coordinates."""
        shape = self.shape
        out = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
        for beta, src in enumerate(self.perm):
            u = self.u.mats[beta]
            n = shape.blocks[beta]
            rows = slice(shape.offsets[beta], shape.offsets[beta] + n * n)
            cols = slice(shape.offsets[src], shape.offsets[src] + n * n)
            # vec(u X u*) = (u ⊗ conj(u)) vec(X) for row-major vec
            out[rows, cols] = np.kron(u, u.conj())
        return out

    def max_deviation(self, other: "Automorphism") -> float:
        """Max entrywise distance between the two maps on matrix units."""
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def is_identity(self, tol: float = UNITARY_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self.matrix - np.eye(self.shape.dim))) <= tol)


def apply_automorphism(s: Automorphism, a: AlgebraElement) -> AlgebraElement:
    """σ(a) = u · P_perm(a) · u*."""
    if a.shape != s.shape:
        raise ShapeMismatchError(
            f"Automorphism of {list(s.shape.blocks)} applied to element of {list(a.shape.blocks)}"
        )
    return s.u * s.permute(a) * s.u.adjoint()


def validate_automorphism(s: Automorphism, tol: float = 1.0e-10) -> AxiomReport:
    """
    Exhaustive *-automorphism check on all matrix-unit pairs.

    Size compatibility and unitarity are enforced when the Automorphism is
    constructed (SizeMismatchError / NotUnitaryError); this report
    re-measures unitarity and adds multiplicativity and adjoint preservation.
    """
    report = AxiomReport(title="automorphism", tolerance=tol)
    report.record("unitary", unitarity_residual(s.u))

    units = [(mu, s.shape.matrix_unit(*mu)) for mu in s.shape.matrix_units()]
    images = {mu: s(a) for mu, a in units}
    worst, witness = 0.0, None
    for mu, a in units:
        for nu, b in units:
            residual = s(a * b).max_deviation(images[mu] * images[nu])
            if residual > worst:
                worst, witness = residual, (mu, nu)
    report.record("multiplicative", worst, witness)

    worst, witness = 0.0, None
    for mu, a in units:
        residual = s(a.adjoint()).max_deviation(images[mu].adjoint())
        if residual > worst:
            worst, witness = residual, (mu,)
    report.record("adjoint", worst, witness)
    return report


def factor_automorphism(
    shape: AlgebraShape, matrix: np.ndarray, tol: float = FACTORIZATION_TOLERANCE
) -> Automorphism:
    """
    Recover (perm, u) from the M×M matrix of a *-automorphism.

    The block permutation is read off from where each block identity is
    sent; u_β is rebuilt column by column from the images of E_{i0} and
    polished to the nearest unitary by polar decomposition.

    Raises:
        AutomorphismFactorizationError: If the map is not a *-automorphism
            within tol
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (shape.dim, shape.dim):
        raise ShapeMismatchError(f"Expected {shape.dim}×{shape.dim} map, got {matrix.shape}")

    def image(beta: int, i: int, j: int) -> AlgebraElement:
        return AlgebraElement.from_vector(shape, matrix @ shape.matrix_unit(beta, i, j).to_vector())

    nblocks = len(shape.blocks)
    perm: List[int] = [-1] * nblocks
    for source, n in enumerate(shape.blocks):
        block_unit = AlgebraElement.from_vector(
            shape,
            sum(
                (matrix @ shape.matrix_unit(source, i, i).to_vector() for i in range(n)),
                np.zeros(shape.dim, dtype=np.complex128),
            ),
        )
        weights = [float(np.linalg.norm(m)) for m in block_unit.mats]
        target = int(np.argmax(weights))
        if shape.blocks[target] != n or perm[target] != -1:
            raise AutomorphismFactorizationError(
                f"Identity of block {source} is not sent onto a single block of equal size"
            )
        perm[target] = source

    u_blocks = []
    for beta, source in enumerate(perm):
        n = shape.blocks[beta]
        p00 = image(source, 0, 0).mats[beta]
        col = int(np.argmax(np.real(np.diag(p00))))
        pivot = np.real(p00[col, col])
        if pivot <= tol:
            raise AutomorphismFactorizationError(f"Image of E_00 in block {beta} vanishes")
        v0 = p00[:, col] / np.sqrt(pivot)
        columns = [v0] + [image(source, i, 0).mats[beta] @ v0 for i in range(1, n)]
        raw = np.column_stack(columns)
        left, _, right = np.linalg.svd(raw)
        u_blocks.append(left @ right)

    try:
        candidate = Automorphism(shape, tuple(perm), AlgebraElement(shape, tuple(u_blocks)))
    except AlgebraError as exc:
        raise AutomorphismFactorizationError(str(exc)) from exc
    residual = float(np.max(np.abs(candidate.matrix - matrix)))
    if residual > tol:
        raise AutomorphismFactorizationError(
            f"Map is not a *-automorphism: factorization residual {residual:.3e}"
        )
    return candidate
