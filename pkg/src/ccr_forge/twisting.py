"""Twisting pairs (ξ, σ): storage, named constructors and C*-multiplier axiom checks."""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ccr_forge.cstar_algebra import (
    UNITARY_TOLERANCE,
    AlgebraElement,
    AlgebraShape,
    Automorphism,
    NotUnitaryError,
    Scalar,
    ShapeMismatchError,
    unitarity_residual,
)
from ccr_forge.finite_group import (
    FiniteGroup,
    cyclic_group,
    klein_group,
    lattice_group,
    lattice_vector,
)
from ccr_forge.reports import DEFAULT_TOLERANCE, AxiomReport
from ccr_forge.rng import SeededRNG

logger = logging.getLogger(__name__)

M4_NOTE = "vacuous (discrete group)"

# Anticommuting Klein cocycle: ξ(i,j)=ξ(j,k)=ξ(k,i)=i, reversed orders give −i, all else 1
KLEIN_XI = {(1, 2): 1j, (2, 3): 1j, (3, 1): 1j, (2, 1): -1j, (3, 2): -1j, (1, 3): -1j}


class TwistingError(ValueError):
    """Base class for invalid twisting data."""

    pass


class M1ViolationError(TwistingError):
    """ξ(x,e) or ξ(e,y) differs from 1, or σ_e is not the identity."""

    pass


class NotScalarAlgebraError(TwistingError):
    """Operation requires A = C."""

    pass


class IllDefinedPhaseError(TwistingError):
    """Bicharacter matrix B does not descend to Z_n (n·B ≢ 0 mod M)."""

    pass


@dataclass(frozen=True)
class TableBacking:
    """ξ and σ given entry by entry."""

    kind: str = "table"


@dataclass(frozen=True)
class BicharacterBacking:
    """ξ(k,k') = exp(2πi·(kᵀBk' mod M)/M) on Z_n^d."""

    modulus: int
    rank: int
    order: int
    matrix: Tuple[Tuple[int, ...], ...]
    kind: str = "bicharacter"


Backing = Union[TableBacking, BicharacterBacking]


@dataclass(frozen=True, eq=False)
class TwistingPair:
    """
    C*-multiplier ξ of X with its companion automorphisms σ.

    xi[x][y] is a unitary of A = M(A); sigma[x] is σ_x. Instances built by
    pair_from_tables have passed M1 and unitarity; M2/M3 are left to
    check_multiplier so that mutated fixtures can be represented.
    """

    group: FiniteGroup
    shape: AlgebraShape
    xi: Tuple[Tuple[AlgebraElement, ...], ...]
    sigma: Tuple[Automorphism, ...]
    backing: Backing = TableBacking()

    def xi_at(self, x: int, y: int) -> AlgebraElement:
        return self.xi[x][y]

    def sigma_at(self, x: int) -> Automorphism:
        return self.sigma[x]

    @property
    def is_scalar(self) -> bool:
        return self.shape.is_scalar

    @cached_property
    def xi_vectors(self) -> np.ndarray:
        """(N, N, M) vectorized ξ table."""
        n = self.group.size
        return np.array(
            [[self.xi[x][y].to_vector() for y in range(n)] for x in range(n)],
            dtype=np.complex128,
        )

    @cached_property
    def sigma_matrices(self) -> np.ndarray:
        """(N, M, M) matrices of σ_x."""
        return np.array([s.matrix for s in self.sigma], dtype=np.complex128)

    def xi_block(self, beta: int) -> np.ndarray:
        """(N, N, n_β, n_β) stack of block β of every ξ(x,y)."""
        n = self.group.size
        return np.array([[self.xi[x][y].mats[beta] for y in range(n)] for x in range(n)])

    def scalar_table(self) -> np.ndarray:
        """N×N complex table; only for A = C."""
        if not self.is_scalar:
            raise NotScalarAlgebraError(
                f"Scalar table requested for algebra {list(self.shape.blocks)}"
            )
        return self.xi_vectors[:, :, 0]


def _as_element(shape: AlgebraShape, value: Union[AlgebraElement, Scalar]) -> AlgebraElement:
    if isinstance(value, AlgebraElement):
        if value.shape != shape:
            raise ShapeMismatchError(
                f"ξ entry has blocks {list(value.shape.blocks)}, expected {list(shape.blocks)}"
            )
        return value
    return shape.scalar(value)


def pair_from_tables(
    group: FiniteGroup,
    shape: AlgebraShape,
    xi: Sequence[Sequence[Union[AlgebraElement, Scalar]]],
    sigma: Optional[Sequence[Automorphism]] = None,
    backing: Backing = TableBacking(),
) -> TwistingPair:
    """
    Build a twisting pair from explicit tables.

    Args:
        group: The group X
        shape: Block sizes of A
        xi: N×N table; entries are AlgebraElements, or numbers meaning c·1_A
        sigma: Length-N automorphisms, identity when omitted
        backing: How the tables were produced

    Returns:
        TwistingPair whose M1 and unitarity conditions hold within 1e-12

    Raises:
        ShapeMismatchError: Table dimensions or entry shapes are wrong
        M1ViolationError: ξ(x,e) ≠ 1, ξ(e,y) ≠ 1 or σ_e ≠ id
        NotUnitaryError: Some ξ(x,y) is not unitary
    """
    n = group.size
    if len(xi) != n or any(len(row) != n for row in xi):
        raise ShapeMismatchError(f"ξ table must be {n}×{n}")
    table = tuple(tuple(_as_element(shape, v) for v in row) for row in xi)
    if sigma is None:
        autos = tuple(Automorphism.identity(shape) for _ in range(n))
    else:
        if len(sigma) != n:
            raise ShapeMismatchError(f"σ table must have {n} entries, got {len(sigma)}")
        for s in sigma:
            if s.shape != shape:
                raise ShapeMismatchError("σ entry acts on a different algebra")
        autos = tuple(sigma)

    one = shape.unit()
    e = group.identity
    for x in range(n):
        for where, value in (((x, e), table[x][e]), ((e, x), table[e][x])):
            deviation = value.max_deviation(one)
            if deviation > UNITARY_TOLERANCE:
                raise M1ViolationError(
                    f"ξ({group.label(where[0])},{group.label(where[1])}) differs from 1 "
                    f"by {deviation:.3e}"
                )
    if not autos[e].is_identity():
        raise M1ViolationError("σ_e is not the identity automorphism")
    for x in range(n):
        for y in range(n):
            residual = unitarity_residual(table[x][y])
            if residual > UNITARY_TOLERANCE:
                raise NotUnitaryError(
                    f"ξ({group.label(x)},{group.label(y)}) is not unitary "
                    f"(residual {residual:.3e})"
                )

    logger.debug(f"Built twisting pair on |X|={n}, A blocks {list(shape.blocks)}")
    return TwistingPair(group=group, shape=shape, xi=table, sigma=autos, backing=backing)


def trivial_pair(
    group: FiniteGroup,
    shape: AlgebraShape,
    block_perms: Optional[Dict[int, Sequence[int]]] = None,
) -> TwistingPair:
    """
    ξ ≡ 1 with σ_x = P_{perm_x}.

    Args:
        group: The group X
        shape: Block sizes of A
        block_perms: Optional {x: perm} for a homomorphism into block
            permutations; missing elements act trivially

    Raises:
        TwistingError: If x ↦ σ_x is not a homomorphism
    """
    n = group.size
    identity_perm = tuple(range(len(shape.blocks)))
    table = block_perms or {}
    perms = [tuple(table.get(x, identity_perm)) for x in range(n)]
    autos = [Automorphism(shape, p, shape.unit()) for p in perms]
    for x in range(n):
        for y in range(n):
            composed = autos[x].compose(autos[y])
            if composed.perm != autos[group.multiply(x, y)].perm:
                raise TwistingError(
                    f"Block permutations are not a homomorphism at "
                    f"({group.label(x)},{group.label(y)})"
                )
    one = shape.unit()
    xi = [[one] * n for _ in range(n)]
    return pair_from_tables(group, shape, xi, autos)


def z2_phase_pair(alpha: float) -> TwistingPair:
    """Z₂, A = C, ξ(1,1) = e^{iα} and ξ = 1 elsewhere."""
    phase = complex(np.exp(1j * alpha))
    return pair_from_tables(cyclic_group(2), AlgebraShape((1,)), [[1, 1], [1, phase]])


def klein_pair() -> TwistingPair:
    """Klein group, A = C, the cyclic ±i cocycle."""
    group = klein_group()
    xi = [[KLEIN_XI.get((x, y), 1.0) for y in range(4)] for x in range(4)]
    return pair_from_tables(group, AlgebraShape((1,)), xi)


def scalar_pair_on(shape: AlgebraShape, pair: TwistingPair) -> TwistingPair:
    """Lift a scalar multiplier to ξ(x,y)·1_A with trivial σ."""
    table = pair.scalar_table()
    n = pair.group.size
    xi = [[complex(table[x, y]) for y in range(n)] for x in range(n)]
    return pair_from_tables(pair.group, shape, xi)


def perturb_pair(pair: TwistingPair, u: Sequence[AlgebraElement]) -> TwistingPair:
    """
    Exterior perturbation by unitaries u(x) with u(e) = 1.

    σ'_x = Ad u(x) ∘ σ_x and ξ'(x,y) = u(x)·σ_x(u(y))·ξ(x,y)·u(xy)*.
    The result satisfies M1–M3 whenever pair does.
    """
    group = pair.group
    n = group.size
    if len(u) != n:
        raise ShapeMismatchError(f"Need {n} perturbing unitaries, got {len(u)}")
    if u[group.identity].max_deviation(pair.shape.unit()) > UNITARY_TOLERANCE:
        raise M1ViolationError("Perturbing unitary at the identity must be 1")
    for x, ux in enumerate(u):
        if not ux.is_unitary():
            raise NotUnitaryError(f"Perturbing element at {group.label(x)} is not unitary")

    sigma = [Automorphism.inner(u[x]).compose(pair.sigma[x]) for x in range(n)]
    xi = [
        [
            u[x] * pair.sigma[x](u[y]) * pair.xi[x][y] * u[group.multiply(x, y)].adjoint()
            for y in range(n)
        ]
        for x in range(n)
    ]
    return pair_from_tables(group, pair.shape, xi, sigma)


def random_pair(
    group: FiniteGroup,
    shape: AlgebraShape,
    rng: SeededRNG,
    base: Optional[TwistingPair] = None,
) -> TwistingPair:
    """
    Random valid pair: a base pair perturbed by Haar-random unitaries.

    Without a base, the Klein group starts from the lifted anticommuting
    cocycle half of the time; every other group starts from ξ ≡ 1.
    """
    if base is None:
        if group.matches(klein_group()) and rng.uniform(0.0, 1.0) < 0.5:
            base = scalar_pair_on(shape, klein_pair())
        else:
            base = trivial_pair(group, shape)
    u = [
        shape.unit() if x == group.identity else rng.random_unitary_element(shape)
        for x in range(group.size)
    ]
    return perturb_pair(base, u)


def with_xi_entry(
    pair: TwistingPair, x: int, y: int, value: Union[AlgebraElement, Scalar]
) -> TwistingPair:
    """Copy of pair with ξ(x,y) replaced; no axiom validation."""
    element = _as_element(pair.shape, value)
    rows: List[List[AlgebraElement]] = [list(row) for row in pair.xi]
    rows[x][y] = element
    return TwistingPair(
        group=pair.group,
        shape=pair.shape,
        xi=tuple(tuple(row) for row in rows),
        sigma=pair.sigma,
        backing=TableBacking(),
    )


def with_sigma_entry(pair: TwistingPair, x: int, s: Automorphism) -> TwistingPair:
    """Copy of pair with σ_x replaced; no axiom validation."""
    sigma = list(pair.sigma)
    sigma[x] = s
    return TwistingPair(
        group=pair.group, shape=pair.shape, xi=pair.xi, sigma=tuple(sigma), backing=TableBacking()
    )


def bicharacter_pair(n: int, d: int, order: int, matrix: Sequence[Sequence[int]]) -> TwistingPair:
    """
    Scalar bicharacter on Z_n^d.

    Args:
        n: Modulus of each cyclic factor
        d: Rank
        order: Phase order M; phases are M-th roots of unity
        matrix: d×d integer matrix B

    Returns:
        Pair with ξ(k,k') = exp(2πi·(kᵀBk' mod M)/M) and trivial σ

    Raises:
        IllDefinedPhaseError: n·B has an entry not divisible by M
    """
    b = np.asarray(matrix, dtype=np.int64)
    if b.shape != (d, d):
        raise ShapeMismatchError(f"Bicharacter matrix must be {d}×{d}, got {b.shape}")
    if order < 1:
        raise IllDefinedPhaseError(f"Phase order must be >= 1, got {order}")
    bad = np.argwhere((n * b) % order != 0)
    if bad.size:
        r, c = (int(v) for v in bad[0])
        raise IllDefinedPhaseError(
            f"n·B[{r}][{c}] = {n * b[r, c]} is not divisible by M = {order}; "
            f"phase not well defined on Z_{n}"
        )

    group = lattice_group(n, d)
    vectors = np.array([lattice_vector(x, n, d) for x in range(group.size)], dtype=np.int64)
    exponents = (vectors @ b @ vectors.T) % order
    phases = np.exp(2j * math.pi * exponents / order)
    xi = [[complex(phases[x, y]) for y in range(group.size)] for x in range(group.size)]
    backing = BicharacterBacking(
        modulus=n, rank=d, order=order, matrix=tuple(tuple(int(v) for v in row) for row in b)
    )
    logger.info(f"Built bicharacter pair on Z_{n}^{d} with M={order}")
    return pair_from_tables(group, AlgebraShape((1,)), xi, backing=backing)


def bicharacter_exponents(pair: TwistingPair) -> np.ndarray:
    """Exact integer exponent table E with ξ = exp(2πi E/M)."""
    backing = pair.backing
    if not isinstance(backing, BicharacterBacking):
        raise TwistingError("Pair is not bicharacter-backed")
    vectors = np.array(
        [lattice_vector(x, backing.modulus, backing.rank) for x in range(pair.group.size)],
        dtype=np.int64,
    )
    b = np.asarray(backing.matrix, dtype=np.int64)
    return (vectors @ b @ vectors.T) % backing.order


def _adjoint_action_matrix(w: AlgebraElement) -> np.ndarray:
    """M×M matrix of a ↦ w·a·w*."""
    return w.left_matrix() @ w.adjoint().right_matrix()


def check_multiplier(p: TwistingPair, tol: float = DEFAULT_TOLERANCE) -> AxiomReport:
    """
    Exhaustive C*-multiplier check.

    Entries: M1, unitxi, M2 over all (x,y,z), M3 over all (x,y) on every
    matrix unit, sigmainvert over all y, sigma_e, and M4 (vacuous).
    """
    group = p.group
    n = group.size
    e = group.identity
    cayley = group.cayley
    report = AxiomReport(title="multiplier", tolerance=tol)

    one = p.shape.unit()
    m1 = [(p.xi[x][e].max_deviation(one), (x, e)) for x in range(n)]
    m1 += [(p.xi[e][y].max_deviation(one), (e, y)) for y in range(n)]
    worst = max(m1, key=lambda t: t[0])
    report.record("M1", worst[0], worst[1])

    unit = [(unitarity_residual(p.xi[x][y]), (x, y)) for x in range(n) for y in range(n)]
    worst = max(unit, key=lambda t: t[0])
    report.record("unitxi", worst[0], worst[1])

    # M2: σ_x ξ(y,z) = ξ(x,y) ξ(xy,z) ξ(x,yz)*
    m2_worst, m2_where = 0.0, None
    blocks = [p.xi_block(beta) for beta in range(len(p.shape.blocks))]
    for beta, xi_b in enumerate(blocks):
        for x in range(n):
            s = p.sigma[x]
            u = s.u.mats[beta]
            source = blocks[s.perm[beta]]
            lhs = u @ source @ u.conj().T
            rhs = (
                xi_b[x, :][:, None]
                @ xi_b[cayley[x, :], :]
                @ np.conj(np.swapaxes(xi_b[x, cayley], -1, -2))
            )
            dev = np.max(np.abs(lhs - rhs), axis=(-1, -2))
            y, z = np.unravel_index(int(np.argmax(dev)), dev.shape)
            if dev[y, z] > m2_worst:
                m2_worst, m2_where = float(dev[y, z]), (x, int(y), int(z))
    report.record("M2", m2_worst, m2_where)

    # M3: σ_x σ_y = Ad ξ(x,y) ∘ σ_xy as linear maps
    sig = p.sigma_matrices
    m3_worst, m3_where = 0.0, None
    for x in range(n):
        for y in range(n):
            lhs = sig[x] @ sig[y]
            rhs = _adjoint_action_matrix(p.xi[x][y]) @ sig[cayley[x, y]]
            dev = float(np.max(np.abs(lhs - rhs)))
            if dev > m3_worst:
                m3_worst, m3_where = dev, (x, y)
    report.record("M3", m3_worst, m3_where)

    # σ_y⁻¹ a = ξ(y⁻¹,y)* σ_{y⁻¹}(a) ξ(y⁻¹,y)
    inv_worst, inv_where = 0.0, None
    for y in range(n):
        yi = group.inverse_of(y)
        lhs = p.sigma[y].inverse().matrix
        rhs = _adjoint_action_matrix(p.xi[yi][y].adjoint()) @ sig[yi]
        dev = float(np.max(np.abs(lhs - rhs)))
        if dev > inv_worst:
            inv_worst, inv_where = dev, (y,)
    report.record("sigmainvert", inv_worst, inv_where)

    report.record("sigma_e", float(np.max(np.abs(sig[e] - np.eye(p.shape.dim)))), (e,))
    report.vacuous("M4", M4_NOTE)
    return report


def check_scalar_cocycle(p: TwistingPair, tol: float = DEFAULT_TOLERANCE) -> AxiomReport:
    """
    Scalar cocycle identity ξ(x,y)ξ(xy,z) = ξ(x,yz)ξ(y,z) over all triples.

    Also records "M2_agreement", the gap between this residual and the M2
    residual; for unit-modulus scalars the two coincide.

    Raises:
        NotScalarAlgebraError: If A is not C
    """
    if not p.is_scalar:
        raise NotScalarAlgebraError(
            f"Scalar cocycle check needs A = C, got blocks {list(p.shape.blocks)}"
        )
    xi = p.scalar_table()
    cayley = p.group.cayley
    lhs = xi[:, :, None] * xi[cayley, :]
    rhs = xi[:, cayley] * xi[None, :, :]
    dev = np.abs(lhs - rhs)
    where = tuple(int(v) for v in np.unravel_index(int(np.argmax(dev)), dev.shape))
    residual = float(dev[where])

    report = AxiomReport(title="scalar-cocycle", tolerance=tol)
    report.record("cocycle", residual, where)
    m2 = check_multiplier(p, tol).residual("M2")
    report.record("M2_agreement", abs(residual - m2), note="σ trivial for A = C")
    return report
