"""Crossed product A ×_τ X: twisted convolution, involution, norms and the GNS representation."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from ccr_forge.cstar_algebra import (
    AlgebraElement,
    AlgebraShape,
    ShapeMismatchError,
    operator_norm,
    trace_functional,
)
from ccr_forge.finite_group import FiniteGroup
from ccr_forge.linalg import Eigensolver, spectral_norm
from ccr_forge.projective_action import (
    CField,
    ClosedForm,
    ProjectiveAction,
    action_from_pair,
    delta_field,
    require_action,
    zero_field,
)
from ccr_forge.reports import DEFAULT_TOLERANCE, AxiomReport
from ccr_forge.twisting import TwistingPair

logger = logging.getLogger(__name__)

DEFAULT_NORM_TOLERANCE = 1.0e-8
POSITIVITY_TOLERANCE = 1.0e-12
UNIT_NOTE = "exact unit delta(e,1) used in place of an approximate unit"

BasisLabel = Tuple[str, int, int, int]  # (x, block, row, col)


class GramNotIdentityError(RuntimeError):
    """The matrix-unit basis is not orthonormal under the trace inner product."""

    def __init__(self, deviation: float) -> None:
        super().__init__(
            f"GNS Gram matrix deviates from the identity by {deviation:.3e}; "
            "σ does not preserve the trace"
        )
        self.deviation = deviation


@dataclass(frozen=True, eq=False)
class GnsRep:
    """
    Left-regular representation on A^X with ⟨f,g⟩ = tr((f*·g)(e)).

    The basis delta_field(x, E_ij^(β)) is orthonormal, so leftmul(f) is the
    matrix of g ↦ f·g in plain coordinates.
    """

    basis: Tuple[BasisLabel, ...]
    gram_deviation: float
    product: "CrossedProduct"

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def leftmul(self, f: CField) -> np.ndarray:
        return self.product.leftmul(f)

    def unitary(self, x: int) -> np.ndarray:
        """U(x) = π(W(x))."""
        return self.product.leftmul(self.product.weyl_element(x))

    def pi(self, a: AlgebraElement) -> np.ndarray:
        """π(a) = leftmul(ζ(a))."""
        return self.product.leftmul(self.product.zeta_embed(a))


@dataclass(frozen=True)
class StructureConstants:
    """c[p,q,r] with b_p·b_q = Σ_r c[p,q,r]·b_r over the GNS basis."""

    tensor: np.ndarray
    basis: Tuple[BasisLabel, ...]
    associativity_residual: float

    def entries(self, threshold: float = 1.0e-14) -> List[Tuple[int, int, int, complex]]:
        """Nonzero entries as (p, q, r, value)."""
        idx = np.argwhere(np.abs(self.tensor) > threshold)
        return [(int(p), int(q), int(r), complex(self.tensor[p, q, r])) for p, q, r in idx]


@dataclass(frozen=True, eq=False)
class CrossedProduct:
    """
    A ×_τ X over a finite group with counting measure (Δ ≡ 1).

    Args:
        action: The projective action τ
        eigensolver: Solver used by cstar_norm
        tolerance: Gram-matrix tolerance for the GNS check
    """

    action: ProjectiveAction
    eigensolver: Eigensolver = "lapack"
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    @property
    def shape(self) -> AlgebraShape:
        return self.action.shape

    @property
    def pair(self) -> Optional[TwistingPair]:
        return self.action.pair

    @property
    def dimension(self) -> int:
        return self.action.dim

    @property
    def unit(self) -> CField:
        return self.weyl_element(self.group.identity)

    @cached_property
    def _left_units(self) -> np.ndarray:
        return self.shape.left_unit_matrices()

    @cached_property
    def _adjoint(self) -> np.ndarray:
        return self.shape.adjoint_permutation()

    def _check(self, f: CField) -> None:
        if f.shape != self.shape or not f.group.matches(self.group):
            raise ShapeMismatchError("Field does not belong to this crossed product")

    def tau(self, x: int, f: CField) -> CField:
        return self.action.apply(x, f)

    def _point_left(self, f: CField) -> np.ndarray:
        """(N, M, M): left multiplication matrix of every f(y)."""
        vals = f.to_vector().reshape(self.group.size, self.shape.dim)
        return np.einsum("yq,qij->yij", vals, self._left_units)

    def convolve(self, f: CField, g: CField) -> CField:
        """(fg)(x) = Σ_y f(y)·(τ_y g)(x)."""
        self._check(f)
        self._check(g)
        n, m = self.group.size, self.shape.dim
        tg = (self.action.operators @ g.to_vector()).reshape(n, n, m)
        out = np.einsum("yij,yxj->xi", self._point_left(f), tg)
        return CField.from_vector(self.group, self.shape, out.reshape(-1))

    def involution(self, f: CField) -> CField:
        """f*(x) = (τ_x f)(e)*."""
        self._check(f)
        n, m = self.group.size, self.shape.dim
        tf = (self.action.operators @ f.to_vector()).reshape(n, n, m)
        out = np.conj(tf[:, self.group.identity][:, self._adjoint])
        return CField.from_vector(self.group, self.shape, out.reshape(-1))

    def l1_norm(self, f: CField) -> float:
        """Σ_x ‖f(x)‖."""
        return float(sum(operator_norm(v) for v in f.values))

    def zeta_embed(self, a: AlgebraElement) -> CField:
        """ζ(a) = delta_field(e, a); left convolution by it is pointwise a·f."""
        return delta_field(self.group, self.shape, self.group.identity, a)

    def weyl_element(self, x: int) -> CField:
        """W(x) = delta_field(x, 1)."""
        return delta_field(self.group, self.shape, x, self.shape.unit())

    def leftmul(self, f: CField) -> np.ndarray:
        """D×D matrix of g ↦ f·g: Σ_y (1 ⊗ L(f(y)))·τ_y."""
        self._check(f)
        n, m, d = self.group.size, self.shape.dim, self.dimension
        ops = self.action.operators.reshape(n, n, m, d)
        return np.einsum("yij,yxjd->xid", self._point_left(f), ops).reshape(d, d)

    def inner_product(self, f: CField, g: CField) -> complex:
        """⟨f,g⟩ = tr((f*·g)(e))."""
        return trace_functional(self.convolve(self.involution(f), g)(self.group.identity))

    def basis_labels(self) -> Tuple[BasisLabel, ...]:
        return tuple(
            (self.group.label(x), beta, i, j)
            for x in range(self.group.size)
            for beta, i, j in self.shape.matrix_units()
        )

    def basis_field(self, p: int) -> CField:
        vec = np.zeros(self.dimension, dtype=np.complex128)
        vec[p] = 1.0
        return CField.from_vector(self.group, self.shape, vec)

    @cached_property
    def basis_left_matrices(self) -> np.ndarray:
        """(D, D, D) stack of leftmul(b_p)."""
        return np.array([self.leftmul(self.basis_field(p)) for p in range(self.dimension)])

    def gns_representation(self) -> GnsRep:
        """Faithful GNS representation; raises GramNotIdentityError on a corrupt action."""
        return self._gns

    @cached_property
    def _gns(self) -> GnsRep:
        m, d = self.shape.dim, self.dimension
        e = self.group.identity
        weights = self.shape.trace_weights()
        gram = np.empty((d, d), dtype=np.complex128)
        for p in range(d):
            star = self.leftmul(self.involution(self.basis_field(p)))
            gram[p] = weights @ star[e * m : (e + 1) * m, :]
        deviation = float(np.max(np.abs(gram - np.eye(d))))
        if deviation > self.tolerance:
            raise GramNotIdentityError(deviation)
        logger.info(f"GNS representation of dimension {d} (Gram deviation {deviation:.3e})")
        return GnsRep(basis=self.basis_labels(), gram_deviation=deviation, product=self)

    def cstar_norm(self, f: CField) -> float:
        """Operator norm of leftmul(f) in the faithful GNS representation."""
        self.gns_representation()
        return spectral_norm(self.leftmul(f), self.eigensolver)

    def vector_state(self, f: CField, g: CField) -> complex:
        """ω_f(g) = ⟨f, g·f⟩ = tr((f*·g·f)(e))."""
        return self.inner_product(f, self.convolve(g, f))

    def center_dimension(self, tol: float = 1.0e-9) -> int:
        """Dimension of the centre, from the commutant equations over the basis."""
        mats = self.basis_left_matrices
        d = self.dimension
        comm = np.einsum("pab,qbc->pqac", mats, mats) - np.einsum("qab,pbc->pqac", mats, mats)
        system = comm.reshape(d, -1).T
        rank = int(np.linalg.matrix_rank(system, tol=tol))
        return d - rank

    def structure_constants(self) -> StructureConstants:
        mats = self.basis_left_matrices
        tensor = np.transpose(mats, (0, 2, 1)).copy()  # c[p,q,r] = L_p[r,q]
        left = np.einsum("pqr,rst->pqst", tensor, tensor)
        right = np.einsum("qsr,prt->pqst", tensor, tensor)
        residual = float(np.max(np.abs(left - right))) if tensor.size else 0.0
        return StructureConstants(
            tensor=tensor, basis=self.basis_labels(), associativity_residual=residual
        )


def crossed_product(
    source: Union[TwistingPair, ProjectiveAction],
    eigensolver: Eigensolver = "lapack",
    tolerance: float = DEFAULT_TOLERANCE,
) -> CrossedProduct:
    """
    Crossed product of a valid pair (via its closed-form action) or of an action.

    Raises:
        AxiomFailureError: The pair fails check_multiplier
        NotAnActionError: An operator table fails check_action
    """
    if isinstance(source, TwistingPair):
        action = action_from_pair(source, tolerance)
    else:
        action = source
        if not isinstance(action.form, ClosedForm):
            require_action(action, tolerance)
    cp = CrossedProduct(action=action, eigensolver=eigensolver, tolerance=tolerance)
    logger.info(
        f"Crossed product over |X|={cp.group.size}, A blocks {list(cp.shape.blocks)}, "
        f"D={cp.dimension}"
    )
    return cp


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0.0 else abs(a)


def _normalized(f: CField) -> CField:
    scale = f.max_abs()
    return f.scale(1.0 / scale) if scale > 1.0 else f


def identity_report(
    cp: CrossedProduct,
    fields: Sequence[CField],
    tol: float = DEFAULT_TOLERANCE,
    norm_tol: float = DEFAULT_NORM_TOLERANCE,
) -> AxiomReport:
    """
    Crossed-product identities on the supplied fields.

    Binary and ternary identities use cyclically consecutive fields; the
    τ-identities run over every group element. Norm identities are
    relative and judged at norm_tol.
    """
    fs = [_normalized(f) for f in fields]
    if not fs:
        raise ValueError("identity_report needs at least one field")
    k = len(fs)
    group = cp.group
    report = AxiomReport(title="crossed-product", tolerance=tol)

    def worst(pairs: Sequence[Tuple[float, Any]]) -> Tuple[float, Any]:
        return max(pairs, key=lambda t: t[0], default=(0.0, None))

    triples = [(fs[i], fs[(i + 1) % k], fs[(i + 2) % k]) for i in range(k)]
    products = [cp.convolve(f, g) for f, g, _ in triples]
    stars = [cp.involution(f) for f in fs]

    r, w = worst(
        [
            (cp.convolve(fg, h).max_deviation(cp.convolve(f, cp.convolve(g, h))), (i,))
            for i, ((f, g, h), fg) in enumerate(zip(triples, products))
        ]
    )
    report.record("associativity", r, w)

    unit = cp.unit
    unit_law = []
    for i, f in enumerate(fs):
        left = cp.convolve(unit, f).max_deviation(f)
        right = cp.convolve(f, unit).max_deviation(f)
        unit_law.append((max(left, right), (i,)))
    r, w = worst(unit_law)
    report.record("unit", r, w, note=UNIT_NOTE)

    r, w = worst([(cp.involution(s).max_deviation(fs[i]), (i,)) for i, s in enumerate(stars)])
    report.record("involutive", r, w)

    r, w = worst(
        [
            (cp.involution(fg).max_deviation(cp.convolve(stars[(i + 1) % k], stars[i])), (i,))
            for i, fg in enumerate(products)
        ]
    )
    report.record("product_adjoint", r, w)

    leftmullem, isoprop, l1_tau, cstar_tau = [], [], [], []
    cstar = [cp.cstar_norm(f) for f in fs]
    for i, (f, g, _) in enumerate(triples):
        fg = products[i]
        fstar_g = cp.convolve(stars[i], g)
        for x in group.elements():
            tf = cp.tau(x, f)
            tg = cp.tau(x, g)
            leftmullem.append((cp.tau(x, fg).max_deviation(cp.convolve(tf, g)), (i, x)))
            isoprop.append((cp.convolve(cp.involution(tf), tg).max_deviation(fstar_g), (i, x)))
            l1_tau.append((_relative(cp.l1_norm(tf), cp.l1_norm(f)), (i, x)))
            cstar_tau.append((_relative(cp.cstar_norm(tf), cstar[i]), (i, x)))
    report.record("leftmullem", *worst(leftmullem))
    report.record("isoprop", *worst(isoprop))

    l1 = [cp.l1_norm(f) for f in fs]
    submultiplicative = []
    for i, fg in enumerate(products):
        bound = l1[i] * l1[(i + 1) % k]
        submultiplicative.append((max(0.0, cp.l1_norm(fg) - bound) / max(1.0, bound), (i,)))
    r, w = worst(submultiplicative)
    report.record("l1_submultiplicative", r, w, tolerance=norm_tol)
    r, w = worst([(_relative(cp.l1_norm(s), l1[i]), (i,)) for i, s in enumerate(stars)])
    report.record("l1_adjoint", r, w, tolerance=norm_tol)
    report.record("l1_tau", *worst(l1_tau), tolerance=norm_tol)
    r, w = worst([(max(0.0, cstar[i] - l1[i]) / max(1.0, l1[i]), (i,)) for i in range(k)])
    report.record("cstar_le_l1", r, w, tolerance=norm_tol)
    r, w = worst(
        [
            (_relative(cp.cstar_norm(cp.convolve(stars[i], f)), cstar[i] ** 2), (i,))
            for i, f in enumerate(fs)
        ]
    )
    report.record("cstar_identity", r, w, tolerance=norm_tol)
    report.record("cstar_tau", *worst(cstar_tau), tolerance=norm_tol)

    positivity, bound = [], []
    max_block = max(cp.shape.blocks)
    trace_one = float(sum(cp.shape.blocks))
    for i, (f, h, _) in enumerate(triples):
        omega = cp.vector_state(f, cp.convolve(cp.involution(h), h))
        scale = max(1.0, abs(omega))
        positivity.append((max(max(0.0, -omega.real), abs(omega.imag)) / scale, (i,)))
        limit = l1[i] ** 2 * trace_one * cp.l1_norm(h) * max_block
        state = abs(cp.vector_state(f, h))
        bound.append((max(0.0, state - limit) / max(1.0, limit), (i,)))
    report.record("positivity", *worst(positivity), tolerance=POSITIVITY_TOLERANCE)
    report.record("state_bound", *worst(bound), tolerance=norm_tol)

    zero = zero_field(group, cp.shape)
    nondegenerate = [
        (f.max_abs() if cp.cstar_norm(f) <= tol else 0.0, (i,)) for i, f in enumerate(fs + [zero])
    ]
    report.record("nondegenerate", *worst(nondegenerate))
    return report
