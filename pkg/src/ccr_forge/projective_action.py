"""Projective actions τ on C_c(X,A) ≅ A^X and the twisting-pair correspondence."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ccr_forge.cstar_algebra import (
    AlgebraElement,
    AlgebraShape,
    Scalar,
    ShapeMismatchError,
    factor_automorphism,
    stacked_operator_norms,
)
from ccr_forge.finite_group import FiniteGroup
from ccr_forge.reports import DEFAULT_TOLERANCE, AxiomReport
from ccr_forge.rng import SeededRNG
from ccr_forge.twisting import TwistingPair, check_multiplier, pair_from_tables

logger = logging.getLogger(__name__)

DEFAULT_RANDOM_FIELDS = 16
DEFAULT_SEED = 42


class AxiomFailureError(ValueError):
    """A required axiom check failed; the report is attached."""

    def __init__(self, message: str, report: AxiomReport) -> None:
        super().__init__(message)
        self.report = report


class NotAnActionError(AxiomFailureError):
    """The operator table violates (A1)–(A4)."""

    pass


@dataclass(frozen=True, eq=False)
class CField:
    """
    Function X → A, stored as one AlgebraElement per group element.

    Vectorized layout is element-major: coordinate x·M + m.
    """

    group: FiniteGroup
    shape: AlgebraShape
    values: Tuple[AlgebraElement, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.group.size:
            raise ShapeMismatchError(
                f"Field needs {self.group.size} values, got {len(self.values)}"
            )
        for v in self.values:
            if v.shape != self.shape:
                raise ShapeMismatchError("Field value lives in a different algebra")
        object.__setattr__(self, "values", tuple(self.values))

    def __call__(self, x: int) -> AlgebraElement:
        return self.values[x]

    @property
    def dim(self) -> int:
        return self.group.size * self.shape.dim

    @classmethod
    def from_vector(cls, group: FiniteGroup, shape: AlgebraShape, vec: np.ndarray) -> "CField":
        m = shape.dim
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.shape != (group.size * m,):
            raise ShapeMismatchError(f"Expected vector of length {group.size * m}, got {vec.shape}")
        values = [
            AlgebraElement.from_vector(shape, vec[x * m : (x + 1) * m]) for x in range(group.size)
        ]
        return cls(group, shape, tuple(values))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([v.to_vector() for v in self.values])

    def _check(self, other: "CField") -> None:
        if other.shape != self.shape or not other.group.matches(self.group):
            raise ShapeMismatchError("Fields live over different groups or algebras")

    def __add__(self, other: "CField") -> "CField":
        self._check(other)
        values = tuple(a + b for a, b in zip(self.values, other.values))
        return CField(self.group, self.shape, values)

    def __sub__(self, other: "CField") -> "CField":
        self._check(other)
        values = tuple(a - b for a, b in zip(self.values, other.values))
        return CField(self.group, self.shape, values)

    def __neg__(self) -> "CField":
        return CField(self.group, self.shape, tuple(-a for a in self.values))

    def scale(self, c: Scalar) -> "CField":
        return CField(self.group, self.shape, tuple(a * c for a in self.values))

    def __rmul__(self, c: Scalar) -> "CField":
        return self.scale(c)

    def left_multiply(self, a: AlgebraElement) -> "CField":
        """Pointwise a·f(x)."""
        return CField(self.group, self.shape, tuple(a * v for v in self.values))

    def max_deviation(self, other: "CField") -> float:
        self._check(other)
        return max(a.max_deviation(b) for a, b in zip(self.values, other.values))

    def max_abs(self) -> float:
        return max(v.max_abs() for v in self.values)


def zero_field(group: FiniteGroup, shape: AlgebraShape) -> CField:
    return CField(group, shape, tuple(shape.zero() for _ in range(group.size)))


def delta_field(group: FiniteGroup, shape: AlgebraShape, x: int, a: AlgebraElement) -> CField:
    """values[y] = a if y == x else 0."""
    values = [shape.zero() for _ in range(group.size)]
    values[x] = a
    return CField(group, shape, tuple(values))


def pure_field(
    group: FiniteGroup, shape: AlgebraShape, lam: Sequence[Scalar], a: AlgebraElement
) -> CField:
    """values[x] = λ(x)·a."""
    if len(lam) != group.size:
        raise ShapeMismatchError(f"λ needs {group.size} entries, got {len(lam)}")
    return CField(group, shape, tuple(a * complex(c) for c in lam))


def random_field(group: FiniteGroup, shape: AlgebraShape, rng: SeededRNG) -> CField:
    return CField(group, shape, tuple(rng.random_element(shape) for _ in range(group.size)))


def basis_fields(group: FiniteGroup, shape: AlgebraShape) -> Sequence[CField]:
    """delta_field(x, E_p) in vectorization order."""
    return [
        delta_field(group, shape, x, shape.matrix_unit(*mu))
        for x in range(group.size)
        for mu in shape.matrix_units()
    ]


@dataclass(frozen=True)
class ClosedForm:
    """τ given by τ_x f(y) = σ_x(f(x⁻¹y))·ξ(x,x⁻¹y)."""

    pair: TwistingPair


@dataclass(frozen=True, eq=False)
class ExplicitTable:
    """τ given as one (N·M)×(N·M) matrix per group element."""

    operators: Tuple[np.ndarray, ...]
    labels: Tuple[str, ...]


ActionForm = Union[ClosedForm, ExplicitTable]


@dataclass(frozen=True, eq=False)
class ProjectiveAction:
    """Family τ_x of linear maps on A^X."""

    group: FiniteGroup
    shape: AlgebraShape
    form: ActionForm

    @property
    def dim(self) -> int:
        return self.group.size * self.shape.dim

    @property
    def pair(self) -> Optional[TwistingPair]:
        return self.form.pair if isinstance(self.form, ClosedForm) else None

    def apply(self, x: int, f: CField) -> CField:
        """τ_x f."""
        if isinstance(self.form, ClosedForm):
            p = self.form.pair
            g = self.group
            values = []
            for y in range(g.size):
                src = g.multiply(g.inverse_of(x), y)
                values.append(p.sigma[x](f.values[src]) * p.xi[x][src])
            return CField(g, self.shape, tuple(values))
        return CField.from_vector(self.group, self.shape, self.operators[x] @ f.to_vector())

    def operator(self, x: int) -> np.ndarray:
        return self.operators[x]

    @cached_property
    def operators(self) -> np.ndarray:
        """(N, D, D) stack of the matrices of τ_x, D = N·M."""
        if isinstance(self.form, ExplicitTable):
            return np.array(self.form.operators, dtype=np.complex128)
        p = self.form.pair
        g = self.group
        n, m = g.size, self.shape.dim
        ops = np.zeros((n, n, m, n, m), dtype=np.complex128)
        for x in range(n):
            s = p.sigma_matrices[x]
            xinv = g.inverse_of(x)
            for y in range(n):
                src = g.multiply(xinv, y)
                ops[x, y, :, src, :] = p.xi[x][src].right_matrix() @ s
        return ops.reshape(n, n * m, n * m)


def lift(group: FiniteGroup, matrix: np.ndarray) -> np.ndarray:
    """I_N ⊗ matrix: pointwise action of an M×M map on A^X."""
    return np.kron(np.eye(group.size), matrix)


def action_from_pair(p: TwistingPair, tol: float = DEFAULT_TOLERANCE) -> ProjectiveAction:
    """
    Closed-form action of a twisting pair.

    Raises:
        AxiomFailureError: If p fails check_multiplier at tol
    """
    report = check_multiplier(p, tol)
    if not report.passed:
        failed = ", ".join(e.axiom for e in report.failures())
        raise AxiomFailureError(f"Twisting pair fails {failed}", report)
    return ProjectiveAction(group=p.group, shape=p.shape, form=ClosedForm(p))


def explicit_action(
    group: FiniteGroup, shape: AlgebraShape, matrices: Sequence[np.ndarray]
) -> ProjectiveAction:
    """Wrap raw operator matrices, one per group element, as an action."""
    d = group.size * shape.dim
    if len(matrices) != group.size:
        raise ShapeMismatchError(f"Need {group.size} operators, got {len(matrices)}")
    ops = []
    for x, mat in enumerate(matrices):
        arr = np.asarray(mat, dtype=np.complex128)
        if arr.shape != (d, d):
            raise ShapeMismatchError(f"Operator {group.label(x)} must be {d}×{d}, got {arr.shape}")
        ops.append(arr)
    return ProjectiveAction(
        group=group,
        shape=shape,
        form=ExplicitTable(operators=tuple(ops), labels=tuple(group.labels)),
    )


def to_explicit(t: ProjectiveAction) -> ProjectiveAction:
    return explicit_action(t.group, t.shape, list(t.operators))


def extract_xi_vectors(t: ProjectiveAction) -> np.ndarray:
    """(N, N, M): vec of (τ_y δ(z,1))(yz)."""
    g = t.group
    n, m = g.size, t.shape.dim
    ops = t.operators.reshape(n, n, m, n, m)
    one = t.shape.unit().to_vector()
    out = np.empty((n, n, m), dtype=np.complex128)
    for y in range(n):
        for z in range(n):
            out[y, z] = ops[y, g.multiply(y, z), :, z, :] @ one
    return out


def extract_sigma_matrices(t: ProjectiveAction) -> np.ndarray:
    """(N, M, M): columns are vec of (τ_x δ(e, E_p))(x)."""
    g = t.group
    n, m = g.size, t.shape.dim
    ops = t.operators.reshape(n, n, m, n, m)
    return np.array([ops[x, x, :, g.identity, :] for x in range(n)])


def _fields_matrix(t: ProjectiveAction, rng: SeededRNG, count: int) -> np.ndarray:
    """(D, D + count): identity columns followed by random complex fields."""
    d = t.dim
    random = [random_field(t.group, t.shape, rng).to_vector() for _ in range(count)]
    if not random:
        return np.eye(d, dtype=np.complex128)
    return np.concatenate([np.eye(d, dtype=np.complex128), np.array(random).T], axis=1)


def check_action(
    t: ProjectiveAction,
    tol: float = DEFAULT_TOLERANCE,
    rng: Optional[SeededRNG] = None,
    random_fields: int = DEFAULT_RANDOM_FIELDS,
) -> AxiomReport:
    """
    Verify (A1)–(A4) plus tautau, zetacon and invertibility.

    Basis fields are delta_field(x, E_p); random fields come from rng
    (seeded with 42 when omitted).
    """
    rng = rng or SeededRNG(DEFAULT_SEED)
    g = t.group
    n, m, d = g.size, t.shape.dim, t.dim
    e = g.identity
    cayley = g.cayley
    ops = t.operators
    blocks = ops.reshape(n, n, m, n, m)
    left_units = t.shape.left_unit_matrices()
    adj = t.shape.adjoint_permutation()
    fields = _fields_matrix(t, rng, random_fields)
    report = AxiomReport(title="action", tolerance=tol)

    a1 = float(np.max(np.abs(ops[e] - np.eye(d))))
    report.record("A1", a1, (e,))

    # A2: τ_y ∘ L(g(z)) ∘ τ_z = L((τ_y g)(yz)) ∘ τ_yz for every field g
    a2_worst, a2_where = 0.0, None
    ops_split = ops.reshape(n, n, m, d)
    for y in range(n):
        for z in range(n):
            yz = cayley[y, z]
            coeffs = blocks[y, yz].reshape(m, d) @ fields  # (τ_y g)(yz) per column
            lm_rhs = np.einsum("qk,qij->kij", coeffs, left_units)
            rhs = np.matmul(lm_rhs[:, None], ops_split[yz][None])
            gz = fields[z * m : (z + 1) * m, :]
            lm_lhs = np.einsum("qk,qij->kij", gz, left_units)
            inner = np.matmul(lm_lhs[:, None], ops_split[z][None]).reshape(-1, d, d)
            lhs = np.matmul(ops[y], inner).reshape(rhs.shape)
            dev = np.max(np.abs(lhs - rhs), axis=(1, 2, 3))
            k = int(np.argmax(dev))
            if dev[k] > a2_worst:
                a2_worst, a2_where = float(dev[k]), (y, z, k)
    report.record("A2", a2_worst, a2_where)

    # A3: g(x) = (τ_x f)(e)*, then (τ_x g)(y) = (τ_y f)(x)*
    tf = np.einsum("xab,bk->xak", ops, fields).reshape(n, n, m, -1)
    gvals = np.conj(tf[:, e][:, adj, :])  # (N, M, K)
    gvec = gvals.reshape(d, -1)
    tg = np.einsum("xab,bk->xak", ops, gvec).reshape(n, n, m, -1)
    expected = np.conj(np.swapaxes(tf, 0, 1)[:, :, adj, :])
    dev3 = np.max(np.abs(tg - expected), axis=2)
    where3 = tuple(int(v) for v in np.unravel_index(int(np.argmax(dev3)), dev3.shape))
    report.record("A3", float(dev3[where3]), where3)

    # A4: ‖(τ_x f)(y)‖ = ‖f(x⁻¹y)‖
    field_points = fields.reshape(n, m, -1)
    lhs_norms = stacked_operator_norms(t.shape, np.moveaxis(tf, 2, -1))  # (x, y, k)
    rhs_norms = stacked_operator_norms(t.shape, np.moveaxis(field_points, 1, -1))  # (z, k)
    source = cayley[g.inverse[:, None], np.arange(n)[None, :]]  # x⁻¹y
    dev4 = np.abs(lhs_norms - rhs_norms[source])
    where4 = tuple(int(v) for v in np.unravel_index(int(np.argmax(dev4)), dev4.shape))
    report.record("A4", float(dev4[where4]), where4)

    xi = extract_xi_vectors(t)
    sigma = extract_sigma_matrices(t)

    def left_of(vec: np.ndarray) -> np.ndarray:
        return lift(g, np.einsum("q,qij->ij", vec, left_units))

    worst, where = 0.0, None
    for y in range(n):
        for z in range(n):
            dev = float(np.max(np.abs(ops[y] @ ops[z] - left_of(xi[y, z]) @ ops[cayley[y, z]])))
            if dev > worst:
                worst, where = dev, (y, z)
    report.record("tautau", worst, where)

    worst, where = 0.0, None
    for x in range(n):
        for q in range(m):
            basis = np.zeros(m, dtype=np.complex128)
            basis[q] = 1.0
            dev = float(
                np.max(np.abs(ops[x] @ left_of(basis) - left_of(sigma[x] @ basis) @ ops[x]))
            )
            if dev > worst:
                worst, where = dev, (x, q)
    report.record("zetacon", worst, where)

    # τ_x τ_{x⁻¹} (ξ(x,x⁻¹)*·f) = f
    worst, where = 0.0, None
    for x in range(n):
        xinv = g.inverse_of(x)
        xi_star = np.conj(xi[x, xinv][adj])
        dev = float(np.max(np.abs(ops[x] @ ops[xinv] @ left_of(xi_star) - np.eye(d))))
        if dev > worst:
            worst, where = dev, (x,)
    report.record("invertible", worst, where)
    return report


def require_action(t: ProjectiveAction, tol: float = DEFAULT_TOLERANCE) -> AxiomReport:
    """
    check_action, raising when any axiom fails.

    Raises:
        NotAnActionError: t fails check_action at tol
    """
    report = check_action(t, tol)
    if not report.passed:
        failed = ", ".join(e.axiom for e in report.failures())
        raise NotAnActionError(f"Operator table is not a projective action: {failed}", report)
    return report


def pair_from_action(t: ProjectiveAction, tol: float = DEFAULT_TOLERANCE) -> TwistingPair:
    """
    Recover (ξ, σ) from an action.

    ξ(y,z) = (τ_y δ(z,1))(yz) and σ_x(a) = (τ_x δ(e,a))(x); σ_x is then
    factored into block permutation and unitary.

    Raises:
        NotAnActionError: t fails check_action at tol
        AutomorphismFactorizationError: Some σ_x is not a *-automorphism
    """
    require_action(t, tol)
    g = t.group
    xi_vec = extract_xi_vectors(t)
    sigma_mats = extract_sigma_matrices(t)
    xi = [
        [AlgebraElement.from_vector(t.shape, xi_vec[y, z]) for z in range(g.size)]
        for y in range(g.size)
    ]
    sigma = [factor_automorphism(t.shape, sigma_mats[x]) for x in range(g.size)]
    logger.info(f"Extracted twisting pair from action on |X|={g.size}")
    return pair_from_tables(g, t.shape, xi, sigma)


def pair_deviation(p: TwistingPair, q: TwistingPair) -> float:
    """Max entrywise gap between two pairs; σ compared as linear maps."""
    xi_gap = float(np.max(np.abs(p.xi_vectors - q.xi_vectors)))
    sigma_gap = float(np.max(np.abs(p.sigma_matrices - q.sigma_matrices)))
    return max(xi_gap, sigma_gap)


def action_deviation(s: ProjectiveAction, t: ProjectiveAction) -> float:
    """Max entrywise gap between the operator tables (their action on the basis)."""
    return float(np.max(np.abs(s.operators - t.operators)))


def roundtrip_deviation(
    obj: Union[TwistingPair, ProjectiveAction], tol: float = DEFAULT_TOLERANCE
) -> float:
    """
    Larger of the two round-trip gaps pair → action → pair and action → pair → action.

    Args:
        obj: A valid pair, or an action (closed-form or explicit)
        tol: Tolerance for the axiom checks guarding each conversion
    """
    if isinstance(obj, TwistingPair):
        pair = obj
        action = action_from_pair(pair, tol)
    else:
        action = obj
        pair = pair_from_action(action, tol)
    pair_gap = pair_deviation(pair, pair_from_action(action_from_pair(pair, tol), tol))
    action_gap = action_deviation(action, action_from_pair(pair_from_action(action, tol), tol))
    deviation = max(pair_gap, action_gap)
    logger.info(
        f"Round-trip deviation {deviation:.3e} (pair {pair_gap:.3e}, action {action_gap:.3e})"
    )
    return deviation
