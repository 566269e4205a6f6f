"""Weyl relations, CCR bicharacters and the sampled quantum-spacetime multiplier."""

import logging
import math
from dataclasses import dataclass
from itertools import product as cartesian_product
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ccr_forge.cstar_algebra import AlgebraElement
from ccr_forge.crossed_product import CrossedProduct
from ccr_forge.finite_group import lattice_index
from ccr_forge.projective_action import extract_sigma_matrices, extract_xi_vectors
from ccr_forge.reports import DEFAULT_TOLERANCE, AxiomReport, max_with_witness
from ccr_forge.twisting import BicharacterBacking, TwistingError, TwistingPair

logger = logging.getLogger(__name__)

SIGMA_TOLERANCE = 1.0e-9
WEYL_TOLERANCE = 1.0e-12

Number = Union[int, float]
Letter = Tuple[Number, ...]


class KindMismatchError(ValueError):
    """Word letters disagree in kind or dimension with each other or the multiplier."""

    pass


class ConstraintViolationError(ValueError):
    """(e, m) violates |e|² = |m|² or e·m = ±1."""

    def __init__(self, norm_gap: float, dot: float) -> None:
        super().__init__(
            f"Σ constraint violated: |e|²−|m|² = {norm_gap:.3e}, e·m = {dot:.6g} (need ±1)"
        )
        self.norm_gap = norm_gap
        self.dot = dot


@dataclass(frozen=True, eq=False)
class SigmaMatrix:
    """Antisymmetric 4×4 ε(e,m) with electric part e and magnetic part m."""

    e: Tuple[float, float, float]
    m: Tuple[float, float, float]
    eps: np.ndarray

    def to_dict(self) -> dict:
        return {"e": list(self.e), "m": list(self.m)}


def build_sigma_matrix(
    e: Sequence[float], m: Sequence[float], tol: float = SIGMA_TOLERANCE
) -> SigmaMatrix:
    """
    Validate (e, m) and assemble ε.

    Rows are (0, e), (−e₁, 0, m₃, −m₂),
    (−e₂, −m₃, 0, m₁), (−e₃, m₂, −m₁, 0).

    Raises:
        ConstraintViolationError: |e|² ≠ |m|² or e·m ≠ ±1 beyond tol
    """
    ev = np.asarray(e, dtype=float)
    mv = np.asarray(m, dtype=float)
    if ev.shape != (3,) or mv.shape != (3,):
        raise KindMismatchError(f"e and m must be 3-vectors, got {ev.shape} and {mv.shape}")
    norm_gap = float(ev @ ev - mv @ mv)
    dot = float(ev @ mv)
    if abs(norm_gap) > tol or abs(abs(dot) - 1.0) > tol:
        raise ConstraintViolationError(norm_gap, dot)
    e1, e2, e3 = ev
    m1, m2, m3 = mv
    eps = np.array(
        [
            [0.0, e1, e2, e3],
            [-e1, 0.0, m3, -m2],
            [-e2, -m3, 0.0, m1],
            [-e3, m2, -m1, 0.0],
        ]
    )
    eps.setflags(write=False)
    return SigmaMatrix(e=(e1, e2, e3), m=(m1, m2, m3), eps=eps)


@dataclass(frozen=True)
class WeylWord:
    """Ordered letters k₁, k₂, ...; the empty word stands for the unit."""

    letters: Tuple[Letter, ...]

    def __post_init__(self) -> None:
        letters = tuple(tuple(k) for k in self.letters)
        dims = {len(k) for k in letters}
        if len(dims) > 1:
            raise KindMismatchError(f"Letters have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "WeylWord":
        """Parse "k1;k2;..." with comma-separated components, e.g. "1,0;0,1"."""
        letters = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            letters.append(tuple(_parse_number(c) for c in chunk.split(",")))
        return cls(tuple(letters))

    @property
    def dimension(self) -> Optional[int]:
        return len(self.letters[0]) if self.letters else None

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, (int, np.integer)) for k in self.letters for c in k)

    def __add__(self, other: "WeylWord") -> "WeylWord":
        return WeylWord(self.letters + other.letters)

    def reversed(self) -> "WeylWord":
        return WeylWord(tuple(reversed(self.letters)))

    def to_text(self) -> str:
        return ";".join(",".join(str(c) for c in k) for k in self.letters)


def _parse_number(text: str) -> Number:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError as exc:
            raise KindMismatchError(f"Word component {text!r} is not a number") from exc


@dataclass(frozen=True)
class PhaseResult:
    """
    Accumulated phase of a reduced word.

    Attributes:
        phases: One unit-modulus value per sample (a single value for bicharacters)
        total: Summed letter k₁ + k₂ + ...
        exponent: Exact integer exponent mod M for bicharacter words
    """

    phases: np.ndarray
    total: Letter
    exponent: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "phases": [[float(z.real), float(z.imag)] for z in self.phases],
            "total": list(self.total),
            "exponent": self.exponent,
        }


@dataclass(frozen=True)
class BicharacterMultiplier:
    """ξ(k,k') = exp(2πi·(kᵀBk' mod M)/M) on Z_n^d with exact integer exponents."""

    modulus: int
    rank: int
    order: int
    matrix: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_backing(cls, backing: BicharacterBacking) -> "BicharacterMultiplier":
        return cls(backing.modulus, backing.rank, backing.order, backing.matrix)

    @property
    def samples(self) -> int:
        return 1

    def zero(self) -> Letter:
        return (0,) * self.rank

    def check_letter(self, k: Letter) -> None:
        if len(k) != self.rank:
            raise KindMismatchError(f"Letter {k} has dimension {len(k)}, expected {self.rank}")
        if not all(isinstance(c, (int, np.integer)) for c in k):
            raise KindMismatchError(f"Letter {k} is not an integer vector")

    def exponent(self, k: Letter, kp: Letter) -> int:
        b = np.asarray(self.matrix, dtype=np.int64)
        value = np.asarray(k, dtype=np.int64) @ b @ np.asarray(kp, dtype=np.int64)
        return int(value) % self.order

    def add(self, k: Letter, kp: Letter) -> Letter:
        return tuple((int(a) + int(b)) % self.modulus for a, b in zip(k, kp))

    def evaluate(self, k: Letter, kp: Letter) -> np.ndarray:
        return np.array([np.exp(2j * math.pi * self.exponent(k, kp) / self.order)])


@dataclass(frozen=True, eq=False)
class FormMultiplier:
    """ξ(k,k')_s = exp(i·kᵀS_s k') for each sampled real form S_s."""

    forms: Tuple[np.ndarray, ...]

    @property
    def samples(self) -> int:
        return len(self.forms)

    @property
    def dimension(self) -> int:
        return int(self.forms[0].shape[0])

    def zero(self) -> Letter:
        return (0.0,) * self.dimension

    def check_letter(self, k: Letter) -> None:
        if len(k) != self.dimension:
            raise KindMismatchError(
                f"Letter {k} has dimension {len(k)}, expected {self.dimension}"
            )

    def add(self, k: Letter, kp: Letter) -> Letter:
        return tuple(float(a) + float(b) for a, b in zip(k, kp))

    def evaluate(self, k: Letter, kp: Letter) -> np.ndarray:
        kv = np.asarray(k, dtype=float)
        kpv = np.asarray(kp, dtype=float)
        return np.exp(1j * np.array([kv @ s @ kpv for s in self.forms]))


Multiplier = Union[BicharacterMultiplier, FormMultiplier]


def spacetime_multiplier(samples: Sequence[SigmaMatrix]) -> FormMultiplier:
    """ξ(k,k')(ε) = exp(i/2·kᵀεk') evaluated on every sample."""
    if not samples:
        raise KindMismatchError("Spacetime multiplier needs at least one ε sample")
    return FormMultiplier(tuple(0.5 * s.eps for s in samples))


def reduce_weyl_word(word: WeylWord, multiplier: Multiplier) -> PhaseResult:
    """
    Fold W(k₁)W(k₂)··· into phase·W(k₁+k₂+...).

    (phase, total) ← (phase·ξ(total, k), total + k), starting from (1, 0).

    Raises:
        KindMismatchError: A letter does not fit the multiplier
    """
    total = multiplier.zero()
    if isinstance(multiplier, BicharacterMultiplier):
        exponent = 0
        for k in word.letters:
            multiplier.check_letter(k)
            exponent = (exponent + multiplier.exponent(total, k)) % multiplier.order
            total = multiplier.add(total, k)
        phase = np.exp(2j * math.pi * exponent / multiplier.order)
        return PhaseResult(phases=np.array([phase]), total=total, exponent=exponent)

    phases = np.ones(multiplier.samples, dtype=np.complex128)
    for k in word.letters:
        multiplier.check_letter(k)
        phases = phases * multiplier.evaluate(total, k)
        total = multiplier.add(total, k)
    return PhaseResult(phases=phases, total=total)


def commutator_phase(k: Sequence[float], kp: Sequence[float], eps: SigmaMatrix) -> complex:
    """ξ(k,k')(ε)·conj(ξ(k',k)(ε)) = exp(i·kᵀεk')."""
    multiplier = spacetime_multiplier([eps])
    forward = multiplier.evaluate(tuple(k), tuple(kp))[0]
    backward = multiplier.evaluate(tuple(kp), tuple(k))[0]
    return complex(forward * np.conj(backward))


def check_word_multiplier(
    words: Sequence[WeylWord], multiplier: Multiplier, tol: float = WEYL_TOLERANCE
) -> AxiomReport:
    """
    Multiplier axioms on the letters the words actually use (and 0).

    σ is trivial and the values commute, so M3 holds identically.
    """
    letters: List[Letter] = [multiplier.zero()]
    for word in words:
        for k in word.letters:
            multiplier.check_letter(k)
            if k not in letters:
                letters.append(k)
    zero = multiplier.zero()
    report = AxiomReport(title="word-multiplier", tolerance=tol)

    m1 = [
        (float(np.max(np.abs(multiplier.evaluate(k, zero) - 1.0))), (k,)) for k in letters
    ] + [(float(np.max(np.abs(multiplier.evaluate(zero, k) - 1.0))), (k,)) for k in letters]
    report.record("M1", *max(m1, key=lambda t: t[0]))

    unit = [
        (float(np.max(np.abs(np.abs(multiplier.evaluate(a, b)) - 1.0))), (a, b))
        for a, b in cartesian_product(letters, repeat=2)
    ]
    report.record("unit_modulus", *max(unit, key=lambda t: t[0]))

    cocycle, bichar = [], []
    for a, b, c in cartesian_product(letters, repeat=3):
        lhs = multiplier.evaluate(a, b) * multiplier.evaluate(multiplier.add(a, b), c)
        rhs = multiplier.evaluate(a, multiplier.add(b, c)) * multiplier.evaluate(b, c)
        cocycle.append((float(np.max(np.abs(lhs - rhs))), (a, b, c)))
        left = multiplier.evaluate(multiplier.add(a, c), b)
        split = multiplier.evaluate(a, b) * multiplier.evaluate(c, b)
        bichar.append((float(np.max(np.abs(left - split))), (a, c, b)))
    report.record("cocycle", *max(cocycle, key=lambda t: t[0]))
    report.record("bicharacter", *max(bichar, key=lambda t: t[0]))
    report.vacuous("M3", "σ trivial and ξ central")
    report.vacuous("M4", "continuity not modeled")
    return report


def _pair_tables(cp: CrossedProduct) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized ξ (N,N,M) and σ matrices (N,M,M) of the product's action."""
    pair = cp.pair
    if pair is not None:
        return pair.xi_vectors, pair.sigma_matrices
    return extract_xi_vectors(cp.action), extract_sigma_matrices(cp.action)


def weyl_relation_report(cp: CrossedProduct, tol: float = WEYL_TOLERANCE) -> AxiomReport:
    """
    Weyl-element identities, in the algebra and in the GNS representation.

    Entries: wlaw, Wstar, sigmaW, unitary, ulaw (represented wlaw),
    covres (represented σ), tau_is_W (τ_x = left multiplication by W(x)).
    """
    group, shape = cp.group, cp.shape
    n, m = group.size, shape.dim
    xi_vec, sigma = _pair_tables(cp)
    gns = cp.gns_representation()
    report = AxiomReport(title="weyl", tolerance=tol)

    def element(vec: np.ndarray) -> AlgebraElement:
        return AlgebraElement.from_vector(shape, vec)

    weyl = [cp.weyl_element(x) for x in range(n)]
    stars = [cp.involution(w) for w in weyl]
    units = [gns.unitary(x) for x in range(n)]
    pi_xi = [[gns.pi(element(xi_vec[x, y])) for y in range(n)] for x in range(n)]

    wlaw, ulaw = (0.0, None), (0.0, None)
    for x in range(n):
        for y in range(n):
            xy = group.multiply(x, y)
            lhs = cp.convolve(weyl[x], weyl[y])
            rhs = cp.convolve(cp.zeta_embed(element(xi_vec[x, y])), weyl[xy])
            dev = lhs.max_deviation(rhs)
            if dev > wlaw[0]:
                wlaw = (dev, (x, y))
            rdev = float(np.max(np.abs(units[x] @ units[y] - pi_xi[x][y] @ units[xy])))
            if rdev > ulaw[0]:
                ulaw = (rdev, (x, y))
    report.record("wlaw", *wlaw)

    wstar = (0.0, None)
    for x in range(n):
        xinv = group.inverse_of(x)
        expected = cp.convolve(
            cp.zeta_embed(element(xi_vec[xinv, x]).adjoint()), weyl[xinv]
        )
        dev = stars[x].max_deviation(expected)
        if dev > wstar[0]:
            wstar = (dev, (x,))
    report.record("Wstar", *wstar)

    sigma_w, covres = (0.0, None), (0.0, None)
    for x in range(n):
        for q, mu in enumerate(shape.matrix_units()):
            a = shape.matrix_unit(*mu)
            image = element(sigma[x] @ a.to_vector())
            lhs = cp.convolve(cp.convolve(weyl[x], cp.zeta_embed(a)), stars[x])
            dev = lhs.max_deviation(cp.zeta_embed(image))
            if dev > sigma_w[0]:
                sigma_w = (dev, (x, q))
            rep = units[x] @ gns.pi(a) @ units[x].conj().T
            rdev = float(np.max(np.abs(rep - gns.pi(image))))
            if rdev > covres[0]:
                covres = (rdev, (x, q))
    report.record("sigmaW", *sigma_w)

    unitary = (0.0, None)
    for x in range(n):
        dev = max(
            cp.convolve(stars[x], weyl[x]).max_deviation(cp.unit),
            cp.convolve(weyl[x], stars[x]).max_deviation(cp.unit),
        )
        if dev > unitary[0]:
            unitary = (dev, (x,))
    report.record("unitary", *unitary)
    report.record("ulaw", *ulaw)
    report.record("covres", *covres)

    tau_w = (0.0, None)
    for x in range(n):
        dev = float(np.max(np.abs(units[x] - cp.action.operators[x])))
        if dev > tau_w[0]:
            tau_w = (dev, (x,))
    report.record("tau_is_W", *tau_w)
    logger.debug(f"Weyl report over |X|={n}, M={m}: max residual {report.max_residual:.3e}")
    return report


def group_commutator(cp: CrossedProduct, x: int, y: int) -> np.ndarray:
    """U(x)U(y)U(x)*U(y)* in the GNS representation."""
    gns = cp.gns_representation()
    ux, uy = gns.unitary(x), gns.unitary(y)
    return ux @ uy @ ux.conj().T @ uy.conj().T


def bicharacter_multiplier_of(pair: TwistingPair) -> BicharacterMultiplier:
    if not isinstance(pair.backing, BicharacterBacking):
        raise TwistingError("Pair is not bicharacter-backed")
    return BicharacterMultiplier.from_backing(pair.backing)


def represented_word_residual(
    cp: CrossedProduct, word: WeylWord, multiplier: BicharacterMultiplier
) -> float:
    """
    Gap between U(k₁)U(k₂)··· and phase·U(k₁+k₂+...) for a reduced lattice word.

    The group of cp must be the lattice Z_n^d of the multiplier.
    """
    if cp.group.size != multiplier.modulus**multiplier.rank:
        raise KindMismatchError(
            f"Crossed product over |X|={cp.group.size} is not Z_{multiplier.modulus}"
            f"^{multiplier.rank}"
        )
    result = reduce_weyl_word(word, multiplier)
    gns = cp.gns_representation()
    product = np.eye(cp.dimension, dtype=np.complex128)
    for k in word.letters:
        product = product @ gns.unitary(lattice_index(k, multiplier.modulus))
    expected = result.phases[0] * gns.unitary(lattice_index(result.total, multiplier.modulus))
    return float(np.max(np.abs(product - expected)))


def generator_commutator_residual(
    cp: CrossedProduct, multiplier: BicharacterMultiplier
) -> Tuple[float, Optional[Tuple[int, int]]]:
    """
    Max over unit-vector pairs (a, b) of ‖U(e_a)U(e_b)U(e_a)*U(e_b)* − c·1‖.

    c = ξ(e_a, e_b)·conj(ξ(e_b, e_a)), the commutation phase of the generators.
    """
    if cp.group.size != multiplier.modulus**multiplier.rank:
        raise KindMismatchError(
            f"Crossed product over |X|={cp.group.size} is not Z_{multiplier.modulus}"
            f"^{multiplier.rank}"
        )
    d = multiplier.rank
    generators = [tuple(1 if i == a else 0 for i in range(d)) for a in range(d)]
    identity = np.eye(cp.dimension, dtype=np.complex128)
    residuals: List[float] = []
    witnesses: List[Tuple[int, int]] = []
    for (a, ka), (b, kb) in cartesian_product(enumerate(generators), repeat=2):
        phase = multiplier.evaluate(ka, kb)[0] * np.conj(multiplier.evaluate(kb, ka)[0])
        commutator = group_commutator(
            cp, lattice_index(ka, multiplier.modulus), lattice_index(kb, multiplier.modulus)
        )
        residuals.append(float(np.max(np.abs(commutator - phase * identity))))
        witnesses.append((a, b))
    return max_with_witness(residuals, witnesses)
