"""Tests for weyl_ccr module."""
import cmath
import math
from typing import List, Tuple

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccr_forge.crossed_product import CrossedProduct, crossed_product
from ccr_forge.finite_group import lattice_index
from ccr_forge.rng import SeededRNG
from ccr_forge.twisting import TwistingError, bicharacter_pair, z2_phase_pair
from ccr_forge.weyl_ccr import (
    BicharacterMultiplier,
    ConstraintViolationError,
    KindMismatchError,
    WeylWord,
    bicharacter_multiplier_of,
    build_sigma_matrix,
    check_word_multiplier,
    commutator_phase,
    generator_commutator_residual,
    group_commutator,
    reduce_weyl_word,
    represented_word_residual,
    spacetime_multiplier,
    weyl_relation_report,
)
from tests.fixtures.pairs import fixture_pairs, randomized_pairs

Z5SQ = BicharacterMultiplier(modulus=5, rank=2, order=5, matrix=((0, 1), (0, 0)))

lattice_letters = st.tuples(st.integers(0, 4), st.integers(0, 4))
real_letters = st.tuples(*[st.floats(-5.0, 5.0, allow_nan=False)] * 4)


def _z5sq_product() -> CrossedProduct:
    return crossed_product(bicharacter_pair(5, 2, 5, [[0, 1], [0, 0]]))


def _sample_pair(angle: float, scale: float) -> Tuple[List[float], List[float]]:
    """(e, m) in the xy-plane with |e| = |m| and e·m = 1."""
    u = [math.cos(angle), math.sin(angle), 0.0]
    v = [-math.sin(angle), math.cos(angle), 0.0]
    b = math.sqrt(scale**2 - 1.0 / scale**2)
    e = [scale * c for c in u]
    m = [c / scale + b * w for c, w in zip(u, v)]
    return e, m


class TestSigmaMatrix:
    """ε(e, m) assembly and the constraint on (e, m)."""

    def test_layout(self) -> None:
        sample = build_sigma_matrix((1, 0, 0), (1, 0, 0))

        assert sample.eps[0, 1] == 1.0
        assert sample.eps[1, 0] == -1.0
        assert sample.eps[2, 3] == 1.0
        assert sample.eps[3, 2] == -1.0
        assert np.allclose(sample.eps, -sample.eps.T)

    def test_orthogonal_pair_violates_constraint(self) -> None:
        with pytest.raises(ConstraintViolationError, match="need ±1") as excinfo:
            build_sigma_matrix((1, 0, 0), (0, 1, 0))

        assert excinfo.value.dot == 0.0

    def test_unequal_norms_violate_constraint(self) -> None:
        with pytest.raises(ConstraintViolationError):
            build_sigma_matrix((2, 0, 0), (0.5, 0, 0))

    def test_negative_orientation_allowed(self) -> None:
        assert build_sigma_matrix((0, 1, 0), (0, -1, 0)).to_dict() == {
            "e": [0.0, 1.0, 0.0],
            "m": [0.0, -1.0, 0.0],
        }

    def test_wrong_length(self) -> None:
        with pytest.raises(KindMismatchError):
            build_sigma_matrix((1, 0), (1, 0))

    @settings(max_examples=50, deadline=None)
    @given(angle=st.floats(0.0, 2 * math.pi), scale=st.floats(1.0, 3.0))
    def test_valid_samples_are_antisymmetric(self, angle: float, scale: float) -> None:
        e, m = _sample_pair(angle, scale)
        sample = build_sigma_matrix(e, m)

        assert np.allclose(sample.eps + sample.eps.T, 0.0)
        k, kp = (1.0, 0.5, -2.0, 0.25), (0.0, 1.5, 1.0, -1.0)
        assert commutator_phase(k, kp, sample) * commutator_phase(kp, k, sample) == pytest.approx(
            1.0
        )


class TestWeylWord:
    def test_parse(self) -> None:
        word = WeylWord.parse("1,0; 0,1")

        assert word.letters == ((1, 0), (0, 1))
        assert word.dimension == 2
        assert word.is_integral
        assert word.to_text() == "1,0;0,1"

    def test_parse_real_letters(self) -> None:
        word = WeylWord.parse("0.5,0,0,1")

        assert word.letters == ((0.5, 0, 0, 1),)
        assert not word.is_integral

    def test_empty_word(self) -> None:
        word = WeylWord.parse("")

        assert word.letters == ()
        assert word.dimension is None

    def test_mixed_dimensions_rejected(self) -> None:
        with pytest.raises(KindMismatchError, match="mixed dimensions"):
            WeylWord.parse("1,0;1")

    def test_non_numeric_rejected(self) -> None:
        with pytest.raises(KindMismatchError, match="not a number"):
            WeylWord.parse("a,b")

    def test_reverse_and_concatenate(self) -> None:
        word = WeylWord.parse("1,0;0,1")

        assert word.reversed().to_text() == "0,1;1,0"
        assert (word + word).letters == word.letters * 2


class TestBicharacterWords:
    """Exact phases on Z_5 × Z_5."""

    def test_reduce_single_swap(self) -> None:
        forward = reduce_weyl_word(WeylWord.parse("1,0;0,1"), Z5SQ)
        backward = reduce_weyl_word(WeylWord.parse("0,1;1,0"), Z5SQ)

        assert forward.exponent == 1
        assert backward.exponent == 0
        assert forward.total == (1, 1)
        assert forward.phases[0] == pytest.approx(cmath.exp(2j * math.pi / 5))

    def test_total_wraps_mod_n(self) -> None:
        result = reduce_weyl_word(WeylWord.parse("3,4;4,3"), Z5SQ)

        assert result.total == (2, 2)

    def test_float_letter_rejected(self) -> None:
        with pytest.raises(KindMismatchError, match="integer"):
            reduce_weyl_word(WeylWord.parse("1.5,0"), Z5SQ)

    def test_wrong_rank_rejected(self) -> None:
        with pytest.raises(KindMismatchError, match="dimension"):
            reduce_weyl_word(WeylWord.parse("1,0,0"), Z5SQ)

    def test_multiplier_from_pair(self) -> None:
        pair = bicharacter_pair(5, 2, 5, [[0, 1], [0, 0]])

        assert bicharacter_multiplier_of(pair) == Z5SQ
        with pytest.raises(TwistingError):
            bicharacter_multiplier_of(z2_phase_pair(0.0))

    def test_word_multiplier_axioms(self) -> None:
        words = [WeylWord.parse("1,0;0,1"), WeylWord.parse("3,4;2,2")]
        report = check_word_multiplier(words, Z5SQ)

        assert report.passed
        assert report.entry("M3").note is not None

    @settings(max_examples=100, deadline=None)
    @given(
        first=st.lists(lattice_letters, max_size=5),
        second=st.lists(lattice_letters, max_size=5),
    )
    def test_word_fold_is_associative(
        self, first: List[Tuple[int, int]], second: List[Tuple[int, int]]
    ) -> None:
        """Reducing a concatenation equals reducing each half and joining the totals."""
        left = reduce_weyl_word(WeylWord(tuple(first)), Z5SQ)
        right = reduce_weyl_word(WeylWord(tuple(second)), Z5SQ)
        whole = reduce_weyl_word(WeylWord(tuple(first + second)), Z5SQ)

        joined = (left.exponent + right.exponent + Z5SQ.exponent(left.total, right.total)) % 5
        assert whole.exponent == joined
        assert whole.total == Z5SQ.add(left.total, right.total)

    @settings(max_examples=100, deadline=None)
    @given(a=lattice_letters, b=lattice_letters, c=lattice_letters)
    def test_bimultiplicative(
        self, a: Tuple[int, int], b: Tuple[int, int], c: Tuple[int, int]
    ) -> None:
        assert Z5SQ.exponent(Z5SQ.add(a, c), b) == (
            Z5SQ.exponent(a, b) + Z5SQ.exponent(c, b)
        ) % 5


class TestRepresentedRelations:
    """Weyl identities inside the crossed product and its GNS representation."""

    @pytest.mark.parametrize("name", sorted(fixture_pairs()))
    def test_fixture_weyl_report(self, name: str) -> None:
        report = weyl_relation_report(crossed_product(fixture_pairs()[name]))

        assert report.passed, report.failures()
        assert report.max_residual < 1e-12

    def test_randomized_weyl_report(self) -> None:
        for pair in randomized_pairs(6):
            assert weyl_relation_report(crossed_product(pair), tol=1e-10).passed

    def test_z5sq_unitaries_commute_up_to_phase(self) -> None:
        cp = _z5sq_product()
        gns = cp.gns_representation()
        e1, e2 = lattice_index((1, 0), 5), lattice_index((0, 1), 5)

        lhs = gns.unitary(e1) @ gns.unitary(e2)
        rhs = cmath.exp(2j * math.pi / 5) * gns.unitary(e2) @ gns.unitary(e1)

        assert np.max(np.abs(lhs - rhs)) < 1e-12
        commutator = group_commutator(cp, e1, e2)
        assert np.allclose(commutator, cmath.exp(2j * math.pi / 5) * np.eye(25), atol=1e-12)

    def test_represented_words(self) -> None:
        cp = _z5sq_product()
        for text in ("1,0;0,1", "0,1;1,0", "1,0;0,1;3,4", ""):
            assert represented_word_residual(cp, WeylWord.parse(text), Z5SQ) < 1e-12

    def test_represented_word_needs_lattice(self) -> None:
        cp = crossed_product(z2_phase_pair(0.0))
        with pytest.raises(KindMismatchError):
            represented_word_residual(cp, WeylWord.parse("1,0"), Z5SQ)

    def test_generator_commutators(self) -> None:
        residual, _ = generator_commutator_residual(_z5sq_product(), Z5SQ)

        assert residual < 1e-12

    def test_generator_commutators_with_transposed_form(self) -> None:
        transposed = BicharacterMultiplier(modulus=5, rank=2, order=5, matrix=((0, 0), (1, 0)))

        residual, witness = generator_commutator_residual(_z5sq_product(), transposed)

        assert residual == pytest.approx(2.0 * math.sin(2.0 * math.pi / 5), abs=1e-12)
        assert witness == (0, 1)

    def test_generator_commutators_need_lattice(self) -> None:
        with pytest.raises(KindMismatchError):
            generator_commutator_residual(crossed_product(z2_phase_pair(0.0)), Z5SQ)


class TestSpacetime:
    """Sampled ε-forms: ξ(k,k') = exp(i/2·kᵀεk')."""

    def test_commutator_matches_reduced_words(self) -> None:
        rng = SeededRNG(29)
        samples = [
            build_sigma_matrix((1, 0, 0), (1, 0, 0)),
            build_sigma_matrix((0, 1, 0), (0, -1, 0)),
        ]
        multiplier = spacetime_multiplier(samples)
        for _ in range(100):
            k = tuple(rng.uniform(-3.0, 3.0) for _ in range(4))
            kp = tuple(rng.uniform(-3.0, 3.0) for _ in range(4))
            forward = reduce_weyl_word(WeylWord((k, kp)), multiplier).phases
            backward = reduce_weyl_word(WeylWord((kp, k)), multiplier).phases
            expected = [commutator_phase(k, kp, s) for s in samples]
            assert np.allclose(forward / backward, expected, atol=1e-12)

    def test_commutator_closed_form(self) -> None:
        sample = build_sigma_matrix((1, 0, 0), (1, 0, 0))
        k, kp = (1.0, 0.0, 0.0, 0.0), (0.0, 2.0, 0.0, 0.0)

        assert commutator_phase(k, kp, sample) == pytest.approx(cmath.exp(2j))

    def test_word_multiplier_on_samples(self) -> None:
        multiplier = spacetime_multiplier([build_sigma_matrix((1, 0, 0), (1, 0, 0))])
        words = [WeylWord.parse("1,0,0,0;0,1,0,0"), WeylWord.parse("0.5,0.5,0,1")]

        assert check_word_multiplier(words, multiplier).passed

    def test_needs_samples(self) -> None:
        with pytest.raises(KindMismatchError):
            spacetime_multiplier([])

    def test_letter_dimension_checked(self) -> None:
        multiplier = spacetime_multiplier([build_sigma_matrix((1, 0, 0), (1, 0, 0))])
        with pytest.raises(KindMismatchError):
            reduce_weyl_word(WeylWord.parse("1,0"), multiplier)

    @settings(max_examples=50, deadline=None)
    @given(a=real_letters, b=real_letters, c=real_letters)
    def test_form_multiplier_is_bimultiplicative(
        self,
        a: Tuple[float, ...],
        b: Tuple[float, ...],
        c: Tuple[float, ...],
    ) -> None:
        multiplier = spacetime_multiplier([build_sigma_matrix((1, 0, 0), (1, 0, 0))])

        left = multiplier.evaluate(multiplier.add(a, c), b)
        split = multiplier.evaluate(a, b) * multiplier.evaluate(c, b)

        assert np.allclose(left, split, atol=1e-9)
