"""Tests for crossed_product module."""
import cmath
import math
from typing import Callable

import numpy as np
import pytest

from ccr_forge.crossed_product import (
    CrossedProduct,
    GramNotIdentityError,
    crossed_product,
    identity_report,
)
from ccr_forge.cstar_algebra import trace_functional
from ccr_forge.finite_group import cyclic_group, symmetric3_group
from ccr_forge.projective_action import (
    CField,
    NotAnActionError,
    ProjectiveAction,
    basis_fields,
    delta_field,
    random_field,
)
from ccr_forge.rng import SeededRNG
from ccr_forge.twisting import klein_pair, trivial_pair, z2_phase_pair
from tests.fixtures.pairs import (
    ALPHAS,
    SCALAR,
    fixture_pairs,
    left_translation_action,
    randomized_pairs,
    scaled_action,
    z2_phase_action,
    z3_swapped_shifts,
)


def _klein_leftmul(a: complex, b: complex, c: complex, d: complex) -> np.ndarray:
    """Left multiplication by aW(1)+bW(i)+cW(j)+dW(k) under the ±i cocycle."""
    return np.array(
        [
            [a, b, c, d],
            [b, a, -1j * d, 1j * c],
            [c, 1j * d, a, -1j * b],
            [d, -1j * c, 1j * b, a],
        ]
    )


def _scalar_field(group_size: int, values: list) -> CField:
    group = cyclic_group(2) if group_size == 2 else klein_pair().group
    return CField.from_vector(group, SCALAR, np.array(values, dtype=np.complex128))


class TestPhaseCrossedProduct:
    """Z₂ with ξ(1,1) = e^{iα} over C."""

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_product_formula(self, alpha: float) -> None:
        cp = crossed_product(z2_phase_pair(alpha))
        a, b, c, d = 1.5 - 0.5j, 2.0j, -0.75, 0.25 + 1.0j
        phase = cmath.exp(1j * alpha)

        product = cp.convolve(_scalar_field(2, [a, b]), _scalar_field(2, [c, d]))

        assert product.to_vector() == pytest.approx([a * c + b * d * phase, a * d + b * c])

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_involution_formula(self, alpha: float) -> None:
        cp = crossed_product(z2_phase_pair(alpha))
        a, b = 1.5 - 0.5j, 2.0j

        star = cp.involution(_scalar_field(2, [a, b]))

        expected = [np.conj(a), np.conj(b) * cmath.exp(-1j * alpha)]
        assert star.to_vector() == pytest.approx(expected)

    def test_unit(self) -> None:
        cp = crossed_product(z2_phase_pair(1.0))

        assert list(cp.unit.to_vector()) == [1.0, 0.0]

    def test_raw_matrices_give_same_product(self) -> None:
        from_pair = crossed_product(z2_phase_pair(1.0))
        from_matrices = crossed_product(z2_phase_action(1.0))
        f = _scalar_field(2, [0.3, -1.2j])
        g = _scalar_field(2, [2.0, 0.5])

        assert from_pair.convolve(f, g).max_deviation(from_matrices.convolve(f, g)) < 1e-14

    def test_commutative(self) -> None:
        assert crossed_product(z2_phase_pair(0.4)).center_dimension() == 2


class TestKleinCrossedProduct:
    """Klein group with the cyclic ±i cocycle: a copy of M₂(C)."""

    def test_leftmul_golden(self) -> None:
        cp = crossed_product(klein_pair())
        rng = SeededRNG(21)

        for _ in range(10):
            a, b, c, d = rng.complex_normal(4)
            f = _scalar_field(4, [a, b, c, d])
            assert np.allclose(cp.leftmul(f), _klein_leftmul(a, b, c, d), atol=1e-14)

    def test_weyl_products(self) -> None:
        cp = crossed_product(klein_pair())
        w = [cp.weyl_element(x) for x in range(4)]

        assert cp.convolve(w[1], w[2]).to_vector() == pytest.approx([0, 0, 0, 1j])
        assert cp.convolve(w[2], w[1]).to_vector() == pytest.approx([0, 0, 0, -1j])
        assert cp.convolve(w[1], w[1]).to_vector() == pytest.approx([1, 0, 0, 0])

    def test_cstar_norm(self) -> None:
        cp = crossed_product(klein_pair())
        f = _scalar_field(4, [0, 1, 1, 0])

        assert cp.cstar_norm(f) == pytest.approx(math.sqrt(2.0), abs=1e-8)
        assert cp.l1_norm(f) == pytest.approx(2.0)

    def test_center_is_trivial(self) -> None:
        assert crossed_product(klein_pair()).center_dimension() == 1

    def test_structure_constant(self) -> None:
        constants = crossed_product(klein_pair()).structure_constants()

        assert constants.tensor[1, 2, 3] == pytest.approx(1j)
        assert constants.tensor[2, 1, 3] == pytest.approx(-1j)
        assert constants.associativity_residual < 1e-12
        assert constants.basis[3] == ("k", 0, 0, 0)


class TestTrivialCrossedProducts:
    def test_group_algebra_structure_constants(self) -> None:
        constants = crossed_product(trivial_pair(cyclic_group(2), SCALAR)).structure_constants()

        assert [(p, q, r) for p, q, r, _ in constants.entries()] == [
            (0, 0, 0),
            (0, 1, 1),
            (1, 0, 1),
            (1, 1, 0),
        ]
        assert all(value == 1.0 for *_, value in constants.entries())

    def test_center_counts_conjugacy_classes(self) -> None:
        cp = crossed_product(trivial_pair(symmetric3_group(), SCALAR))

        assert cp.center_dimension() == 3

    def test_dimension(self) -> None:
        cp = crossed_product(fixture_pairs()["cyclic3_trivial"])

        assert cp.dimension == 15
        assert len(cp.basis_labels()) == 15


class TestProductIdentities:
    """Algebraic and norm identities on basis and random fields."""

    @pytest.mark.parametrize("name", sorted(fixture_pairs()))
    def test_fixture_products(self, name: str) -> None:
        cp = crossed_product(fixture_pairs()[name])
        rng = SeededRNG(13)
        fields = list(basis_fields(cp.group, cp.shape))
        fields += [random_field(cp.group, cp.shape, rng) for _ in range(50)]

        report = identity_report(cp, fields)

        assert report.passed, report.failures()

    def test_randomized_products(self) -> None:
        rng = SeededRNG(17)
        for pair in randomized_pairs(6):
            cp = crossed_product(pair)
            fields = [random_field(cp.group, cp.shape, rng) for _ in range(8)]
            assert identity_report(cp, fields).passed

    def test_weyl_elements_multiply_by_cocycle(self) -> None:
        pair = randomized_pairs(9)[8]
        cp = crossed_product(pair)
        group = pair.group

        for x in group.elements():
            for y in group.elements():
                expected = delta_field(group, cp.shape, group.multiply(x, y), pair.xi[x][y])
                product = cp.convolve(cp.weyl_element(x), cp.weyl_element(y))
                assert product.max_deviation(expected) < 1e-12

    def test_zeta_embedding_acts_pointwise(self) -> None:
        pair = randomized_pairs(9)[8]
        cp = crossed_product(pair)
        rng = SeededRNG(19)
        a = rng.random_element(cp.shape)
        f = random_field(cp.group, cp.shape, rng)

        assert cp.convolve(cp.zeta_embed(a), f).max_deviation(f.left_multiply(a)) < 1e-12

    def test_empty_field_list_rejected(self) -> None:
        with pytest.raises(ValueError):
            identity_report(crossed_product(z2_phase_pair(0.0)), [])

    def test_corrupt_action_fails_gram_check(self) -> None:
        cp = CrossedProduct(action=scaled_action())

        with pytest.raises(GramNotIdentityError) as excinfo:
            cp.gns_representation()

        assert excinfo.value.deviation == pytest.approx(3.0)

    @pytest.mark.parametrize("build", [scaled_action, z3_swapped_shifts])
    def test_operator_table_must_be_an_action(
        self, build: Callable[[], ProjectiveAction]
    ) -> None:
        with pytest.raises(NotAnActionError) as excinfo:
            crossed_product(build())

        assert not excinfo.value.report.passed

    def test_valid_operator_table_accepted(self) -> None:
        cp = crossed_product(left_translation_action(cyclic_group(3), SCALAR))

        assert cp.dimension == 3

    def test_eigensolvers_agree(self) -> None:
        pair = randomized_pairs(9)[8]
        f = random_field(pair.group, pair.shape, SeededRNG(23))

        lapack = crossed_product(pair).cstar_norm(f)
        jacobi = crossed_product(pair, eigensolver="jacobi").cstar_norm(f)

        assert jacobi == pytest.approx(lapack, rel=1e-10)


class TestVectorState:
    """ω_f(g) = tr((f*·g·f)(e))."""

    @pytest.mark.parametrize("name", ["cyclic3_trivial", "s3_m2", "klein", "z2_swap"])
    def test_unit_state_is_trace(self, name: str) -> None:
        cp = crossed_product(fixture_pairs()[name])
        rng = SeededRNG(5)

        for _ in range(5):
            a = rng.random_element(cp.shape)
            state = cp.vector_state(cp.unit, cp.zeta_embed(a))
            assert abs(state - trace_functional(a)) < 1e-12

    def test_positive_on_squares(self) -> None:
        rng = SeededRNG(17)
        products = [crossed_product(pair) for pair in randomized_pairs(9)]

        for i in range(100):
            cp = products[i % len(products)]
            f = random_field(cp.group, cp.shape, rng)
            h = random_field(cp.group, cp.shape, rng)
            omega = cp.vector_state(f, cp.convolve(cp.involution(h), h))
            assert omega.real >= -1e-12
            assert abs(omega.imag) <= 1e-9 * max(1.0, omega.real)

    def test_bounded_by_l1_norms(self) -> None:
        rng = SeededRNG(29)
        for pair in randomized_pairs(9):
            cp = crossed_product(pair)
            trace_one = float(sum(cp.shape.blocks))
            f = random_field(cp.group, cp.shape, rng)
            g = random_field(cp.group, cp.shape, rng)

            bound = cp.l1_norm(f) ** 2 * trace_one * cp.l1_norm(g) * max(cp.shape.blocks)

            assert abs(cp.vector_state(f, g)) <= bound * (1.0 + 1e-12)
