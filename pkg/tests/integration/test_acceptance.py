"""End-to-end checks driven by the shipped problem specs."""
import cmath
import math

import numpy as np
import pytest

from ccr_forge import ConfigManager, VerificationEngine, parse_spec
from ccr_forge.crossed_product import identity_report
from ccr_forge.projective_action import basis_fields, random_field, roundtrip_deviation
from ccr_forge.rng import SeededRNG
from ccr_forge.weyl_ccr import WeylWord, commutator_phase, reduce_weyl_word
from tests.fixtures.pairs import SHIPPED_SPECS, spec_text

ALGEBRA_SPECS = [name for name in SHIPPED_SPECS if name != "spacetime-demo.json"]


def _config(name: str) -> ConfigManager:
    return ConfigManager(parse_spec(spec_text(name))).validate()


class TestPhaseSpec:
    """Z₂ over C with ξ(1,1) = e^{i}."""

    def test_shift_squares_to_phase(self) -> None:
        config = _config("example1-alpha.json")
        cp = config.build_crossed_product()
        shift = config.build_element("shift")

        square = cp.convolve(shift, shift)

        expected = cmath.exp(1j) * config.build_element("unit").to_vector()
        assert np.max(np.abs(square.to_vector() - expected)) < 1e-12

    def test_involution_conjugates_phase(self) -> None:
        config = _config("example1-alpha.json")
        cp = config.build_crossed_product()

        star = cp.involution(config.build_element("unit_plus_shift"))

        assert star.to_vector() == pytest.approx([1.0, cmath.exp(-1j)], abs=1e-12)

    def test_named_unit_is_algebra_unit(self) -> None:
        config = _config("example1-alpha.json")
        cp = config.build_crossed_product()

        assert cp.unit.max_deviation(config.build_element("unit")) < 1e-12


class TestKleinSpec:
    def test_dimension_and_center(self) -> None:
        cp = _config("klein-example2.json").build_crossed_product()

        assert cp.dimension == 4
        assert cp.center_dimension() == 1

    def test_weyl_elements_anticommute(self) -> None:
        cp = _config("klein-example2.json").build_crossed_product()
        w = [cp.weyl_element(x) for x in range(4)]

        assert cp.convolve(w[1], w[2]).max_deviation(w[3].scale(1j)) < 1e-12
        assert cp.convolve(w[2], w[1]).max_deviation(w[3].scale(-1j)) < 1e-12
        for x in range(1, 4):
            assert cp.convolve(w[x], w[x]).max_deviation(cp.unit) < 1e-12

    def test_named_element_norms(self) -> None:
        config = _config("klein-example2.json")
        cp = config.build_crossed_product()

        assert cp.cstar_norm(config.build_element("Wi_plus_Wj")) == pytest.approx(
            math.sqrt(2.0), abs=1e-8
        )
        assert cp.cstar_norm(config.build_element("Wk")) == pytest.approx(1.0, abs=1e-10)


class TestShippedAlgebraSpecs:
    """Roundtrip, axioms and C*-identities for every finite-group spec."""

    @pytest.mark.parametrize("name", ALGEBRA_SPECS)
    def test_check_passes(self, name: str) -> None:
        result = VerificationEngine(parse_spec(spec_text(name))).run("check")

        assert result["passed"]
        assert result["summary"]["max_residual"] < 1e-8

    @pytest.mark.parametrize("name", ALGEBRA_SPECS)
    def test_roundtrip(self, name: str) -> None:
        config = _config(name)
        pair = config.build_pair()
        assert pair is not None

        assert roundtrip_deviation(pair) < 1e-10

    @pytest.mark.parametrize("name", ALGEBRA_SPECS)
    def test_identities_on_basis_and_random_fields(self, name: str) -> None:
        cp = _config(name).build_crossed_product()
        rng = SeededRNG(11)
        fields = list(basis_fields(cp.group, cp.shape))
        fields += [random_field(cp.group, cp.shape, rng) for _ in range(50)]

        report = identity_report(cp, fields)

        assert report.passed, report.failures()

    @pytest.mark.parametrize("name", ALGEBRA_SPECS)
    def test_weyl_relations(self, name: str) -> None:
        result = VerificationEngine(parse_spec(spec_text(name))).run("weyl")

        assert result["reports"][0]["max_residual"] < 1e-12


class TestBicharacterSpec:
    """Z₅² with ξ(k,k') = exp(2πi·k₁k'₂/5)."""

    def test_generators_commute_up_to_root_of_unity(self) -> None:
        cp = _config("z5sq-bicharacter.json").build_crossed_product()
        u1, u2 = cp.weyl_element(5), cp.weyl_element(1)
        omega = cmath.exp(2j * math.pi / 5)

        forward = cp.convolve(u1, u2)
        backward = cp.convolve(u2, u1)

        assert forward.max_deviation(backward.scale(omega)) < 1e-12

    def test_spec_words_match_representation(self) -> None:
        result = VerificationEngine(parse_spec(spec_text("z5sq-bicharacter.json"))).run("weyl")

        represented = result["reports"][1]
        assert represented["title"] == "represented-words"
        assert represented["max_residual"] < 1e-12
        assert [w["total"] for w in result["results"]["words"]] == [[1, 1], [1, 1], [4, 0]]


class TestSpacetimeSpec:
    def test_samples_are_admissible(self) -> None:
        samples = _config("spacetime-demo.json").spacetime_samples()

        assert len(samples) == 2
        for sample in samples:
            assert np.allclose(sample.eps, -sample.eps.T)

    def test_commutators_follow_form(self) -> None:
        samples = _config("spacetime-demo.json").spacetime_samples()
        rng = SeededRNG(3)

        for _ in range(100):
            k = tuple(rng.normal(0.0, 1.0) for _ in range(4))
            kp = tuple(rng.normal(0.0, 1.0) for _ in range(4))
            for sample in samples:
                expected = cmath.exp(1j * float(np.asarray(k) @ sample.eps @ np.asarray(kp)))
                assert abs(commutator_phase(k, kp, sample) - expected) < 1e-12

    def test_spec_word_phases(self) -> None:
        config = _config("spacetime-demo.json")
        multiplier = config.spacetime_multiplier()

        reduced = reduce_weyl_word(config.words()[0], multiplier)

        assert reduced.phases == pytest.approx([cmath.exp(0.5j), 1.0], abs=1e-12)

    def test_swapped_word_has_conjugate_phase(self) -> None:
        config = _config("spacetime-demo.json")
        multiplier = config.spacetime_multiplier()
        word = WeylWord.parse("0,1,0,0;1,0,0,0")

        reduced = reduce_weyl_word(word, multiplier)

        assert reduced.phases == pytest.approx([cmath.exp(-0.5j), 1.0], abs=1e-12)
