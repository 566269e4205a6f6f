"""Verification engine: runs one command against a problem spec."""

import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ccr_forge.config_manager import ConfigManager, VerificationSettings
from ccr_forge.crossed_product import CrossedProduct, identity_report
from ccr_forge.exporter import export_structure_constants, structure_document
from ccr_forge.projective_action import (
    CField,
    ClosedForm,
    ProjectiveAction,
    basis_fields,
    check_action,
    random_field,
    roundtrip_deviation,
)
from ccr_forge.reports import AxiomReport
from ccr_forge.rng import SeededRNG
from ccr_forge.spec_models import BicharacterTwistingSpec, ProblemSpec
from ccr_forge.twisting import TwistingPair, check_multiplier, check_scalar_cocycle
from ccr_forge.weyl_ccr import (
    WeylWord,
    bicharacter_multiplier_of,
    check_word_multiplier,
    generator_commutator_residual,
    reduce_weyl_word,
    represented_word_residual,
    weyl_relation_report,
)

ENGINE_VERSION = "0.1.0"
COMMANDS = ("check", "build", "norm", "roundtrip", "weyl", "spacetime")

CommandOutput = Tuple[List[AxiomReport], Dict[str, Any]]

logger = logging.getLogger(__name__)


class VerificationEngine:
    """
    Command dispatcher over one validated problem spec.

    Every command returns the same document layout: metadata, summary,
    the AxiomReports it produced (serialized), command-specific results,
    and an overall passed flag. Failed checks are reported, never raised.
    """

    def __init__(self, spec: ProblemSpec, overrides: Optional[Dict[str, Any]] = None) -> None:
        """
        Initialize engine.

        Args:
            spec: Parsed problem spec
            overrides: Settings from the command line (tolerance, random_seed, ...)

        Raises:
            DimensionMismatchError: Spec sections are inconsistent
        """
        self.config = ConfigManager(spec, overrides).validate()
        self.settings: VerificationSettings = self.config.settings
        self.rng = SeededRNG(self.settings.random_seed)

    def run(
        self,
        command: str,
        element: Optional[str] = None,
        out: Optional[Union[str, Path]] = None,
        words: Optional[Sequence[str]] = None,
    ) -> Dict[str, Any]:
        """
        Execute a command and return the result document.

        Args:
            command: One of COMMANDS
            element: Element name for norm
            out: Output path for build
            words: Extra words "k1;k2;..." for check (spacetime specs), weyl and spacetime

        Returns:
            Dictionary with metadata, summary, reports, results and passed

        Raises:
            ValueError: Unknown command or missing --element
        """
        if command not in COMMANDS:
            raise ValueError(f"Unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        logger.info(f"Running {command}")
        start_time = time.time()
        self.rng.reset()

        extra = [WeylWord.parse(text) for text in (words or [])]
        handler = getattr(self, f"_run_{command}")
        if command == "norm":
            reports, results = handler(element)
        elif command == "build":
            reports, results = handler(out)
        elif command in ("check", "weyl", "spacetime"):
            reports, results = handler(self.config.words() + extra)
        else:
            reports, results = handler()

        execution_time = time.time() - start_time
        output = self._generate_output(command, reports, results, execution_time)
        status = "passed" if output["passed"] else "FAILED"
        logger.info(f"{command} {status} in {execution_time:.2f}s")
        return output

    def _product(self) -> CrossedProduct:
        return self.config.build_crossed_product()

    def _fields(self, cp: CrossedProduct) -> List[CField]:
        fields = list(basis_fields(cp.group, cp.shape))
        fields += [
            random_field(cp.group, cp.shape, self.rng) for _ in range(self.settings.random_fields)
        ]
        return fields

    def _run_check(self, words: List[WeylWord]) -> CommandOutput:
        tol = self.settings.tolerance
        if self.config.is_spacetime:
            report = check_word_multiplier(words, self.config.spacetime_multiplier(), tol)
            return [report], {}

        reports: List[AxiomReport] = []
        pair = self.config.build_pair()
        if pair is not None:
            reports.append(check_multiplier(pair, tol))
            if pair.is_scalar:
                reports.append(check_scalar_cocycle(pair, tol))
            action = ProjectiveAction(group=pair.group, shape=pair.shape, form=ClosedForm(pair))
        else:
            action = self.config.build_action()
        reports.append(
            check_action(action, tol, rng=self.rng, random_fields=self.settings.random_fields)
        )

        results: Dict[str, Any] = {}
        if all(r.passed for r in reports):
            cp = self._product()
            reports.append(
                identity_report(cp, self._fields(cp), tol, self.settings.norm_tolerance)
            )
            results["dimension"] = cp.dimension
            results["center_dimension"] = cp.center_dimension()
            results["abelian_group"] = cp.group.is_abelian()
        else:
            logger.warning("Skipping crossed-product identities: axiom checks failed")
        return reports, results

    def _run_build(self, out: Optional[Union[str, Path]]) -> CommandOutput:
        cp = self._product()
        if out is not None:
            document = export_structure_constants(cp, out)
        else:
            document = structure_document(cp)
        report = AxiomReport(title="structure-constants", tolerance=self.settings.tolerance)
        report.record("associativity", document["associativity_residual"])
        results: Dict[str, Any] = {
            "dimension": cp.dimension,
            "nonzero_entries": len(document["entries"]),
            "output": str(out) if out is not None else None,
        }
        if out is None:
            results["document"] = document
        return [report], results

    def _run_norm(self, element: Optional[str]) -> CommandOutput:
        names = sorted(self.config.spec.elements)
        if element is None:
            if len(names) != 1:
                raise ValueError("norm requires --element NAME")
            element = names[0]
        f = self.config.build_element(element)
        cp = self._product()
        l1 = cp.l1_norm(f)
        cstar = cp.cstar_norm(f)
        report = AxiomReport(title="norm", tolerance=self.settings.norm_tolerance)
        excess = max(0.0, cstar - l1) / l1 if l1 > 0.0 else cstar
        report.record("cstar_le_l1", excess)
        logger.info(f"Element {element}: l1 {l1:.10g}, cstar {cstar:.10g}")
        return [report], {"element": element, "l1": l1, "cstar": cstar}

    def _run_roundtrip(self) -> CommandOutput:
        tol = self.settings.tolerance
        pair = self.config.build_pair()
        source: Union[TwistingPair, ProjectiveAction] = (
            pair if pair is not None else self.config.build_action()
        )
        deviation = roundtrip_deviation(source, tol)
        report = AxiomReport(title="roundtrip", tolerance=tol)
        report.record("roundtrip", deviation)
        return [report], {"deviation": deviation}

    def _run_weyl(self, words: List[WeylWord]) -> CommandOutput:
        cp = self._product()
        reports = [weyl_relation_report(cp, self.settings.tolerance)]
        results: Dict[str, Any] = {}
        if isinstance(self.config.spec.twisting, BicharacterTwistingSpec):
            pair = self.config.build_pair()
            assert pair is not None
            multiplier = bicharacter_multiplier_of(pair)
            represented = AxiomReport("represented-words", self.settings.tolerance)
            represented.record("generators", *generator_commutator_residual(cp, multiplier))
            phases = []
            for index, word in enumerate(words):
                residual = represented_word_residual(cp, word, multiplier)
                represented.record(f"word{index}", residual, (word.to_text(),))
                reduced = reduce_weyl_word(word, multiplier)
                phases.append({"word": word.to_text(), **reduced.to_dict()})
            reports.append(represented)
            results["words"] = phases
        return reports, results

    def _run_spacetime(self, words: List[WeylWord]) -> CommandOutput:
        multiplier = self.config.spacetime_multiplier()
        samples = self.config.spacetime_samples()
        report = check_word_multiplier(words, multiplier, self.settings.tolerance)
        phases = [
            {"word": word.to_text(), **reduce_weyl_word(word, multiplier).to_dict()}
            for word in words
        ]
        return [report], {"samples": [s.to_dict() for s in samples], "words": phases}

    def _generate_output(
        self,
        command: str,
        reports: List[AxiomReport],
        results: Dict[str, Any],
        execution_time: float,
    ) -> Dict[str, Any]:
        """
        Generate structured output dictionary.

        Args:
            command: Command that ran
            reports: Axiom reports it produced
            results: Command-specific values
            execution_time: Wall clock execution time in seconds

        Returns:
            Complete result document
        """
        entries = [e for r in reports for e in r.entries]
        failed = [r for r in reports if not r.passed]
        return {
            "metadata": {
                "run_id": f"run_{datetime.now().strftime('%Y%m%d_%H%M%S')}",
                "command": command,
                "random_seed": self.settings.random_seed,
                "settings": self.settings.to_dict(),
                "completed_at": datetime.now().isoformat(),
                "engine_version": ENGINE_VERSION,
            },
            "summary": {
                "reports": len(reports),
                "checks": len(entries),
                "failed_checks": sum(1 for e in entries if not e.passed),
                "max_residual": max((e.residual for e in entries), default=0.0),
                "first_failure": failed[0].title if failed else None,
                "execution_time_seconds": round(execution_time, 3),
            },
            "reports": [r.to_dict() for r in reports],
            "results": results,
            "passed": not failed,
        }
