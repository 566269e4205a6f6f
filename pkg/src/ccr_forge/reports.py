"""Axiom reports: per-identity max residuals with witnesses."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1.0e-10


@dataclass
class AxiomEntry:
    """
    One checked identity.

    Attributes:
        axiom: Identity name, e.g. "M2" or "tautau"
        residual: Max entrywise deviation observed (>= 0)
        witness: Indices attaining the max, None when the residual is 0
        passed: residual <= tolerance of the owning report
        note: Free-text remark, e.g. "vacuous (discrete group)"
        tolerance: Entry-specific threshold, when it differs from the report's
    """

    axiom: str
    residual: float
    witness: Optional[Sequence[Any]] = None
    passed: bool = True
    note: Optional[str] = None
    tolerance: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axiom": self.axiom,
            "residual": self.residual,
            "witness": _plain(self.witness),
            "passed": self.passed,
            "note": self.note,
            "tolerance": self.tolerance,
        }


@dataclass
class AxiomReport:
    """Ordered collection of AxiomEntry results for one object."""

    title: str
    tolerance: float = DEFAULT_TOLERANCE
    entries: List[AxiomEntry] = field(default_factory=list)

    def record(
        self,
        axiom: str,
        residual: float,
        witness: Optional[Sequence[Any]] = None,
        note: Optional[str] = None,
        tolerance: Optional[float] = None,
    ) -> AxiomEntry:
        """Append an entry; passed is judged against tolerance, else self.tolerance."""
        residual = float(residual)
        limit = self.tolerance if tolerance is None else tolerance
        entry = AxiomEntry(
            axiom=axiom,
            residual=residual,
            witness=witness if residual > 0.0 else None,
            passed=residual <= limit,
            note=note,
            tolerance=tolerance,
        )
        self.entries.append(entry)
        if entry.passed:
            logger.debug(f"[{self.title}] {axiom}: residual {residual:.3e}")
        else:
            logger.warning(
                f"[{self.title}] {axiom} FAILED: residual {residual:.3e} at {entry.witness}"
            )
        return entry

    def vacuous(self, axiom: str, note: str) -> AxiomEntry:
        entry = AxiomEntry(axiom=axiom, residual=0.0, passed=True, note=note)
        self.entries.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_residual(self) -> float:
        return max((e.residual for e in self.entries), default=0.0)

    def residual(self, axiom: str) -> float:
        return self.entry(axiom).residual

    def entry(self, axiom: str) -> AxiomEntry:
        for entry in self.entries:
            if entry.axiom == axiom:
                return entry
        raise KeyError(f"No entry {axiom!r} in report {self.title!r}")

    def failures(self) -> List[AxiomEntry]:
        return [e for e in self.entries if not e.passed]

    def merge(self, other: "AxiomReport", prefix: str = "") -> "AxiomReport":
        """Copy other's entries into self, re-judged at self.tolerance unless entry-specific."""
        for e in other.entries:
            if e.note is not None and e.residual == 0.0 and e.witness is None:
                self.vacuous(prefix + e.axiom, e.note)
            else:
                self.record(prefix + e.axiom, e.residual, e.witness, e.note, e.tolerance)
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "entries": [e.to_dict() for e in self.entries],
        }


def max_with_witness(
    residuals: Sequence[float], witnesses: Sequence[Any]
) -> Tuple[float, Any]:
    """Max residual and the witness attaining it (None for an empty sequence)."""
    best, where = 0.0, None
    for r, w in zip(residuals, witnesses):
        if r > best:
            best, where = float(r), w
    return best, where


def _plain(value: Any) -> Any:
    """Convert numpy scalars and nested tuples into JSON-friendly values."""
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value
