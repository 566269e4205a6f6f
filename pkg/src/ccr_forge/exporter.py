"""JSON export of verification results and structure constants."""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ccr_forge.crossed_product import CrossedProduct

logger = logging.getLogger(__name__)

STRUCTURE_FORMAT = "ccr-forge/structure-constants"
ENTRY_THRESHOLD = 1.0e-14

ComplexPair = List[float]


def encode_complex(z: complex) -> ComplexPair:
    """Complex number as [re, im]."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair: Sequence[float]) -> complex:
    if len(pair) != 2:
        raise ValueError(f"Complex value must be [re, im], got {list(pair)}")
    return complex(float(pair[0]), float(pair[1]))


def encode_matrix(m: np.ndarray) -> List[List[ComplexPair]]:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"Expected a 2-d matrix, got shape {arr.shape}")
    return [[encode_complex(z) for z in row] for row in arr]


def decode_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    return np.array([[decode_complex(p) for p in row] for row in rows], dtype=np.complex128)


def _jsonable(value: Any) -> Any:
    """Convert numpy arrays, scalars and complex numbers to plain JSON values."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_json(document: Dict[str, Any]) -> str:
    return json.dumps(_jsonable(document), indent=2, sort_keys=True)


def write_json(document: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Write a document as indented, key-sorted JSON, creating parent directories."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(to_json(document) + "\n", encoding="utf-8")
    logger.info(f"Wrote {target}")
    return target


def export_report(result: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Write a VerificationEngine result document."""
    return write_json(result, path)


def structure_document(cp: CrossedProduct, threshold: float = ENTRY_THRESHOLD) -> Dict[str, Any]:
    """
    Sparse structure constants of the crossed product.

    Each entry {p, q, r, value} means b_p·b_q has coefficient value on b_r,
    where b_p = δ(x, E^β_ij) runs over the orthonormal GNS basis.

    Args:
        cp: The crossed product
        threshold: Coefficients with modulus at or below this are omitted

    Returns:
        Document with format tag, basis labels, entries and associativity residual
    """
    constants = cp.structure_constants()
    entries = [
        {"p": p, "q": q, "r": r, "value": encode_complex(value)}
        for p, q, r, value in constants.entries(threshold)
    ]
    return {
        "format": STRUCTURE_FORMAT,
        "dimension": cp.dimension,
        "basis": [
            {"x": label, "block": beta, "i": i, "j": j}
            for label, beta, i, j in constants.basis
        ],
        "entries": entries,
        "associativity_residual": constants.associativity_residual,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }


def export_structure_constants(
    cp: CrossedProduct, path: Union[str, Path], threshold: float = ENTRY_THRESHOLD
) -> Dict[str, Any]:
    """Write structure_document(cp) to path and return it."""
    document = structure_document(cp, threshold)
    write_json(document, path)
    logger.info(
        f"Exported {len(document['entries'])} structure constants "
        f"(D={cp.dimension}, associativity residual {document['associativity_residual']:.3e})"
    )
    return document
