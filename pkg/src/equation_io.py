"""
Equation File Module
Reads and writes difference equations as JSON or YAML documents

    {"m": 2, "P": [["1"], ["3"], ["6", "4"]]}

P[j] lists the coefficients of P_j in ascending powers; each coefficient is an
integer, an "a/b" string or {"re": "a/b", "im": "c/d"}.
"""
import json
import os
from typing import Any, Dict, Optional

import yaml
from loguru import logger

from src.errors import AllCoefficientsZero, EquationFormatError
from src.exact_algebra import ComplexRational, Poly
from src.newton_polygon import DifferenceEquation

YAML_SUFFIXES = (".yaml", ".yml")


def _parse_text(text: str, path: str) -> Any:
    if path.lower().endswith(YAML_SUFFIXES):
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            if mark is not None:
                raise EquationFormatError(f"invalid YAML in {path}: {getattr(e, 'problem', e)}",
                                          mark.line + 1, mark.column + 1) from e
            raise EquationFormatError(f"invalid YAML in {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise EquationFormatError(f"invalid JSON in {path}: {e.msg}", e.lineno, e.colno) from e


def equation_from_document(doc: Any, source: str = "<document>") -> DifferenceEquation:
    if not isinstance(doc, dict):
        raise EquationFormatError(f"{source}: top level must be a mapping with 'm' and 'P'")
    missing = [key for key in ("m", "P") if key not in doc]
    if missing:
        raise EquationFormatError(f"{source}: missing field(s) {missing}")

    m, rows = doc["m"], doc["P"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise EquationFormatError(f"{source}: 'm' must be a positive integer, got {m!r}")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise EquationFormatError(f"{source}: 'P' must be a list of coefficient lists")
    if len(rows) != m + 1:
        raise EquationFormatError(f"{source}: m = {m} needs {m + 1} coefficient lists, found {len(rows)}")

    polys = []
    for j, row in enumerate(rows):
        coeffs = []
        for k, raw in enumerate(row):
            try:
                coeffs.append(ComplexRational.coerce(raw))
            except (TypeError, ValueError, ZeroDivisionError) as e:
                raise EquationFormatError(f"{source}: P[{j}][{k}] = {raw!r}: {e}") from e
        polys.append(Poly(tuple(coeffs)))

    if polys[m].is_zero():
        raise EquationFormatError(f"{source}: P_{m} is empty or identically zero")
    try:
        return DifferenceEquation(tuple(polys))
    except (AllCoefficientsZero, ValueError) as e:
        raise EquationFormatError(f"{source}: {e}") from e


def load_equation(path: str) -> DifferenceEquation:
    """Parse an equation file; every failure becomes EquationFormatError"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise EquationFormatError(f"cannot read {path}: {e.strerror or e}") from e

    eq = equation_from_document(_parse_text(text, path), path)
    logger.debug(f"loaded {path}: m={eq.m}, d={eq.d}")
    return eq


def equation_document(eq: DifferenceEquation, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    doc = eq.to_json()
    if meta:
        doc["meta"] = meta
    return doc


def write_equation(eq: DifferenceEquation, path: str, meta: Optional[Dict[str, Any]] = None):
    """Write as YAML for .yaml/.yml paths, JSON otherwise"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    doc = equation_document(eq, meta)
    with open(path, "w", encoding="utf-8") as f:
        if path.lower().endswith(YAML_SUFFIXES):
            yaml.safe_dump(doc, f, sort_keys=False)
        else:
            json.dump(doc, f, indent=2)
            f.write("\n")
    logger.info(f"equation written to {path}")
