"""Problem-document ingest: JSON descriptions of pencils and Volterra symbols.

Document layout:
{ "kind": "pencil" | "volterra_zn" | "weyl_1d" | "mixed_axes",
  "n": int, "m": int,
  "terms": [...],                # shape depends on kind, see below
  "C": matrix,                   # rows of [re, im] pairs
  "data": sequence-doc | {"generator": "delta"|"geometric"|"gaussian_decay", ...} }

Kernels inside terms are either an inline sequence document or
{"cesaro": {"alpha": real, "len": int}}.
"""

from __future__ import annotations

import numpy as np

from . import fixtures
from .errors import SchemaError
from .fractional import cesaro
from .lattice import SequenceTable, ingest
from .solver import (
    MixedAxesSymbol,
    MixedAxesTerm,
    MultiTermSymbol,
    OperatorPencil,
    Problem,
    VolterraTerm,
    WeylFractionalSymbol,
    WeylTerm,
)


def matrix_from_doc(doc, m: int | None = None) -> np.ndarray:
    try:
        rows = [[complex(re, im) for re, im in row] for row in doc]
        out = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"bad matrix document: {e}") from e
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise SchemaError(f"matrix must be square, got shape {out.shape}")
    if m is not None and out.shape[0] != m:
        raise SchemaError(f"matrix size {out.shape[0]} != m={m}")
    if not np.all(np.isfinite(out)):
        raise SchemaError("non-finite matrix entry")
    return out


def matrix_to_doc(A: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(A, dtype=complex)]


def kernel_from_doc(doc) -> SequenceTable:
    if not isinstance(doc, dict):
        raise SchemaError("kernel must be an object")
    if "cesaro" in doc:
        spec = doc["cesaro"]
        try:
            return cesaro(float(spec["alpha"]), int(spec["len"]))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"bad cesaro kernel spec: {e}") from e
    return ingest(doc)


def data_from_doc(doc, n: int) -> SequenceTable:
    if not isinstance(doc, dict):
        raise SchemaError("data must be an object")
    if "generator" not in doc:
        return ingest(doc)
    gen = doc["generator"]
    if gen == "delta":
        return SequenceTable.delta(n)
    if gen == "geometric":
        if n != 1:
            raise SchemaError("geometric generator is one-dimensional")
        return fixtures.geometric_table(
            float(doc.get("lambda", 0.5)), int(doc.get("len", 32))
        )
    if gen == "gaussian_decay":
        return fixtures.gaussian_table(n, int(doc.get("len", 12)))
    raise SchemaError(f"unknown data generator {gen!r}")


def problem_from_doc(doc: dict) -> tuple[Problem, SequenceTable]:
    try:
        kind = doc["kind"]
        n = int(doc.get("n", 1))
        m = int(doc["m"])
        C = matrix_from_doc(doc["C"], m)
        terms = doc["terms"]
    except KeyError as e:
        raise SchemaError(f"missing field {e}") from e

    try:
        return _dispatch(kind, n, m, C, terms, doc)
    except (KeyError, TypeError) as e:
        raise SchemaError(f"bad problem document: {e}") from e


def _dispatch(kind, n, m, C, terms, doc) -> tuple[Problem, SequenceTable]:
    if kind == "pencil":
        ts = tuple(
            (tuple(t["j"]), matrix_from_doc(t["A"], m)) for t in terms
        )
        prob: Problem = OperatorPencil(n, m, ts, C)
    elif kind == "volterra_zn":
        B = matrix_from_doc(doc.get("B", [[[0.0, 0.0]] * m] * m), m)
        ts = tuple(
            VolterraTerm(
                kernel_from_doc(t["kernel"]), tuple(t["shift"]), matrix_from_doc(t["A"], m)
            )
            for t in terms
        )
        prob = MultiTermSymbol(n, m, B, ts, C)
    elif kind == "weyl_1d":
        n = 1
        ts = tuple(
            WeylTerm(
                kernel_from_doc(t["kernel"]),
                int(t["order"]),
                int(t.get("shift", 0)),
                matrix_from_doc(t["A"], m),
            )
            for t in terms
        )
        A0 = matrix_from_doc(doc.get("A0", [[[0.0, 0.0]] * m] * m), m)
        prob = WeylFractionalSymbol(m, ts, A0, int(doc.get("k0", 0)), C)
    elif kind == "mixed_axes":
        ts = tuple(
            MixedAxesTerm(
                kernel_from_doc(t["kernel"]), tuple(t["axes"]), matrix_from_doc(t["A"], m)
            )
            for t in terms
        )
        prob = MixedAxesSymbol(n, m, ts, C)
    else:
        raise SchemaError(f"unknown problem kind {kind!r}")

    if "data" not in doc:
        raise SchemaError("missing field 'data'")
    f = data_from_doc(doc["data"], n)
    if f.dim != n:
        raise SchemaError(f"data dimension {f.dim} != problem dimension {n}")
    return prob, f
