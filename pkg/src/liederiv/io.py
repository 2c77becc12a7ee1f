"""JSON wire formats.

* algebra:  ``{"blocks": [n1, n2, ...]}``
* element:  ``{"blocks": [[[[re, im], ...], ...], ...]}`` (row-major per block)
* operator: ``{"algebra": {...}, "matrix": [[[re, im], ...], ...]}`` over
  matrix-unit coordinates
* standard-form report: see :func:`standard_form_report`

Floats are written with Python's shortest round-trip repr, so reading a file
back reproduces every bit.
"""
from __future__ import annotations

import json
import os
import sys
from typing import Any

import numpy as np

from .algebra import AlgebraElement, CentralDescriptor, StarAlgebra, make_algebra
from .exceptions import InvalidSpecError
from .linmap import LinearOperatorOnAlgebra

__all__ = [
    "algebra_to_json",
    "algebra_from_json",
    "parse_algebra",
    "element_to_json",
    "element_from_json",
    "operator_to_json",
    "operator_from_json",
    "weights_to_json",
    "weights_from_json",
    "standard_form_report",
    "dumps",
    "load_json",
]


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex_array(obj, shape, what) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidSpecError(f"{what}: entries must be [re, im] pairs of numbers") from exc
    if arr.shape != tuple(shape) + (2,):
        raise InvalidSpecError(f"{what}: expected shape {tuple(shape) + (2,)}, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def algebra_to_json(A: StarAlgebra) -> dict:
    return A.to_dict()


def algebra_from_json(obj: Any) -> StarAlgebra:
    if isinstance(obj, list):
        obj = {"blocks": obj}
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise InvalidSpecError('algebra spec must look like {"blocks": [n1, n2, ...]}')
    blocks = obj["blocks"]
    if not isinstance(blocks, list):
        raise InvalidSpecError('"blocks" must be a list of positive integers')
    return make_algebra(blocks)


def parse_algebra(text: str) -> StarAlgebra:
    """Algebra from a file path or an inline spec (JSON object, JSON list, or ``2,3``)."""
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    text = text.strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        try:
            obj = [int(t) for t in text.strip("[]").split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidSpecError(f"cannot parse algebra spec {text!r}") from exc
    if isinstance(obj, int) and not isinstance(obj, bool):
        obj = [obj]
    return algebra_from_json(obj)


def element_to_json(x: AlgebraElement) -> dict:
    return {"blocks": [[[_c(v) for v in row] for row in b] for b in x.blocks]}


def element_from_json(A: StarAlgebra, obj: Any) -> AlgebraElement:
    if not isinstance(obj, dict) or not isinstance(obj.get("blocks"), list):
        raise InvalidSpecError('element must look like {"blocks": [...]}')
    blocks = obj["blocks"]
    if len(blocks) != A.num_blocks:
        raise InvalidSpecError(f"element has {len(blocks)} blocks, algebra has {A.num_blocks}")
    return AlgebraElement(
        A, [_complex_array(b, (n, n), f"block {k}") for k, (b, n) in enumerate(zip(blocks, A.block_dims))]
    )


def operator_to_json(L: LinearOperatorOnAlgebra) -> dict:
    return {
        "algebra": algebra_to_json(L.algebra),
        "matrix": [[_c(v) for v in row] for row in L.matrix],
    }


def operator_from_json(obj: Any, algebra: StarAlgebra | None = None) -> LinearOperatorOnAlgebra:
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise InvalidSpecError('operator must look like {"algebra": {...}, "matrix": [...]}')
    if "algebra" in obj:
        A = algebra_from_json(obj["algebra"])
        if algebra is not None and algebra != A:
            raise InvalidSpecError(f"operator is on {A}, expected {algebra}")
    elif algebra is not None:
        A = algebra
    else:
        raise InvalidSpecError("operator JSON is missing its algebra")
    n = A.coord_dim
    return LinearOperatorOnAlgebra(A, _complex_array(obj["matrix"], (n, n), "operator matrix"))


def weights_to_json(weights) -> list:
    """One coefficient vector (per-block scalars) per block."""
    rows = []
    for w in weights:
        arr = w.array if isinstance(w, CentralDescriptor) else np.asarray(w)
        rows.append([_c(v) for v in arr])
    return rows


def weights_from_json(A: StarAlgebra, obj: Any) -> np.ndarray:
    m = A.num_blocks
    return _complex_array(obj, (m, m), "weights")


def standard_form_report(sf, witness_a: AlgebraElement | None = None) -> dict:
    """JSON report of a :class:`~liederiv.decomposer.StandardForm`.

    ``a`` is the trace-free element implementing ``D`` (``null`` when ``D`` is
    not inner, which cannot happen for finite-dimensional inputs).
    """
    return {
        "algebra": algebra_to_json(sf.algebra),
        "a": None if witness_a is None else element_to_json(witness_a),
        "D": operator_to_json(sf.D),
        "E": operator_to_json(sf.E),
        "weights": weights_to_json(sf.weights),
        "normalizer": element_to_json(sf.normalizer_a),
        "residuals": {k: v.max_residual for k, v in sf.diagnostics.items()},
        "frame": None
        if sf.frame is None
        else {"ranks": list(sf.frame.ranks), "blocks": list(sf.frame_blocks)},
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":"), sort_keys=False) + "\n"


def load_json(path: str) -> Any:
    """Read JSON from ``path`` (``-`` for stdin); parse errors become :class:`InvalidSpecError`."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpecError(f"cannot read JSON from {path}: {exc}") from exc
