"""JSON encodings of states, channels and unitaries.

A complex matrix is ``{"re": [[...]], "im": [[...]]}`` (row-major); a state
adds ``dim_a`` and ``dim_b`` with the product index ``i * d_B + j``; a
channel is a list of Kraus matrices.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channels import QubitChannel
from .exceptions import ValidationError
from .states import DensityMatrix, make_density


def encode_matrix(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def decode_matrix(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValidationError("matrix schema", "expected an object with 're' and 'im' fields")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("matrix schema", str(exc)) from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise ValidationError("matrix schema", f"'re' {re.shape} and 'im' {im.shape} must be equal 2-D shapes")
    return re + 1j * im


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dim_a": int(rho.cut.dim_a), "dim_b": int(rho.cut.dim_b), **encode_matrix(rho.matrix)}


def state_from_json(obj: Any) -> DensityMatrix:
    if not isinstance(obj, dict) or "dim_a" not in obj or "dim_b" not in obj:
        raise ValidationError("state schema", "expected fields dim_a, dim_b, re, im")
    try:
        cut = (int(obj["dim_a"]), int(obj["dim_b"]))
    except (TypeError, ValueError) as exc:
        raise ValidationError("state schema", str(exc)) from exc
    return make_density(decode_matrix(obj), cut)


def channel_to_json(channel: QubitChannel) -> list:
    return [encode_matrix(k) for k in channel.kraus]


def channel_from_json(obj: Any) -> QubitChannel:
    if not isinstance(obj, list):
        raise ValidationError("channel schema", "expected a list of Kraus matrices")
    return QubitChannel(tuple(decode_matrix(k) for k in obj))


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2)
