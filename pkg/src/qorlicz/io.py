"""JSON schemas for states, channels, algebras and crossed-product configs.

Complex matrices are nested arrays whose leaves are ``[re, im]`` pairs.
Unknown keys are rejected so that typos fail loudly.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .channels import QuantumChannel
from .crossed import PeriodicState
from .linalg import Verdict
from .rearrangement import WeightedTraceAlgebra
from .standard_form import StandardForm
from .young import DomainError, YoungFunction, from_spec


class InputError(ValueError):
    """Malformed input file or schema violation."""


def _keys(obj: dict, allowed: set[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise InputError(f"{what} must be a JSON object")
    extra = set(obj) - allowed
    if extra:
        raise InputError(f"unknown keys in {what}: {sorted(extra)}")


def encode_matrix(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_matrix(obj: Any) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError("matrix entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if out.ndim < 2 or out.shape[-1] != out.shape[-2]:
        raise InputError("expected a square matrix")
    if not np.all(np.isfinite(out)):
        raise InputError("matrix entries must be finite")
    return out


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def parse_young(obj: Any) -> YoungFunction:
    if isinstance(obj, dict):
        _keys(obj, {"kind", "params"}, "Young function spec")
    elif not isinstance(obj, str):
        raise InputError("Young function spec must be an object or a name")
    try:
        return from_spec(obj)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad Young function spec: {exc}") from exc


def parse_state(obj: Any) -> StandardForm:
    _keys(obj, {"rho"}, "state")
    if "rho" not in obj:
        raise InputError("state needs 'rho'")
    try:
        return StandardForm(decode_matrix(obj["rho"]))
    except ValueError as exc:
        raise InputError(f"bad state: {exc}") from exc


def encode_state(sf: StandardForm) -> dict:
    return {"rho": encode_matrix(sf.rho)}


def parse_channel(obj: Any) -> QuantumChannel:
    """{"kraus": [...]}, {"superop": ...} or {"builtin": "identity" | "transpose", "n": k}."""
    _keys(obj, {"kraus", "superop", "builtin", "n"}, "channel")
    try:
        if "kraus" in obj:
            return QuantumChannel.from_kraus([decode_matrix(v) for v in obj["kraus"]])
        if "superop" in obj:
            return QuantumChannel(decode_matrix(obj["superop"]))
        if "builtin" in obj:
            n = int(obj.get("n", 2))
            if obj["builtin"] == "identity":
                return QuantumChannel.identity(n)
            if obj["builtin"] == "transpose":
                return QuantumChannel.transpose(n)
            raise InputError(f"unknown builtin channel {obj['builtin']!r}")
    except InputError:
        raise
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad channel: {exc}") from exc
    raise InputError("channel needs 'kraus', 'superop' or 'builtin'")


def encode_channel(T: QuantumChannel) -> dict:
    if T.kraus is not None:
        return {"kraus": [encode_matrix(v) for v in T.kraus]}
    return {"superop": encode_matrix(T.superop)}


def parse_algebra(obj: Any) -> WeightedTraceAlgebra:
    _keys(obj, {"blocks"}, "algebra")
    try:
        return WeightedTraceAlgebra(tuple((int(b["dim"]), float(b["weight"])) for b in obj["blocks"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad algebra: {exc}") from exc


def parse_crossed(obj: Any) -> tuple[PeriodicState, QuantumChannel | None]:
    _keys(obj, {"q", "N", "m", "channel"}, "crossed-product config")
    try:
        state = PeriodicState(float(obj.get("q", 0.5)), int(obj.get("N", 8)),
                              tuple(obj.get("m", (0, 1))))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad crossed-product config: {exc}") from exc
    channel = parse_channel(obj["channel"]) if "channel" in obj else None
    if channel is not None and channel.n != state.n:
        raise InputError("channel size does not match the number of exponents")
    return state, channel


# ---------------------------------------------------------------------------
# output


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Verdict):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indentation."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
