"""Instance and certificate files.

Files are JSON.  Floats are written with 17 significant digits so that a
parse/serialise round trip reproduces every double bit for bit, and keys are
sorted so that canonical files are byte-stable.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attainment import DualFormProblem
from .classifier import StatusCertificate
from .cone_algebra import ExtendedCone
from .linear_geometry import AffineSet, affine_from_equations


class InstanceError(ValueError):
    """The file does not describe a consistent instance."""


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(key))
            out.append(": ")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, list):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj):
            out.append('"nan"')
        elif math.isinf(obj):
            out.append('"inf"' if obj > 0 else '"-inf"')
        else:
            text = format(obj, ".17g")
            if not any(ch in text for ch in ".en"):
                text += ".0"
            out.append(text)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, 17-digit floats, one trailing newline."""
    out: list[str] = []
    _emit(_plain(obj), out)
    return "".join(out) + "\n"


def write_atomic(path, text: str) -> None:
    """Write through a temporary file in the same directory and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# affine sets and instances


def affine_to_dict(aff: AffineSet) -> dict:
    if aff.source_form == "equations" and aff.equations is not None:
        A, b = aff.equations
        return {"form": "equations", "A": np.asarray(A).tolist(), "b": np.asarray(b).tolist()}
    gens = aff.exact_generators()
    return {"form": "span", "point": aff.point.tolist(), "span": np.asarray(gens).tolist()}


def affine_from_dict(rec: dict, dim: int | None = None) -> AffineSet:
    form = rec.get("form", "span")
    if form == "equations":
        A = np.asarray(rec["A"], dtype=float)
        if dim is not None:
            A = A.reshape(-1, dim)
        return affine_from_equations(A, rec["b"])
    if form == "span":
        point = np.asarray(rec["point"], dtype=float)
        return AffineSet.from_span(point, rec.get("span", []))
    raise InstanceError(f"unknown affine form {form!r}")


@dataclass
class Instance:
    """``(K, L, c)`` with an optional dual-form problem and free-form metadata."""

    K: ExtendedCone | None
    aff: AffineSet | None = None
    dual_form: DualFormProblem | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict = {}
        if self.K is not None:
            out["cone"] = self.K.to_list()
        if self.aff is not None:
            out["affine"] = affine_to_dict(self.aff)
        if self.dual_form is not None:
            out["dual_form"] = self.dual_form.to_dict()
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            K = ExtendedCone.from_list(data["cone"]) if "cone" in data else None
            aff = affine_from_dict(data["affine"], K.total_dim if K else None) if "affine" in data else None
            dual = DualFormProblem.from_dict(data["dual_form"]) if "dual_form" in data else None
            if dual is None and "A" in data and "b" in data and "c" in data:
                dual = DualFormProblem.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from exc
        if K is not None and aff is not None and aff.dim != K.total_dim:
            raise InstanceError(f"cone has dimension {K.total_dim}, affine set {aff.dim}")
        if K is None and dual is not None:
            K = dual.K
        return cls(K, aff, dual, dict(data.get("meta", {})))


def read_instance(path) -> Instance:
    try:
        data = read_json(path)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    return Instance.from_dict(data)


def write_instance(path, inst: Instance) -> None:
    write_atomic(path, dumps(inst.to_dict()))


def read_certificate(path) -> StatusCertificate:
    try:
        return StatusCertificate.from_dict(read_json(path))
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    except (KeyError, ValueError) as exc:
        raise InstanceError(f"{path}: malformed certificate ({exc})") from exc


def write_certificate(path, cert: StatusCertificate) -> None:
    write_atomic(path, dumps(cert.to_dict()))
