"""JSON model files.

Matrices are nested row lists of ``[re, im]`` pairs. Floats go through
``json``'s shortest round-trip repr, so load(dump(x)) is bit-exact.
"""

import json

import numpy as np

from .systems import FirstOrderSystem, HigherOrderSystem, SpecialSecondOrderSystem

FORMAT_VERSION = 1


def matrix_to_json(a):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return {
        "shape": [int(a.shape[0]), int(a.shape[1])],
        "data": [[[float(np.real(x)), float(np.imag(x))] for x in row] for row in a],
    }


def matrix_from_json(obj):
    rows, cols = obj["shape"]
    data = obj["data"]
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValueError("matrix data does not match its declared shape")
    if rows * cols == 0:
        return np.zeros((rows, cols))
    arr = np.array(data, dtype=float).reshape(rows, cols, 2)
    if np.any(arr[..., 1] != 0):
        return arr[..., 0] + 1j * arr[..., 1]
    return arr[..., 0].copy()


def system_to_dict(sys):
    if isinstance(sys, FirstOrderSystem):
        mats = {k: getattr(sys, k) for k in ("E", "A", "B", "L", "D")}
        return {
            "kind": "first_order",
            "dimensions": {"N1": sys.N1, "m": sys.m, "p": sys.p},
            "matrices": {k: matrix_to_json(v) for k, v in mats.items()},
        }
    if isinstance(sys, SpecialSecondOrderSystem):
        mats = {k: getattr(sys, k) for k in ("P1", "P0", "F1", "F2", "G", "B", "L_out", "D")}
        return {
            "kind": "second_order",
            "variant": sys.variant,
            "dimensions": {"N": sys.N, "N0": sys.N0, "m": sys.m, "p": sys.p},
            "matrices": {k: matrix_to_json(v) for k, v in mats.items()},
        }
    if isinstance(sys, HigherOrderSystem):
        mats = {f"P{i}": P for i, P in enumerate(sys.P)}
        mats.update({f"L{j}": Lj for j, Lj in enumerate(sys.Ls)})
        mats["B"], mats["D"] = sys.B, sys.D
        return {
            "kind": "higher_order",
            "dimensions": {"N": sys.N, "l": sys.l, "ls": len(sys.Ls), "m": sys.m, "p": sys.p},
            "matrices": {k: matrix_to_json(v) for k, v in mats.items()},
        }
    raise TypeError(f"cannot serialize {type(sys).__name__}")


def system_from_dict(obj):
    kind = obj.get("kind")
    try:
        mats = {k: matrix_from_json(v) for k, v in obj["matrices"].items()}
        if kind == "first_order":
            return FirstOrderSystem(**mats)
        if kind == "second_order":
            return SpecialSecondOrderSystem(variant=obj.get("variant", "AF2"), **mats)
        if kind == "higher_order":
            dims = obj["dimensions"]
            P = tuple(mats[f"P{i}"] for i in range(dims["l"] + 1))
            Ls = tuple(mats[f"L{j}"] for j in range(dims["ls"]))
            return HigherOrderSystem(P=P, B=mats["B"], Ls=Ls, D=mats.get("D"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"model file is missing or has malformed fields: {exc}") from None
    raise ValueError(f"unknown model kind {kind!r}")


def model_to_dict(model):
    """Serialize a system or a :class:`~spmor.reduce.ReducedModel`."""
    from .reduce import ReducedModel

    if isinstance(model, ReducedModel):
        out = {
            "kind": "reduced",
            "method": model.kind,
            "first_order": system_to_dict(model.system),
            "structured": None if model.structured is None else system_to_dict(model.structured),
            "provenance": model.provenance(),
        }
    else:
        out = system_to_dict(model)
    out["format_version"] = FORMAT_VERSION
    return out


def model_from_dict(obj):
    """Inverse of :func:`model_to_dict`.

    A reduced model loads as its structured system when it has one, else
    as its first-order data; both give the same transfer function.
    """
    if obj.get("kind") == "reduced":
        if obj.get("structured") is not None:
            return system_from_dict(obj["structured"])
        return system_from_dict(obj["first_order"])
    return system_from_dict(obj)


def dump_model(model):
    return json.dumps(model_to_dict(model))


def load_model(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(obj)
