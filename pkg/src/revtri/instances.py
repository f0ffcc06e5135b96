"""Instance files: the JSON documents the CLI consumes.

Top-level schema (version "1"):

    {
      "version": "1",
      "algebra": {"blocks": [2, 1]},
      "rank": 2,
      "action": "right-only" | "two-sided",      # optional, default right-only
      "theorem": "mult-scalar",                  # optional, CLI flag wins
      "tol": 1e-9,                               # optional
      "e": <vector>,                             # mult-* / integral reference
      "family": {"members": [<vector>...], "strict": bool},
      "vectors": [<vector>, ...],
      "bounds": {...},                           # per-theorem shape
      "norms": [1.0, ...],                       # construct-equality targets
      "path": {"a":0,"b":1,"samples":[...]}      # or {"generator": "exp-circle",
      "a1": <matrix>, "a2": <matrix>             #  "a":..,"b":..,"nodes":N}
    }

Vectors are arrays of coordinate matrices; complex entries are [re, im]
pairs.  parse/serialize round-trip at full double precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import reverse, serialize
from .algebra import Element
from .errors import SchemaError
from .hilbert import ModuleSpace, ModuleVector, OrthoFamily
from .quadrature import SampledPath

VERSION = "1"

_KNOWN_KEYS = {
    "version", "algebra", "rank", "action", "theorem", "tol",
    "e", "family", "vectors", "bounds", "norms", "path", "a1", "a2",
}


@dataclass(eq=False)
class InstanceFile:
    version: str
    space: ModuleSpace
    theorem: str | None = None
    tol: float | None = None
    e: ModuleVector | None = None
    family: OrthoFamily | None = None
    vectors: list[ModuleVector] | None = None
    bounds_node: dict | None = None
    norms: list[float] | None = None
    path: SampledPath | None = None
    a1: Element | None = None
    a2: Element | None = None

    def bounds_for(self, theorem: str):
        """Decode the bounds node against the given theorem's bound type."""
        if self.bounds_node is None:
            return None
        if theorem == reverse.MULT_SCALAR:
            return serialize.scalar_bounds_from_json(self.bounds_node, "/bounds")
        if theorem == reverse.MULT_HERMITIAN:
            return serialize.hermitian_bounds_from_json(
                self.bounds_node, "/bounds", self.space.algebra
            )
        if theorem in (reverse.FAMILY_NORM, reverse.FAMILY_MODULUS):
            return serialize.family_bounds_from_json(self.bounds_node, "/bounds")
        if theorem == reverse.ADDITIVE:
            return serialize.additive_bounds_from_json(self.bounds_node, "/bounds")
        raise SchemaError("/theorem", f"unknown theorem id {theorem!r}")


def parse_instance(data) -> InstanceFile:
    """Parse bytes / str / dict into an InstanceFile, validating schema and
    cross-references; errors carry JSON-pointer paths."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError("/", f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("/", "instance must be a JSON object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise SchemaError(f"/{unknown[0]}", "unknown field")
    if data.get("version") != VERSION:
        raise SchemaError("/version", f'expected "{VERSION}", got {data.get("version")!r}')

    shape = serialize.shape_from_json(data.get("algebra"), "/algebra")
    rank = data.get("rank")
    if not (isinstance(rank, int) and rank >= 1):
        raise SchemaError("/rank", "rank must be an integer >= 1")
    action = data.get("action", "right-only")
    try:
        space = ModuleSpace(shape, rank, action)
    except Exception as exc:
        raise SchemaError("/action", str(exc)) from exc

    inst = InstanceFile(version=VERSION, space=space)

    theorem = data.get("theorem")
    if theorem is not None:
        if not isinstance(theorem, str):
            raise SchemaError("/theorem", "theorem must be a string id")
        inst.theorem = theorem
    tol = data.get("tol")
    if tol is not None:
        if not isinstance(tol, (int, float)) or tol <= 0:
            raise SchemaError("/tol", "tol must be a positive number")
        inst.tol = float(tol)

    if "e" in data:
        inst.e = _vector(data["e"], "/e", space)
    if "family" in data:
        fam_node = data["family"]
        if not isinstance(fam_node, dict):
            raise SchemaError("/family", "family must be an object")
        members = fam_node.get("members")
        if isinstance(members, list):
            for i, mem in enumerate(members):
                if isinstance(mem, list) and len(mem) != space.rank:
                    raise SchemaError(
                        f"/family/members/{i}",
                        f"vector has {len(mem)} coordinates; /rank declares {space.rank}",
                    )
        inst.family = serialize.family_from_json(fam_node, "/family", space)
    if "vectors" in data:
        node = data["vectors"]
        if not isinstance(node, list) or not node:
            raise SchemaError("/vectors", "vectors must be a non-empty array")
        inst.vectors = [
            _vector(v, f"/vectors/{i}", space) for i, v in enumerate(node)
        ]
    if "bounds" in data:
        if not isinstance(data["bounds"], dict):
            raise SchemaError("/bounds", "bounds must be an object")
        inst.bounds_node = data["bounds"]
    if "norms" in data:
        node = data["norms"]
        if not isinstance(node, list) or not all(
            isinstance(t, (int, float)) for t in node
        ):
            raise SchemaError("/norms", "norms must be an array of numbers")
        inst.norms = [float(t) for t in node]
    if "path" in data:
        inst.path = serialize.path_from_json(data["path"], "/path", space)
    for key in ("a1", "a2"):
        if key in data:
            setattr(inst, key, serialize.element_from_json(data[key], f"/{key}", space.algebra))
    return inst


def _vector(node, pointer: str, space: ModuleSpace) -> ModuleVector:
    # name both the offending path and /rank on coordinate-count mismatches
    if isinstance(node, list) and len(node) != space.rank:
        raise SchemaError(
            pointer, f"vector has {len(node)} coordinates; /rank declares {space.rank}"
        )
    return serialize.vector_from_json(node, pointer, space)


def serialize_instance(inst: InstanceFile) -> dict:
    """Inverse of parse_instance up to semantic identity."""
    out: dict = {
        "version": inst.version,
        "algebra": serialize.shape_to_json(inst.space.algebra),
        "rank": inst.space.rank,
        "action": inst.space.action,
    }
    if inst.theorem is not None:
        out["theorem"] = inst.theorem
    if inst.tol is not None:
        out["tol"] = inst.tol
    if inst.e is not None:
        out["e"] = serialize.vector_to_json(inst.e)
    if inst.family is not None:
        out["family"] = serialize.family_to_json(inst.family)
    if inst.vectors is not None:
        out["vectors"] = [serialize.vector_to_json(x) for x in inst.vectors]
    if inst.bounds_node is not None:
        out["bounds"] = inst.bounds_node
    if inst.norms is not None:
        out["norms"] = inst.norms
    if inst.path is not None:
        out["path"] = {
            "a": inst.path.a,
            "b": inst.path.b,
            "samples": [serialize.vector_to_json(s) for s in inst.path.samples],
        }
    if inst.a1 is not None:
        out["a1"] = serialize.element_to_json(inst.a1)
    if inst.a2 is not None:
        out["a2"] = serialize.element_to_json(inst.a2)
    return out
