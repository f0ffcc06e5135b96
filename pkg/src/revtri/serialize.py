"""JSON encoding/decoding for every wire-visible object.

Conventions (shared by instance files, certificates, and fuzz reports):
  * complex numbers are two-element arrays [re, im],
  * matrices are row-major nested arrays of those pairs,
  * an algebra shape is {"blocks": [d1, d2, ...]},
  * a module space is {"algebra": ..., "rank": m, "action": "right-only" |
    "two-sided"},
  * a vector is {"space": ..., "coords": [matrix, ...]} (or a bare coords
    list where the space is implied),
  * an orthogonal family embeds its members plus a "strict" flag.

Decoders raise SchemaError carrying a JSON-pointer-style path to the
offending node.  Round-trip fidelity is full double precision.
"""

from __future__ import annotations

import numpy as np

from . import algebra, hilbert, quadrature, reverse
from .algebra import AlgebraShape, Element
from .certificate import Certificate
from .errors import InputError, SchemaError
from .hilbert import ModuleSpace, ModuleVector, OrthoFamily


# ---------------------------------------------------------------------------
# encoders
# ---------------------------------------------------------------------------


def complex_to_json(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in m]


def shape_to_json(shape: AlgebraShape) -> dict:
    return {"blocks": list(shape.blocks)}


def element_to_json(a: Element) -> list:
    return matrix_to_json(a.entries)


def space_to_json(space: ModuleSpace) -> dict:
    return {
        "algebra": shape_to_json(space.algebra),
        "rank": space.rank,
        "action": space.action,
    }


def vector_to_json(x: ModuleVector) -> list:
    return [element_to_json(c) for c in x.coords]


def family_to_json(f: OrthoFamily) -> dict:
    return {"members": [vector_to_json(e) for e in f.members], "strict": f.strict}


def bounds_to_json(b) -> dict:
    if isinstance(b, reverse.ScalarBounds):
        return {"k1": b.k1, "k2": b.k2}
    if isinstance(b, reverse.HermitianBounds):
        return {"k1": element_to_json(b.k1), "k2": element_to_json(b.k2)}
    if isinstance(b, reverse.FamilyBounds):
        return {"r": list(b.r), "rho": list(b.rho)}
    if isinstance(b, reverse.AdditiveBounds):
        return {"M": [[float(v) for v in row] for row in b.M]}
    raise InputError(f"unknown bounds type {type(b).__name__}")


def _side_to_json(v):
    if isinstance(v, Element):
        return element_to_json(v)
    return float(v)


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "theorem": cert.theorem,
        "preconditions": [
            {"name": c.name, "ok": c.ok, "margin": c.margin} for c in cert.checks
        ],
        "preconditions_ok": cert.preconditions_ok,
        "lhs": _side_to_json(cert.lhs),
        "rhs": _side_to_json(cert.rhs),
        "slack": float(cert.slack),
        "relative_slack": float(cert.relative_slack),
        "equality": cert.equality,
        "witness_residual": None
        if cert.witness_residual is None
        else float(cert.witness_residual),
        "details": _plain(cert.details),
    }


def _plain(obj):
    """Recursively coerce to JSON-safe builtins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Element):
        return element_to_json(obj)
    if isinstance(obj, ModuleVector):
        return vector_to_json(obj)
    return obj


# ---------------------------------------------------------------------------
# decoders
# ---------------------------------------------------------------------------


def _expect(cond: bool, pointer: str, message: str) -> None:
    if not cond:
        raise SchemaError(pointer, message)


def complex_from_json(node, pointer: str) -> complex:
    _expect(
        isinstance(node, (list, tuple)) and len(node) == 2,
        pointer,
        "complex numbers are [re, im] pairs",
    )
    re, im = node
    _expect(
        isinstance(re, (int, float)) and isinstance(im, (int, float)),
        pointer,
        "complex parts must be numbers",
    )
    return complex(re, im)


def matrix_from_json(node, pointer: str) -> np.ndarray:
    _expect(isinstance(node, list) and node, pointer, "matrix must be a non-empty array of rows")
    nrows = len(node)
    out = np.zeros((nrows, nrows), dtype=complex)
    for i, row in enumerate(node):
        _expect(
            isinstance(row, list) and len(row) == nrows,
            f"{pointer}/{i}",
            f"matrix must be square with {nrows} columns per row",
        )
        for j, z in enumerate(row):
            out[i, j] = complex_from_json(z, f"{pointer}/{i}/{j}")
    return out


def shape_from_json(node, pointer: str) -> AlgebraShape:
    _expect(isinstance(node, dict), pointer, "algebra shape must be an object")
    blocks = node.get("blocks")
    _expect(
        isinstance(blocks, list) and blocks and all(isinstance(b, int) and b >= 1 for b in blocks),
        f"{pointer}/blocks",
        "blocks must be a non-empty array of integers >= 1",
    )
    return AlgebraShape(tuple(blocks))


def element_from_json(node, pointer: str, shape: AlgebraShape) -> Element:
    entries = matrix_from_json(node, pointer)
    if entries.shape != (shape.dim, shape.dim):
        raise SchemaError(
            pointer, f"matrix is {entries.shape[0]}x{entries.shape[1]}, algebra dimension is {shape.dim}"
        )
    try:
        return Element(shape, entries)
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def space_from_json(node, pointer: str) -> ModuleSpace:
    _expect(isinstance(node, dict), pointer, "space must be an object")
    shape = shape_from_json(node.get("algebra"), f"{pointer}/algebra")
    rank = node.get("rank")
    _expect(isinstance(rank, int) and rank >= 1, f"{pointer}/rank", "rank must be an integer >= 1")
    action = node.get("action", hilbert.RIGHT_ONLY)
    try:
        return ModuleSpace(shape, rank, action)
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def vector_from_json(node, pointer: str, space: ModuleSpace) -> ModuleVector:
    _expect(isinstance(node, list), pointer, "vector must be an array of coordinate matrices")
    if len(node) != space.rank:
        raise SchemaError(
            pointer, f"vector has {len(node)} coordinates, space rank is {space.rank}"
        )
    coords = tuple(
        element_from_json(c, f"{pointer}/{i}", space.algebra) for i, c in enumerate(node)
    )
    return ModuleVector(space, coords)


def family_from_json(node, pointer: str, space: ModuleSpace) -> OrthoFamily:
    _expect(isinstance(node, dict), pointer, "family must be an object")
    members = node.get("members")
    _expect(isinstance(members, list) and members, f"{pointer}/members", "members must be a non-empty array")
    strict = node.get("strict", False)
    _expect(isinstance(strict, bool), f"{pointer}/strict", "strict must be a boolean")
    vecs = tuple(
        vector_from_json(m, f"{pointer}/members/{i}", space) for i, m in enumerate(members)
    )
    try:
        return OrthoFamily(space=space, members=vecs, strict=strict)
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def scalar_bounds_from_json(node, pointer: str) -> reverse.ScalarBounds:
    _expect(isinstance(node, dict), pointer, "bounds must be an object")
    for key in ("k1", "k2"):
        _expect(isinstance(node.get(key), (int, float)), f"{pointer}/{key}", "expected a number")
    try:
        return reverse.ScalarBounds(float(node["k1"]), float(node["k2"]))
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def hermitian_bounds_from_json(node, pointer: str, shape: AlgebraShape) -> reverse.HermitianBounds:
    _expect(isinstance(node, dict), pointer, "bounds must be an object")
    k1 = element_from_json(node.get("k1"), f"{pointer}/k1", shape)
    k2 = element_from_json(node.get("k2"), f"{pointer}/k2", shape)
    try:
        return reverse.HermitianBounds(k1, k2)
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def family_bounds_from_json(node, pointer: str) -> reverse.FamilyBounds:
    _expect(isinstance(node, dict), pointer, "bounds must be an object")
    for key in ("r", "rho"):
        v = node.get(key)
        _expect(
            isinstance(v, list) and all(isinstance(t, (int, float)) for t in v),
            f"{pointer}/{key}",
            "expected an array of numbers",
        )
    try:
        return reverse.FamilyBounds(tuple(node["r"]), tuple(node["rho"]))
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc


def additive_bounds_from_json(node, pointer: str) -> reverse.AdditiveBounds:
    _expect(isinstance(node, dict), pointer, "bounds must be an object")
    M = node.get("M")
    _expect(isinstance(M, list) and M, f"{pointer}/M", "M must be a non-empty array of rows")
    width = None
    for i, row in enumerate(M):
        _expect(
            isinstance(row, list) and all(isinstance(v, (int, float)) for v in row),
            f"{pointer}/M/{i}",
            "rows must be arrays of numbers",
        )
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{pointer}/M/{i}", f"row length {len(row)} != {width}")
    try:
        return reverse.AdditiveBounds(np.array(M, dtype=float))
    except InputError as exc:
        raise SchemaError(f"{pointer}/M", str(exc)) from exc


def path_from_json(node, pointer: str, space: ModuleSpace) -> quadrature.SampledPath:
    """Either explicit samples or a named generator ("exp-circle", "linear")."""
    _expect(isinstance(node, dict), pointer, "path must be an object")
    for key in ("a", "b"):
        _expect(isinstance(node.get(key), (int, float)), f"{pointer}/{key}", "expected a number")
    a, b = float(node["a"]), float(node["b"])
    if "samples" in node:
        samples = node["samples"]
        _expect(isinstance(samples, list) and len(samples) >= 2, f"{pointer}/samples",
                "need an array of at least two vectors")
        vecs = tuple(
            vector_from_json(s, f"{pointer}/samples/{i}", space) for i, s in enumerate(samples)
        )
        try:
            return quadrature.SampledPath(space=space, a=a, b=b, samples=vecs)
        except InputError as exc:
            raise SchemaError(pointer, str(exc)) from exc
    generator = node.get("generator")
    _expect(
        generator in ("exp-circle", "linear"),
        f"{pointer}/generator",
        "path needs either samples or a generator in {exp-circle, linear}",
    )
    n = node.get("nodes", quadrature.DEFAULT_NODES)
    _expect(isinstance(n, int) and n >= 2, f"{pointer}/nodes", "nodes must be an integer >= 2")
    base = None
    if "base" in node:
        base = vector_from_json(node["base"], f"{pointer}/base", space)
    maker = quadrature.exp_circle_path if generator == "exp-circle" else quadrature.linear_path
    return maker(space, a, b, n, base=base)
