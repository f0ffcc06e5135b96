"""Hilbert C*-module backends X = A^m over block-diagonal matrix algebras.

The A-valued inner product is <x, y> = sum_i x_i* y_i.  NOTE the convention:
it is conjugate-linear in the FIRST variable and linear in the second, with
<x, y a> = <x, y> a.  Many texts use the opposite slot; everything downstream
(extraction formulas, witnesses) depends on this one.

The modulus |x| = <x, x>^(1/2) is an algebra element and deliberately does
NOT satisfy a triangle inequality; the norm ||x|| = ||<x, x>||^(1/2) does.

A space may be flagged "two-sided": the coordinatewise left action a.x then
satisfies <x, a y> = a <x, y>, which holds iff the algebra is commutative,
so the flag is rejected otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import AlgebraShape, Element, _wrap
from .certificate import Certificate, Check
from .errors import (
    CapabilityError,
    ConsistencyError,
    HypothesisError,
    InputError,
    PositivityError,
)

RIGHT_ONLY = "right-only"
TWO_SIDED = "two-sided"


@dataclass(frozen=True)
class ModuleSpace:
    """The module A^m: algebra shape, rank m, and the action capability."""

    algebra: AlgebraShape
    rank: int
    action: str = RIGHT_ONLY

    def __post_init__(self):
        if self.rank < 1:
            raise InputError(f"rank must be >= 1, got {self.rank}")
        if self.action not in (RIGHT_ONLY, TWO_SIDED):
            raise InputError(f"unknown action {self.action!r}")
        if self.action == TWO_SIDED and not self.algebra.commutative:
            raise InputError(
                "two-sided action requires a commutative algebra "
                "(coordinatewise left action satisfies <x, a y> = a <x, y> "
                "only there)"
            )


def scalar_space(rank: int) -> ModuleSpace:
    """The Hilbert-space backend: A = C, X = C^rank, two-sided."""
    return ModuleSpace(AlgebraShape((1,)), rank, TWO_SIDED)


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """A vector in A^m, one algebra element per coordinate.

    Immutable; the Gram element <x, x> and the norm are memoized on first use.
    """

    space: ModuleSpace
    coords: tuple[Element, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) != self.space.rank:
            raise InputError(
                f"vector has {len(coords)} coordinates, space rank is {self.space.rank}"
            )
        for i, c in enumerate(coords):
            if c.shape != self.space.algebra:
                raise InputError(f"coordinate {i} has shape {c.shape.blocks}, "
                                 f"space algebra is {self.space.algebra.blocks}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_gram", None)
        object.__setattr__(self, "_norm", None)

    @property
    def gram(self) -> Element:
        """<x, x>, hermitian positive semidefinite."""
        if self._gram is None:
            object.__setattr__(self, "_gram", inner(self, self))
        return self._gram

    @property
    def norm(self) -> float:
        """||x|| = ||<x, x>||^(1/2) = lambda_max(<x, x>)^(1/2)."""
        if self._norm is None:
            top = algebra.herm_eigvalsh(self.gram)[-1]
            object.__setattr__(self, "_norm", float(np.sqrt(max(top, 0.0))))
        return self._norm

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        _same_space(self, other)
        return ModuleVector(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        _same_space(self, other)
        return ModuleVector(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.space, tuple(-c for c in self.coords))

    def __mul__(self, other):
        """x * a is the right action for an algebra element a, scalar
        multiplication for a number (same thing as acting by a = lambda 1)."""
        if isinstance(other, Element):
            return ModuleVector(self.space, tuple(c * other for c in self.coords))
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.space, tuple(c * other for c in self.coords))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ModuleVector(self.space, tuple(other * c for c in self.coords))
        return NotImplemented

    def left_mul(self, a: Element) -> "ModuleVector":
        """The left action a.x, available on two-sided spaces only."""
        if self.space.action != TWO_SIDED:
            raise CapabilityError("left action requires a two-sided space")
        return ModuleVector(self.space, tuple(a * c for c in self.coords))


def _same_space(x: ModuleVector, y: ModuleVector) -> None:
    if x.space != y.space:
        raise InputError("vectors live in different module spaces")


def zero_vector(space: ModuleSpace) -> ModuleVector:
    return ModuleVector(space, tuple(algebra.zero(space.algebra) for _ in range(space.rank)))


def slot_vector(space: ModuleSpace, slot: int, value: Element | None = None) -> ModuleVector:
    """Vector with a single nonzero coordinate (the algebra unit by default)."""
    if not 0 <= slot < space.rank:
        raise InputError(f"slot {slot} out of range for rank {space.rank}")
    coords = [algebra.zero(space.algebra) for _ in range(space.rank)]
    coords[slot] = value if value is not None else algebra.unit(space.algebra)
    return ModuleVector(space, tuple(coords))


def from_scalars(space: ModuleSpace, values) -> ModuleVector:
    """Scalar-backend convenience: coordinates value_i * 1."""
    if len(values) != space.rank:
        raise InputError(f"expected {space.rank} scalars, got {len(values)}")
    return ModuleVector(
        space, tuple(algebra.scalar_element(space.algebra, v) for v in values)
    )


def vector_sum(xs) -> ModuleVector:
    xs = list(xs)
    if not xs:
        raise InputError("empty vector sum")
    acc = xs[0]
    for x in xs[1:]:
        acc = acc + x
    return acc


# ---------------------------------------------------------------------------
# inner product, modulus, Cauchy-Schwarz
# ---------------------------------------------------------------------------


def inner(x: ModuleVector, y: ModuleVector) -> Element:
    """<x, y> = sum_i x_i* y_i (conjugate-linear in x, linear in y)."""
    _same_space(x, y)
    shp = x.space.algebra
    acc = np.zeros((shp.dim, shp.dim), dtype=complex)
    for xi, yi in zip(x.coords, y.coords):
        acc += xi.entries.conj().T @ yi.entries
    return _wrap(shp, acc)


def modulus_and_norm(x: ModuleVector) -> tuple[Element, float]:
    """(|x|, ||x||) with |x| = <x, x>^(1/2); || |x| || equals ||x||."""
    try:
        modulus = algebra.psd_sqrt(x.gram, tol=1e-8)
    except PositivityError as exc:
        raise ConsistencyError(f"<x, x> is not positive semidefinite: {exc}") from exc
    return modulus, x.norm


def cs_gap(x: ModuleVector, y: ModuleVector, tol: float = algebra.ORDER_TOL) -> Certificate:
    """Certify the Cauchy-Schwarz inequality <y,x><x,y> <= ||x||^2 <y,y>."""
    _same_space(x, y)
    lhs = inner(y, x) * inner(x, y)
    rhs = (x.norm ** 2) * inner(y, y)
    gap = algebra.loewner_margin(lhs, rhs)
    scale = (x.norm * y.norm) ** 2
    ok = gap >= -tol * max(1.0, scale)
    return Certificate(
        theorem="cauchy-schwarz",
        checks=(Check("spaces-match", True, 0.0),),
        lhs=lhs,
        rhs=rhs,
        slack=gap,
        scale=scale,
        equality=abs(gap) <= 1e-9 * max(1.0, scale),
        details={"passed": ok},
    )


def cs_equality_reconstruct(
    x: ModuleVector, y: ModuleVector, tol: float = 1e-9
) -> ModuleVector:
    """Recover y from x in the Cauchy-Schwarz equality case.

    Requires |<x, y>| = ||x|| ||y|| (within tol, in operator norm); then
    y = x <x, y> / ||x||^2 and the returned vector reproduces y.
    """
    _same_space(x, y)
    if x.norm == 0.0:
        raise InputError("cs_equality_reconstruct needs x != 0")
    xy = inner(x, y)
    mod_xy = algebra.psd_sqrt(xy.adjoint() * xy, tol=1e-8)
    target = algebra.scalar_element(x.space.algebra, x.norm * y.norm)
    deviation = algebra.op_norm(mod_xy - target)
    if deviation > tol * max(1.0, x.norm * y.norm):
        raise HypothesisError(
            f"|<x,y>| != ||x|| ||y|| (deviation {deviation:.3g})", deviation
        )
    return x * (xy * (1.0 / x.norm ** 2))


# ---------------------------------------------------------------------------
# orthogonal families
# ---------------------------------------------------------------------------

FAMILY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OrthoFamily:
    """Pairwise-orthogonal unit vectors e_1..e_m; strict means <e_k,e_k> = 1.

    Validated on construction: ||<e_i, e_j>|| <= 1e-10 for i != j, every
    ||e_k|| = 1 within 1e-10, and the strictness condition when claimed.
    """

    space: ModuleSpace
    members: tuple[ModuleVector, ...]
    strict: bool

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InputError("orthogonal family needs at least one member")
        object.__setattr__(self, "members", members)
        one = algebra.unit(self.space.algebra)
        for k, e in enumerate(members):
            if e.space != self.space:
                raise InputError(f"family member {k} lives in a different space")
            if abs(e.norm - 1.0) > FAMILY_TOL:
                raise InputError(f"family member {k} has norm {e.norm!r}, expected 1")
            if self.strict and algebra.op_norm(e.gram - one) > FAMILY_TOL:
                raise InputError(f"strict family member {k} has <e,e> != 1")
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                cross = algebra.op_norm(inner(members[i], members[j]))
                if cross > FAMILY_TOL:
                    raise InputError(
                        f"family members {i} and {j} are not orthogonal "
                        f"(||<e_i,e_j>|| = {cross:.3g})"
                    )

    def __len__(self) -> int:
        return len(self.members)


def make_ortho_family(
    space: ModuleSpace, m: int, strict: bool, seed: int
) -> OrthoFamily:
    """Random orthogonal family in distinct coordinate slots, deterministic
    in the seed.

    Strict members carry a random unitary (so <e_k, e_k> = 1 exactly);
    non-strict members a random norm-one contraction (so |e_k| <= 1 with
    ||e_k|| = 1).
    """
    if m < 1:
        raise InputError("family size must be >= 1")
    if m > space.rank:
        raise InputError(f"family size {m} exceeds module rank {space.rank}")
    rng = np.random.default_rng(seed)
    slots = rng.permutation(space.rank)[:m]
    members = []
    for k in range(m):
        block = (
            algebra.random_unitary(space.algebra, rng)
            if strict
            else algebra.random_contraction(space.algebra, rng)
        )
        members.append(slot_vector(space, int(slots[k]), block))
    return OrthoFamily(space=space, members=tuple(members), strict=strict)


def bessel_defect(
    x: ModuleVector,
    family: OrthoFamily,
    side: str = "right",
    tol: float = algebra.ORDER_TOL,
) -> Certificate:
    """Certify the Bessel-type bound sum_k |<e_k, x>|^2 <= |x|^2.

    side="right" uses <e_k, x>, side="left" uses <x, e_k>; the left bound's
    proof needs the two-sided structure, so it is refused on right-only
    spaces.
    """
    if side not in ("right", "left"):
        raise InputError(f"side must be 'right' or 'left', got {side!r}")
    if side == "left" and x.space.action != TWO_SIDED:
        raise CapabilityError("left Bessel bound requires a two-sided space")
    if family.space != x.space:
        raise InputError("family and vector live in different spaces")
    shp = x.space.algebra
    acc = algebra.zero(shp)
    for e in family.members:
        a = inner(e, x) if side == "right" else inner(x, e)
        acc = acc + a.adjoint() * a
    gap = algebra.loewner_margin(acc, x.gram)
    scale = x.norm ** 2
    return Certificate(
        theorem=f"bessel-{side}",
        checks=(Check("family-valid", True, 0.0),),
        lhs=acc,
        rhs=x.gram,
        slack=gap,
        scale=scale,
        equality=abs(gap) <= 1e-9 * max(1.0, scale),
        details={"passed": gap >= -tol * max(1.0, scale), "side": side},
    )
