"""Finite-dimensional C*-algebra numerics on block-diagonal complex matrices.

Every finite-dimensional C*-algebra is *-isomorphic to a direct sum of full
matrix algebras, so the algebras here are A = M_{d1}(C) + ... + M_{dk}(C)
embedded block-diagonally in M_d(C), d = sum(d_i).  Elements are dense d x d
arrays constrained to vanish off the blocks; all operations preserve that
pattern exactly.

Conventions:
  * adjoint a* is the conjugate transpose,
  * Re a = (a + a*)/2 and Im a = (a - a*)/(2i) are hermitian,
  * the operator norm is the largest singular value, computed per block,
  * a <= b (Loewner) for hermitian a, b means b - a is positive semidefinite,
    checked with a relative eigenvalue tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificate import Certificate, Check
from .errors import InputError, PositivityError

# Relative tolerance used wherever a Loewner hypothesis is checked.  Fuzzed
# instances accumulate ~1e-13 of rounding; 1e-9 leaves margin without masking
# real violations.
ORDER_TOL = 1e-9

# Acceptance threshold for "hermitian within tolerance" preconditions.
HERM_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraShape:
    """Block structure of the algebra: ordered positive block dimensions."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks:
            raise InputError("algebra needs at least one block")
        if any(b < 1 for b in blocks):
            raise InputError(f"block dimensions must be >= 1, got {blocks}")
        object.__setattr__(self, "blocks", blocks)
        spans = []
        start = 0
        for b in blocks:
            spans.append((start, start + b))
            start += b
        object.__setattr__(self, "spans", tuple(spans))

    @property
    def dim(self) -> int:
        return self.spans[-1][1]

    @property
    def commutative(self) -> bool:
        return max(self.blocks) == 1

    def off_block_mask(self) -> np.ndarray:
        """Boolean d x d mask, True exactly off the block pattern."""
        mask = np.ones((self.dim, self.dim), dtype=bool)
        for lo, hi in self.spans:
            mask[lo:hi, lo:hi] = False
        mask.setflags(write=False)
        return mask


@dataclass(frozen=True, eq=False)
class Element:
    """An algebra element: a d x d complex matrix supported on the blocks."""

    shape: AlgebraShape
    entries: np.ndarray

    def __post_init__(self):
        d = self.shape.dim
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (d, d):
            raise InputError(
                f"entries must be {d}x{d} for shape {self.shape.blocks}, "
                f"got {entries.shape}"
            )
        if len(self.shape.blocks) > 1 and np.any(entries[self.shape.off_block_mask()]):
            raise InputError("entries are nonzero off the block pattern")
        entries = np.array(entries, order="C")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    # -- algebra operations (all block-preserving) --

    def adjoint(self) -> "Element":
        return _wrap(self.shape, self.entries.conj().T)

    def __add__(self, other: "Element") -> "Element":
        _same_shape(self, other)
        return _wrap(self.shape, self.entries + other.entries)

    def __sub__(self, other: "Element") -> "Element":
        _same_shape(self, other)
        return _wrap(self.shape, self.entries - other.entries)

    def __neg__(self) -> "Element":
        return _wrap(self.shape, -self.entries)

    def __mul__(self, other):
        if isinstance(other, Element):
            _same_shape(self, other)
            return _wrap(self.shape, self.entries @ other.entries)
        if isinstance(other, (int, float, complex)):
            return _wrap(self.shape, self.entries * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return _wrap(self.shape, other * self.entries)
        return NotImplemented

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        dev = np.abs(self.entries - self.entries.conj().T).max()
        scale = max(1.0, np.abs(self.entries).max())
        return bool(dev <= tol * scale)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigendecomposition of a hermitian element: a = Q diag(eigenvalues) Q*."""

    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns match eigenvalues


def _wrap(shape: AlgebraShape, entries: np.ndarray) -> Element:
    # Trusted constructor: skips block-pattern validation (hot path).
    el = object.__new__(Element)
    object.__setattr__(el, "shape", shape)
    object.__setattr__(el, "entries", entries)
    return el


def _same_shape(a: Element, b: Element) -> None:
    if a.shape != b.shape:
        raise InputError(f"shape mismatch: {a.shape.blocks} vs {b.shape.blocks}")


def unit(shape: AlgebraShape) -> Element:
    return _wrap(shape, np.eye(shape.dim, dtype=complex))


def zero(shape: AlgebraShape) -> Element:
    return _wrap(shape, np.zeros((shape.dim, shape.dim), dtype=complex))


def from_blocks(shape: AlgebraShape, blocks) -> Element:
    """Assemble an Element from one matrix per block."""
    if len(blocks) != len(shape.blocks):
        raise InputError(f"expected {len(shape.blocks)} blocks, got {len(blocks)}")
    entries = np.zeros((shape.dim, shape.dim), dtype=complex)
    for (lo, hi), blk in zip(shape.spans, blocks):
        blk = np.asarray(blk, dtype=complex)
        if blk.shape != (hi - lo, hi - lo):
            raise InputError(f"block of size {hi - lo} expected, got {blk.shape}")
        entries[lo:hi, lo:hi] = blk
    return _wrap(shape, entries)


def scalar_element(shape: AlgebraShape, value: complex) -> Element:
    """value * 1, the scalar multiples of the unit."""
    return _wrap(shape, value * np.eye(shape.dim, dtype=complex))


# ---------------------------------------------------------------------------
# hermitian spectra
# ---------------------------------------------------------------------------


def _require_hermitian(a: Element, who: str) -> None:
    if not a.is_hermitian():
        raise InputError(f"{who}: operand is not hermitian within {HERM_TOL:g}")


def _dense_eigvalsh(block: np.ndarray, out: list) -> None:
    # Closed forms for 1x1 and 2x2 blocks, LAPACK above that.
    d = block.shape[0]
    if d == 1:
        out.append(block[0, 0].real)
    elif d == 2:
        p = block[0, 0].real
        q = block[1, 1].real
        mid = 0.5 * (p + q)
        rad = np.hypot(0.5 * (p - q), abs(block[0, 1]))
        out.append(mid - rad)
        out.append(mid + rad)
    else:
        out.extend(np.linalg.eigvalsh(block))


def _block_eigvalsh(entries: np.ndarray, shape: AlgebraShape) -> np.ndarray:
    """Ascending eigenvalues of a hermitian block matrix."""
    vals: list = []
    for lo, hi in shape.spans:
        _dense_eigvalsh(entries[lo:hi, lo:hi], vals)
    out = np.array(vals, dtype=float)
    out.sort()
    return out


def herm_eigvalsh(a: Element) -> np.ndarray:
    """Ascending eigenvalues of a hermitian element."""
    _require_hermitian(a, "herm_eigvalsh")
    h = 0.5 * (a.entries + a.entries.conj().T)
    return _block_eigvalsh(h, a.shape)


def herm_spectrum(a: Element) -> Spectrum:
    """Full eigendecomposition of a hermitian element, eigenvalues ascending.

    The eigenvector matrix is block-diagonal up to the global column
    permutation that sorts eigenvalues, hence unitary.
    """
    _require_hermitian(a, "herm_spectrum")
    d = a.shape.dim
    h = 0.5 * (a.entries + a.entries.conj().T)
    vals = np.empty(d)
    vecs = np.zeros((d, d), dtype=complex)
    for lo, hi in a.shape.spans:
        w, v = np.linalg.eigh(h[lo:hi, lo:hi])
        vals[lo:hi] = w
        vecs[lo:hi, lo:hi] = v
    order = np.argsort(vals, kind="stable")
    return Spectrum(eigenvalues=vals[order], eigenvectors=vecs[:, order])


def psd_sqrt(a: Element, tol: float = ORDER_TOL) -> Element:
    """Positive square root of a positive semidefinite hermitian element.

    Eigenvalues in [-tol * max(1, lambda_max), 0) are clamped to zero;
    anything more negative raises PositivityError rather than being repaired.
    """
    _require_hermitian(a, "psd_sqrt")
    h = 0.5 * (a.entries + a.entries.conj().T)
    decomps = []
    lam_min = np.inf
    lam_max = -np.inf
    for lo, hi in a.shape.spans:
        w, v = np.linalg.eigh(h[lo:hi, lo:hi])
        lam_min = min(lam_min, w[0])
        lam_max = max(lam_max, w[-1])
        decomps.append((lo, hi, w, v))
    if lam_min < -tol * max(1.0, lam_max):
        raise PositivityError("psd_sqrt of a materially non-positive element", lam_min)
    entries = np.zeros_like(h)
    for lo, hi, w, v in decomps:
        root = np.sqrt(np.clip(w, 0.0, None))
        entries[lo:hi, lo:hi] = (v * root) @ v.conj().T
    return _wrap(a.shape, entries)


def op_norm(a: Element) -> float:
    """Operator (spectral) norm, computed as lambda_max(a* a)^(1/2)."""
    vals: list = []
    for lo, hi in a.shape.spans:
        blk = a.entries[lo:hi, lo:hi]
        _dense_eigvalsh(blk.conj().T @ blk, vals)
    return float(np.sqrt(max(max(vals), 0.0)))


def _herm_specrad(a: Element) -> float:
    w = herm_eigvalsh(a)
    return float(max(-w[0], w[-1], 0.0))


def loewner_compare(a: Element, b: Element, tol: float = ORDER_TOL) -> tuple[bool, float]:
    """(a <= b holds, lambda_min(b - a)) under the relative tolerance policy:
    the comparison passes iff lambda_min(b - a) >= -tol * max(1, ||a||, ||b||)."""
    _same_shape(a, b)
    _require_hermitian(a, "loewner_compare")
    _require_hermitian(b, "loewner_compare")
    gap = loewner_margin(a, b)
    scale = max(1.0, _herm_specrad(a), _herm_specrad(b))
    return bool(gap >= -tol * scale), gap


def loewner_leq(a: Element, b: Element, tol: float = ORDER_TOL) -> bool:
    """a <= b in the Loewner order, for hermitian a and b."""
    return loewner_compare(a, b, tol)[0]


def loewner_margin(a: Element, b: Element) -> float:
    """lambda_min(b - a): the signed margin of the comparison a <= b."""
    diff = 0.5 * (b.entries - a.entries)
    diff = diff + diff.conj().T
    return float(_block_eigvalsh(diff, a.shape)[0])


# ---------------------------------------------------------------------------
# real/imaginary parts and the polarization identity
# ---------------------------------------------------------------------------


def re_im_parts(a: Element) -> tuple[Element, Element]:
    """(Re a, Im a) = ((a + a*)/2, (a - a*)/2i); both hermitian and
    a = Re a + i Im a exactly."""
    adj = a.entries.conj().T
    re = _wrap(a.shape, 0.5 * (a.entries + adj))
    im = _wrap(a.shape, (-0.5j) * (a.entries - adj))
    return re, im


def check_diamond(a: Element, tol: float = 1e-12) -> Certificate:
    """Certify (aa* + a*a)/2 == (Re a)^2 + (Im a)^2 within tol.

    This identity is used by every verifier to trade moduli for real and
    imaginary parts, so it gets its own certificate.
    """
    adj = a.adjoint()
    lhs = 0.5 * (a * adj + adj * a)
    re, im = re_im_parts(a)
    rhs = re * re + im * im
    residual = op_norm(lhs - rhs)
    ok = residual <= tol
    return Certificate(
        theorem="diamond",
        checks=(Check("identity-residual", ok, tol - residual),),
        lhs=lhs,
        rhs=rhs,
        slack=tol - residual,
        scale=max(1.0, op_norm(a) ** 2),
        equality=ok,
        witness_residual=residual,
        details={"residual": residual},
    )


# ---------------------------------------------------------------------------
# random generators (fuzzing and family construction)
# ---------------------------------------------------------------------------


def random_element(shape: AlgebraShape, rng: np.random.Generator, radius: float = 2.0) -> Element:
    """Element with entries drawn uniformly from the complex disk of the
    given radius, independently per in-block entry."""
    entries = np.zeros((shape.dim, shape.dim), dtype=complex)
    for lo, hi in shape.spans:
        d = hi - lo
        r = radius * np.sqrt(rng.random((d, d)))
        theta = 2.0 * np.pi * rng.random((d, d))
        entries[lo:hi, lo:hi] = r * np.exp(1j * theta)
    return _wrap(shape, entries)


def random_hermitian(shape: AlgebraShape, rng: np.random.Generator, radius: float = 2.0) -> Element:
    a = random_element(shape, rng, radius)
    return _wrap(shape, 0.5 * (a.entries + a.entries.conj().T))


def random_psd(shape: AlgebraShape, rng: np.random.Generator, radius: float = 2.0) -> Element:
    a = random_element(shape, rng, np.sqrt(radius))
    return _wrap(shape, a.entries.conj().T @ a.entries)


def random_unitary(shape: AlgebraShape, rng: np.random.Generator) -> Element:
    """Haar-ish random unitary: per block, QR of a complex Gaussian matrix
    with the R diagonal phases absorbed."""
    entries = np.zeros((shape.dim, shape.dim), dtype=complex)
    for lo, hi in shape.spans:
        d = hi - lo
        if d == 1:
            entries[lo, lo] = np.exp(2j * np.pi * rng.random())
            continue
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(g)
        phases = np.diagonal(r).copy()
        phases /= np.abs(phases)
        entries[lo:hi, lo:hi] = q * phases
    return _wrap(shape, entries)


def random_contraction(shape: AlgebraShape, rng: np.random.Generator) -> Element:
    """Random element normalized to operator norm 1, so a*a <= 1."""
    while True:
        a = random_element(shape, rng)
        nrm = op_norm(a)
        if nrm > 1e-6:
            return _wrap(shape, a.entries / nrm)
