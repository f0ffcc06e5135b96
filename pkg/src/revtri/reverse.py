"""Reverse triangle inequality verifiers, constant extraction, and equality
construction for Hilbert C*-modules.

Five certified statements, identified by theorem id:

  mult-scalar     sqrt(k1^2 + k2^2) sum||x_j||  <=  ||sum x_j||
                  under 0 <= k_i ||x_j|| <= Re/Im <e, x_j>, |e| <= 1.
  mult-hermitian  same conclusion read in the Loewner order with hermitian
                  algebra elements k1, k2 and squared hypotheses.
  family-norm     sqrt(sum_k r_k^2 + rho_k^2) sum||x_j|| <= ||sum x_j|| over
                  an orthogonal family, with an equality witness.
  family-modulus  the same lower bound against the modulus |sum x_j| in the
                  Loewner order (two-sided spaces; r_k, rho_k >= 0).
  additive        sum||x_j|| <= ||sum x_j||/sqrt(m) + (1/m) sum_jk M_jk with
                  a bidirectional equality characterization for |e_k| = 1.

Verifiers never raise on failed hypotheses: every hypothesis becomes a Check
in the certificate and the caller inspects ``preconditions_ok``.  Extractors
return the maximal admissible constants, so "extract then verify" must always
pass; that soundness loop is what the fuzzer hammers on.

Equality semantics: relative slack <= 1e-9 AND (where the theorem has a
witness) witness residual <= 1e-8 * sum||x_j||.  Both are required because
slack alone vanishes accidentally at scale zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra, hilbert
from .algebra import Element, loewner_compare, op_norm, scalar_element
from .certificate import Certificate, Check
from .errors import CapabilityError, HypothesisError, InputError
from .hilbert import ModuleVector, OrthoFamily, inner, vector_sum

ORDER_TOL = algebra.ORDER_TOL
EQ_SLACK_RTOL = 1e-9
EQ_WITNESS_RTOL = 1e-8

MULT_SCALAR = "mult-scalar"
MULT_HERMITIAN = "mult-hermitian"
FAMILY_NORM = "family-norm"
FAMILY_MODULUS = "family-modulus"
ADDITIVE = "additive"

THEOREMS = (MULT_SCALAR, MULT_HERMITIAN, FAMILY_NORM, FAMILY_MODULUS, ADDITIVE)


# ---------------------------------------------------------------------------
# bounds containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarBounds:
    k1: float
    k2: float

    def __post_init__(self):
        if not (self.k1 >= 0.0 and self.k2 >= 0.0):
            raise InputError(f"scalar bounds must be nonnegative, got {self}")


@dataclass(frozen=True, eq=False)
class HermitianBounds:
    k1: Element
    k2: Element

    def __post_init__(self):
        for name, k in (("k1", self.k1), ("k2", self.k2)):
            if not k.is_hermitian():
                raise InputError(f"hermitian bound {name} is not hermitian")


@dataclass(frozen=True)
class FamilyBounds:
    r: tuple[float, ...]
    rho: tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(v) for v in self.r)
        rho = tuple(float(v) for v in self.rho)
        if len(r) != len(rho):
            raise InputError("r and rho must have equal length")
        if not all(np.isfinite(r + rho)):
            raise InputError("family bounds must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "rho", rho)

    @property
    def coefficient(self) -> float:
        """sqrt(sum r_k^2 + rho_k^2), the multiplicative constant."""
        return float(np.sqrt(sum(a * a + b * b for a, b in zip(self.r, self.rho))))


@dataclass(frozen=True, eq=False)
class AdditiveBounds:
    M: np.ndarray  # (n, m), entrywise nonnegative

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.ndim != 2:
            raise InputError(f"additive bounds must be a matrix, got ndim {M.ndim}")
        if not np.all(np.isfinite(M)) or np.any(M < 0.0):
            raise InputError("additive bounds must be finite and entrywise >= 0")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------


def _loewner_check(name: str, a: Element, b: Element, tol: float) -> Check:
    ok, margin = loewner_compare(a, b, tol)
    return Check(name, ok, margin)


def _contraction_check(e: ModuleVector, tol: float, name: str = "e-contraction") -> Check:
    one = algebra.unit(e.space.algebra)
    return _loewner_check(name, e.gram, one, tol)


def _require_contraction(e: ModuleVector) -> None:
    ok, margin = loewner_compare(e.gram, algebra.unit(e.space.algebra), ORDER_TOL)
    if not ok:
        raise HypothesisError(f"|e| <= 1 fails (margin {margin:.3g})", -margin)


def _nonzero_norms(xs) -> list[float]:
    norms = []
    for j, x in enumerate(xs):
        if x.norm == 0.0:
            raise InputError(f"vector {j} is zero; constants are undefined")
        norms.append(x.norm)
    return norms


def _re_inner(e: ModuleVector, x: ModuleVector) -> Element:
    return algebra.re_im_parts(inner(e, x))[0]


def _re_im_inner(e: ModuleVector, x: ModuleVector) -> tuple[Element, Element]:
    return algebra.re_im_parts(inner(e, x))


def _check_spaces(xs, space) -> list:
    xs = list(xs)
    if not xs:
        raise InputError("need at least one vector")
    for j, x in enumerate(xs):
        if x.space != space:
            raise InputError(f"vector {j} lives in a different space")
    return xs


# ---------------------------------------------------------------------------
# scalar-constant theorem
# ---------------------------------------------------------------------------


def extract_scalar_bounds(e: ModuleVector, xs) -> ScalarBounds:
    """Maximal k1, k2 >= 0 with k_i ||x_j|| 1 <= Re/Im <e, x_j> for all j.

    k_i = max(0, min_j lambda_min(Re/Im <e, x_j>) / ||x_j||); inflating either
    nonzero constant breaks at least one hypothesis.
    """
    xs = _check_spaces(xs, e.space)
    _require_contraction(e)
    norms = _nonzero_norms(xs)
    k1 = np.inf
    k2 = np.inf
    for x, nx in zip(xs, norms):
        re, im = _re_im_inner(e, x)
        k1 = min(k1, algebra.herm_eigvalsh(re)[0] / nx)
        k2 = min(k2, algebra.herm_eigvalsh(im)[0] / nx)
    return ScalarBounds(max(0.0, float(k1)), max(0.0, float(k2)))


def verify_multiplicative_scalar(
    e: ModuleVector, xs, b: ScalarBounds, tol: float = ORDER_TOL
) -> Certificate:
    """Certify sqrt(k1^2 + k2^2) sum||x_j|| <= ||sum x_j||."""
    xs = _check_spaces(xs, e.space)
    shp = e.space.algebra
    checks = [_contraction_check(e, tol)]
    norms = [x.norm for x in xs]
    for j, x in enumerate(xs):
        re, im = _re_im_inner(e, x)
        checks.append(_loewner_check(f"re-bound[{j}]", scalar_element(shp, b.k1 * norms[j]), re, tol))
        checks.append(_loewner_check(f"im-bound[{j}]", scalar_element(shp, b.k2 * norms[j]), im, tol))
    total = float(sum(norms))
    lhs = float(np.sqrt(b.k1 * b.k1 + b.k2 * b.k2)) * total
    rhs = vector_sum(xs).norm
    slack = rhs - lhs
    rel = slack / total if total > 0.0 else 0.0
    return Certificate(
        theorem=MULT_SCALAR,
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=total,
        equality=bool(abs(rel) <= EQ_SLACK_RTOL),
        details={"bounds": {"k1": b.k1, "k2": b.k2}},
    )


# ---------------------------------------------------------------------------
# hermitian-constant theorem
# ---------------------------------------------------------------------------


def extract_hermitian_bounds(e: ModuleVector, xs) -> HermitianBounds:
    """Maximal positive block-scalar hermitian k1, k2 with
    k_i^2 ||x_j||^2 <= (Re/Im <e, x_j>)^2 for every j.

    Per block the constant is max(0, min_j lambda_min of the Re/Im part on
    that block / ||x_j||); on commutative algebras this is the entrywise
    optimum.  Clamping at zero keeps the extracted constants in the cone
    where the conclusion is actually provable: the squared hypotheses alone
    also admit sign-flipped instances (Re <e, x_j> with negative spectrum)
    for which the lower bound fails, so extraction never produces those.
    """
    xs = _check_spaces(xs, e.space)
    _require_contraction(e)
    norms = _nonzero_norms(xs)
    shp = e.space.algebra
    spans = shp.spans
    c1 = [np.inf] * len(spans)
    c2 = [np.inf] * len(spans)
    for x, nx in zip(xs, norms):
        re, im = _re_im_inner(e, x)
        for bi, (lo, hi) in enumerate(spans):
            vals_re: list = []
            vals_im: list = []
            algebra._dense_eigvalsh(re.entries[lo:hi, lo:hi], vals_re)
            algebra._dense_eigvalsh(im.entries[lo:hi, lo:hi], vals_im)
            c1[bi] = min(c1[bi], min(vals_re) / nx)
            c2[bi] = min(c2[bi], min(vals_im) / nx)
    c1 = [max(0.0, c) for c in c1]
    c2 = [max(0.0, c) for c in c2]
    k1 = algebra.from_blocks(shp, [c * np.eye(hi - lo) for c, (lo, hi) in zip(c1, spans)])
    k2 = algebra.from_blocks(shp, [c * np.eye(hi - lo) for c, (lo, hi) in zip(c2, spans)])
    return HermitianBounds(k1, k2)


def verify_multiplicative_hermitian(
    e: ModuleVector, xs, b: HermitianBounds, tol: float = ORDER_TOL
) -> Certificate:
    """Certify the Loewner reading (k1^2 + k2^2)(sum||x_j||)^2 <= ||sum x_j||^2 1
    under the squared hypotheses k_i^2 ||x_j||^2 <= (Re/Im <e, x_j>)^2.

    The equivalent scalar reading ||(k1^2+k2^2)^(1/2)|| sum||x_j|| vs
    ||sum x_j|| is recorded in the details for comparison.
    """
    xs = _check_spaces(xs, e.space)
    shp = e.space.algebra
    checks = [
        Check("k1-hermitian", b.k1.is_hermitian(), 0.0),
        Check("k2-hermitian", b.k2.is_hermitian(), 0.0),
        _contraction_check(e, tol),
    ]
    norms = [x.norm for x in xs]
    k1sq = b.k1 * b.k1
    k2sq = b.k2 * b.k2
    for j, x in enumerate(xs):
        re, im = _re_im_inner(e, x)
        nsq = norms[j] ** 2
        checks.append(_loewner_check(f"re-sq-bound[{j}]", nsq * k1sq, re * re, tol))
        checks.append(_loewner_check(f"im-sq-bound[{j}]", nsq * k2sq, im * im, tol))
    total = float(sum(norms))
    rhs_norm = vector_sum(xs).norm
    lhs = (total ** 2) * (k1sq + k2sq)
    rhs = scalar_element(shp, rhs_norm ** 2)
    slack = algebra.loewner_margin(lhs, rhs)
    scale = total ** 2
    rel = slack / scale if scale > 0.0 else 0.0
    scalar_lhs = float(np.sqrt(max(algebra.herm_eigvalsh(k1sq + k2sq)[-1], 0.0))) * total
    return Certificate(
        theorem=MULT_HERMITIAN,
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=scale,
        equality=bool(abs(rel) <= EQ_SLACK_RTOL),
        details={
            "scalar_reading": {
                "lhs": scalar_lhs,
                "rhs": rhs_norm,
                "slack": rhs_norm - scalar_lhs,
            }
        },
    )


# ---------------------------------------------------------------------------
# orthogonal-family theorems
# ---------------------------------------------------------------------------


def extract_family_bounds(family: OrthoFamily, xs) -> FamilyBounds:
    """Maximal r_k, rho_k >= 0 against each family member; the same values
    are admissible for both the norm-form and modulus-form hypotheses."""
    xs = _check_spaces(xs, family.space)
    norms = _nonzero_norms(xs)
    r = []
    rho = []
    for e in family.members:
        k1 = np.inf
        k2 = np.inf
        for x, nx in zip(xs, norms):
            re, im = _re_im_inner(e, x)
            k1 = min(k1, algebra.herm_eigvalsh(re)[0] / nx)
            k2 = min(k2, algebra.herm_eigvalsh(im)[0] / nx)
        r.append(max(0.0, float(k1)))
        rho.append(max(0.0, float(k2)))
    return FamilyBounds(tuple(r), tuple(rho))


def _family_direction(family: OrthoFamily, b: FamilyBounds) -> ModuleVector:
    """sum_k (r_k + i rho_k) e_k, the equality direction."""
    return vector_sum(
        e * complex(rk, pk) for e, rk, pk in zip(family.members, b.r, b.rho)
    )


def _witness_residual(family, b, xs, total) -> float:
    target = _family_direction(family, b) * total
    return (vector_sum(xs) - target).norm


def verify_family_norm(
    family: OrthoFamily, xs, b: FamilyBounds, tol: float = ORDER_TOL
) -> Certificate:
    """Certify sqrt(sum_k r_k^2 + rho_k^2) sum||x_j|| <= ||sum x_j|| with the
    equality witness sum x_j = (sum||x_j||) sum_k (r_k + i rho_k) e_k.

    The r_k may carry either sign; hypotheses are checked literally as
    r_k^2 ||x_j|| <= Re <r_k e_k, x_j> (and the Im analogue).
    """
    xs = _check_spaces(xs, family.space)
    if len(b.r) != len(family):
        raise InputError("bounds length does not match family size")
    shp = family.space.algebra
    checks = []
    norms = [x.norm for x in xs]
    for k, e in enumerate(family.members):
        for j, x in enumerate(xs):
            re, im = _re_im_inner(e, x)
            checks.append(
                _loewner_check(
                    f"re-bound[{k},{j}]",
                    scalar_element(shp, b.r[k] ** 2 * norms[j]),
                    b.r[k] * re,
                    tol,
                )
            )
            checks.append(
                _loewner_check(
                    f"im-bound[{k},{j}]",
                    scalar_element(shp, b.rho[k] ** 2 * norms[j]),
                    b.rho[k] * im,
                    tol,
                )
            )
    total = float(sum(norms))
    lhs = b.coefficient * total
    rhs = vector_sum(xs).norm
    slack = rhs - lhs
    rel = slack / total if total > 0.0 else 0.0
    residual = _witness_residual(family, b, xs, total)
    wit_rel = residual / total if total > 0.0 else 0.0
    return Certificate(
        theorem=FAMILY_NORM,
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=total,
        equality=bool(abs(rel) <= EQ_SLACK_RTOL and wit_rel <= EQ_WITNESS_RTOL),
        witness_residual=residual,
        details={"coefficient": b.coefficient},
    )


def build_equality_instance(
    family: OrthoFamily, b: FamilyBounds, norms
) -> list[ModuleVector]:
    """Vectors achieving equality in the family theorems: x_j = t_j v with
    v = sum_k (r_k + i rho_k) e_k.

    Needs <e_k, e_k> = 1 (strictness is what makes ||v|| exactly the
    coefficient) and a normalized coefficient sum r_k^2 + rho_k^2 = 1; then
    ||x_j|| = t_j, every hypothesis is tight, and the verifiers report
    equality.
    """
    if len(b.r) != len(family):
        raise InputError("bounds length does not match family size")
    if not _numerically_strict(family):
        raise CapabilityError(
            "equality construction requires <e_k, e_k> = 1 for every member"
        )
    total_sq = sum(a * a + c * c for a, c in zip(b.r, b.rho))
    if abs(total_sq - 1.0) > 1e-12:
        raise InputError(f"bounds must satisfy sum r^2 + rho^2 = 1, got {total_sq!r}")
    norms = [float(t) for t in norms]
    if any(t <= 0.0 for t in norms):
        raise InputError("norms must be positive")
    v = _family_direction(family, b)
    return [v * t for t in norms]


def _numerically_strict(family: OrthoFamily) -> bool:
    one = algebra.unit(family.space.algebra)
    return all(op_norm(e.gram - one) <= hilbert.FAMILY_TOL for e in family.members)


def verify_family_modulus(
    family: OrthoFamily, xs, b: FamilyBounds, tol: float = ORDER_TOL
) -> Certificate:
    """Certify the operator lower bound
    sqrt(sum_k r_k^2 + rho_k^2) (sum||x_j||) 1 <= |sum x_j| (Loewner).

    Needs a two-sided space (the proof uses both Bessel-type bounds) and
    r_k, rho_k >= 0; hypotheses are the unsquared r_k ||x_j|| <= Re <e_k, x_j>.
    Equality is certified only when <e_k, e_k> = 1 for every member, and then
    means operator equality, with the same witness as the norm form.
    """
    if family.space.action != hilbert.TWO_SIDED:
        raise CapabilityError("modulus-valued bound requires a two-sided space")
    xs = _check_spaces(xs, family.space)
    if len(b.r) != len(family):
        raise InputError("bounds length does not match family size")
    shp = family.space.algebra
    checks = []
    for k in range(len(family)):
        checks.append(Check(f"r-nonneg[{k}]", b.r[k] >= 0.0, b.r[k]))
        checks.append(Check(f"rho-nonneg[{k}]", b.rho[k] >= 0.0, b.rho[k]))
    norms = [x.norm for x in xs]
    for k, e in enumerate(family.members):
        for j, x in enumerate(xs):
            re, im = _re_im_inner(e, x)
            checks.append(
                _loewner_check(
                    f"re-bound[{k},{j}]", scalar_element(shp, b.r[k] * norms[j]), re, tol
                )
            )
            checks.append(
                _loewner_check(
                    f"im-bound[{k},{j}]", scalar_element(shp, b.rho[k] * norms[j]), im, tol
                )
            )
    total = float(sum(norms))
    lhs = scalar_element(shp, b.coefficient * total)
    rhs, _ = hilbert.modulus_and_norm(vector_sum(xs))
    slack = algebra.loewner_margin(lhs, rhs)
    rel = slack / total if total > 0.0 else 0.0
    details: dict = {"coefficient": b.coefficient}
    equality = False
    residual = None
    if _numerically_strict(family):
        gap = op_norm(rhs - lhs)
        residual = _witness_residual(family, b, xs, total)
        wit_rel = residual / total if total > 0.0 else 0.0
        gap_rel = gap / total if total > 0.0 else 0.0
        equality = bool(gap_rel <= EQ_SLACK_RTOL and wit_rel <= EQ_WITNESS_RTOL)
        details["equality_gap"] = gap
    else:
        details["warnings"] = ["equality undetermined: family members need <e,e> = 1"]
    return Certificate(
        theorem=FAMILY_MODULUS,
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=total,
        equality=equality,
        witness_residual=residual,
        details=details,
    )


# ---------------------------------------------------------------------------
# additive theorem
# ---------------------------------------------------------------------------


def extract_additive_bounds(family: OrthoFamily, xs) -> AdditiveBounds:
    """Minimal admissible M_jk = max(0, lambda_max(||x_j|| 1 - Re <e_k, x_j>));
    any smaller value fails the (j, k) hypothesis."""
    xs = _check_spaces(xs, family.space)
    shp = family.space.algebra
    M = np.zeros((len(xs), len(family)))
    for j, x in enumerate(xs):
        nx = x.norm
        for k, e in enumerate(family.members):
            gap = scalar_element(shp, nx) - _re_inner(e, x)
            M[j, k] = max(0.0, algebra.herm_eigvalsh(gap)[-1])
    return AdditiveBounds(M)


def verify_additive(
    family: OrthoFamily, xs, b: AdditiveBounds, tol: float = ORDER_TOL
) -> Certificate:
    """Certify sum||x_j|| <= ||sum x_j||/sqrt(m) + (1/m) sum_jk M_jk.

    When every |e_k| = 1 the equality case is characterized: equality holds
    iff sum||x_j|| >= (1/m) sum_jk M_jk and
    sum x_j = (sum||x_j|| - (1/m) sum_jk M_jk) sum_k e_k; both conditions are
    evaluated and folded into the equality flag.  Otherwise the equality
    check is skipped with a warning.
    """
    xs = _check_spaces(xs, family.space)
    m = len(family)
    if b.M.shape != (len(xs), m):
        raise InputError(f"M must be {len(xs)}x{m}, got {b.M.shape}")
    shp = family.space.algebra
    checks = []
    norms = [x.norm for x in xs]
    for k, e in enumerate(family.members):
        checks.append(_contraction_check(e, tol, name=f"e-contraction[{k}]"))
        for j, x in enumerate(xs):
            gap = scalar_element(shp, norms[j]) - _re_inner(e, x)
            checks.append(
                _loewner_check(f"defect-bound[{j},{k}]", gap, scalar_element(shp, b.M[j, k]), tol)
            )
    total = float(sum(norms))
    sum_vec = vector_sum(xs)
    mean_defect = float(b.M.sum()) / m
    rhs = sum_vec.norm / np.sqrt(m) + mean_defect
    slack = rhs - total
    rel = slack / total if total > 0.0 else 0.0
    details: dict = {"mean_defect": mean_defect}
    equality = False
    residual = None
    if _numerically_strict(family):
        excess = total - mean_defect
        target = vector_sum(family.members) * excess
        residual = (sum_vec - target).norm
        wit_rel = residual / total if total > 0.0 else 0.0
        excess_ok = excess >= -EQ_SLACK_RTOL * max(1.0, total)
        equality = bool(abs(rel) <= EQ_SLACK_RTOL and excess_ok and wit_rel <= EQ_WITNESS_RTOL)
        details["excess"] = excess
    else:
        details["warnings"] = ["equality undetermined: theorem characterizes it only for |e_k| = 1"]
    return Certificate(
        theorem=ADDITIVE,
        checks=tuple(checks),
        lhs=total,
        rhs=float(rhs),
        slack=float(slack),
        scale=total,
        equality=equality,
        witness_residual=residual,
        details=details,
    )


def build_additive_equality(family: OrthoFamily, norms) -> list[ModuleVector]:
    """Vectors achieving additive equality with minimal extracted M:
    x_j = (t_j / sqrt(m)) sum_k e_k, so ||x_j|| = t_j."""
    if not _numerically_strict(family):
        raise CapabilityError("additive equality construction needs <e_k, e_k> = 1")
    norms = [float(t) for t in norms]
    if any(t <= 0.0 for t in norms):
        raise InputError("norms must be positive")
    direction = vector_sum(family.members)
    root_m = float(np.sqrt(len(family)))
    return [direction * (t / root_m) for t in norms]
