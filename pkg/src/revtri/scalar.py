"""Scalar Hilbert-space oracle: the A = C backend on raw complex arrays.

Everything here is an independent reimplementation of the verifiers on plain
numpy vectors in C^m with the ordinary inner product sum(conj(x_i) y_i)
(conjugate-linear in the first slot, matching the module convention).  It
deliberately shares no code with the block-matrix backend so that the two
routes can be compared field-by-field in tests: for blocks = [1] they must
agree to 1e-12 on every certificate field.

Includes the classical one-reference-vector special case (k2 = 0) and the
additive reverse with the m-family averaging, i.e. the Hilbert-space theorems
the module statements generalize.
"""

from __future__ import annotations

import numpy as np

from .certificate import Certificate, Check
from .errors import HypothesisError, InputError

ORDER_TOL = 1e-9
EQ_SLACK_RTOL = 1e-9
EQ_WITNESS_RTOL = 1e-8


def s_inner(x: np.ndarray, y: np.ndarray) -> complex:
    return complex(np.vdot(x, y))


def s_norm(x: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(x, x).real))


def _margin_check(name: str, lhs: float, rhs: float, tol: float) -> Check:
    # scalar analogue of the Loewner comparison lhs <= rhs
    scale = max(1.0, abs(lhs), abs(rhs))
    margin = rhs - lhs
    return Check(name, bool(margin >= -tol * scale), float(margin))


def extract_scalar(e: np.ndarray, xs) -> tuple[float, float]:
    """Largest (k1, k2) with k_i ||x_j|| below Re/Im <e, x_j> for every j."""
    k1 = np.inf
    k2 = np.inf
    for j, x in enumerate(xs):
        nx = s_norm(x)
        if nx == 0.0:
            raise InputError(f"vector {j} is zero; constants are undefined")
        z = s_inner(e, x)
        k1 = min(k1, z.real / nx)
        k2 = min(k2, z.imag / nx)
    return max(0.0, float(k1)), max(0.0, float(k2))


def verify_mult_scalar(
    e: np.ndarray, xs, k1: float, k2: float, tol: float = ORDER_TOL
) -> Certificate:
    checks = [_margin_check("e-contraction", s_norm(e) ** 2, 1.0, tol)]
    norms = [s_norm(x) for x in xs]
    for j, x in enumerate(xs):
        z = s_inner(e, x)
        checks.append(_margin_check(f"re-bound[{j}]", k1 * norms[j], z.real, tol))
        checks.append(_margin_check(f"im-bound[{j}]", k2 * norms[j], z.imag, tol))
    total = float(sum(norms))
    lhs = float(np.sqrt(k1 * k1 + k2 * k2)) * total
    rhs = s_norm(np.sum(xs, axis=0))
    slack = rhs - lhs
    rel = slack / total if total > 0.0 else 0.0
    return Certificate(
        theorem="mult-scalar",
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=total,
        equality=bool(abs(rel) <= EQ_SLACK_RTOL),
        details={"backend": "scalar-oracle"},
    )


def diaz_metcalf(e: np.ndarray, xs, r: float, tol: float = ORDER_TOL) -> Certificate:
    """One-reference-vector reverse triangle inequality: the k2 = 0 case."""
    cert = verify_mult_scalar(e, xs, r, 0.0, tol)
    cert.details["variant"] = "diaz-metcalf"
    return cert


def extract_family(family, xs) -> tuple[list[float], list[float]]:
    r = []
    rho = []
    for e in family:
        k1 = np.inf
        k2 = np.inf
        for j, x in enumerate(xs):
            nx = s_norm(x)
            if nx == 0.0:
                raise InputError(f"vector {j} is zero; constants are undefined")
            z = s_inner(e, x)
            k1 = min(k1, z.real / nx)
            k2 = min(k2, z.imag / nx)
        r.append(max(0.0, float(k1)))
        rho.append(max(0.0, float(k2)))
    return r, rho


def verify_family_norm(family, xs, r, rho, tol: float = ORDER_TOL) -> Certificate:
    """Orthogonal-family reverse inequality with the equality witness
    sum_j x_j = (sum_j ||x_j||) sum_k (r_k + i rho_k) e_k."""
    m = len(family)
    if len(r) != m or len(rho) != m:
        raise InputError("bounds length does not match family size")
    checks = []
    norms = [s_norm(x) for x in xs]
    for k, e in enumerate(family):
        for j, x in enumerate(xs):
            z = s_inner(e, x)
            checks.append(
                _margin_check(f"re-bound[{k},{j}]", r[k] ** 2 * norms[j], r[k] * z.real, tol)
            )
            checks.append(
                _margin_check(f"im-bound[{k},{j}]", rho[k] ** 2 * norms[j], rho[k] * z.imag, tol)
            )
    total = float(sum(norms))
    coeff = float(np.sqrt(sum(a * a + b * b for a, b in zip(r, rho))))
    lhs = coeff * total
    rhs = s_norm(np.sum(xs, axis=0))
    slack = rhs - lhs
    rel = slack / total if total > 0.0 else 0.0
    direction = np.sum([(rk + 1j * pk) * e for rk, pk, e in zip(r, rho, family)], axis=0)
    residual = s_norm(np.sum(xs, axis=0) - total * direction)
    wit_rel = residual / total if total > 0.0 else 0.0
    return Certificate(
        theorem="family-norm",
        checks=tuple(checks),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        scale=total,
        equality=bool(abs(rel) <= EQ_SLACK_RTOL and wit_rel <= EQ_WITNESS_RTOL),
        witness_residual=residual,
        details={"backend": "scalar-oracle"},
    )


def extract_additive(family, xs) -> np.ndarray:
    M = np.zeros((len(xs), len(family)))
    for j, x in enumerate(xs):
        nx = s_norm(x)
        for k, e in enumerate(family):
            M[j, k] = max(0.0, nx - s_inner(e, x).real)
    return M


def verify_additive(family, xs, M: np.ndarray, tol: float = ORDER_TOL) -> Certificate:
    """Additive reverse (orthonormal averaging): the Hilbert-space theorem
    with equality iff the defect-adjusted sum lands on sum_k e_k."""
    m = len(family)
    M = np.asarray(M, dtype=float)
    if M.shape != (len(xs), m):
        raise InputError(f"M must be {len(xs)}x{m}, got {M.shape}")
    if np.any(M < 0.0):
        raise InputError("additive bounds must be nonnegative")
    checks = []
    norms = [s_norm(x) for x in xs]
    for k, e in enumerate(family):
        checks.append(_margin_check(f"e-contraction[{k}]", s_norm(e) ** 2, 1.0, tol))
        for j, x in enumerate(xs):
            gap = norms[j] - s_inner(e, x).real
            checks.append(_margin_check(f"defect-bound[{j},{k}]", gap, M[j, k], tol))
    total = float(sum(norms))
    mean_defect = float(M.sum()) / m
    rhs = s_norm(np.sum(xs, axis=0)) / np.sqrt(m) + mean_defect
    slack = rhs - total
    rel = slack / total if total > 0.0 else 0.0
    excess = total - mean_defect
    residual = s_norm(np.sum(xs, axis=0) - excess * np.sum(family, axis=0))
    wit_rel = residual / total if total > 0.0 else 0.0
    equality = bool(
        abs(rel) <= EQ_SLACK_RTOL
        and excess >= -EQ_SLACK_RTOL * max(1.0, total)
        and wit_rel <= EQ_WITNESS_RTOL
    )
    return Certificate(
        theorem="additive",
        checks=tuple(checks),
        lhs=total,
        rhs=float(rhs),
        slack=float(slack),
        scale=total,
        equality=equality,
        witness_residual=float(residual),
        details={"backend": "scalar-oracle"},
    )
