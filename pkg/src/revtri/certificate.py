"""Machine-readable verification certificates.

A Certificate records everything a verifier established about one instance:
which hypotheses were checked (and their signed margins), both sides of the
inequality, the slack, an equality flag, and any equality-witness residual.
Verifiers never raise on a failed hypothesis; they return a certificate with
``preconditions_ok`` False so the caller (tests, fuzzer, CLI) can decide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    """One hypothesis check: name, outcome, and its signed margin.

    For an operator hypothesis lhs <= rhs the margin is lambda_min(rhs - lhs);
    for a scalar hypothesis it is rhs - lhs.  Negative beyond tolerance means
    the hypothesis failed.
    """

    name: str
    ok: bool
    margin: float


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of verifying one inequality on one instance.

    ``lhs``/``rhs`` are floats for scalar conclusions and algebra Elements for
    Loewner-order conclusions; ``slack`` is rhs - lhs respectively
    lambda_min(rhs - lhs).  ``scale`` is the instance's natural homogeneity
    scale (sum of vector norms, squared where the conclusion is quadratic),
    so ``relative_slack`` is invariant under scaling every vector by t > 0.
    """

    theorem: str
    checks: tuple[Check, ...]
    lhs: Any
    rhs: Any
    slack: float
    scale: float
    equality: bool
    witness_residual: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def preconditions_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def relative_slack(self) -> float:
        if self.scale == 0.0:
            return 0.0
        return self.slack / self.scale

    def violated(self, tol: float = 1e-9) -> bool:
        """True when the hypotheses held yet the conclusion failed: on a
        correct build of a proven theorem this never happens."""
        return self.preconditions_ok and self.relative_slack < -tol
