"""Exception hierarchy shared by the library, the CLI and the HTTP router.

Every class carries the CLI exit code and the HTTP status it maps to.
Disagreement errors keep both sides of the comparison as attributes.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class FewWeightError(Exception):
    exit_code: int = 1
    status_code: int = 500
    detail: str = "internal_error"


# ── Usage errors (exit 2) ───────────────────────────────────────────


class ParameterError(FewWeightError, ValueError):
    exit_code = 2
    status_code = 400
    detail = "invalid_parameters"


class NotPrime(ParameterError):
    detail = "not_prime"


class EqualPrimes(ParameterError):
    detail = "equal_primes"


class EvenInput(ParameterError):
    detail = "even_input"


class NotPrimitiveRoot(ParameterError):
    detail = "not_primitive_root"


class ZeroElement(ParameterError):
    detail = "zero_element"


class MixedPrime(ParameterError):
    detail = "mixed_prime"


class BadAutomorphism(ParameterError):
    detail = "bad_automorphism"


class NonPrimeFieldA(ParameterError):
    detail = "non_prime_field_coefficient"


class InvalidCandidate(ParameterError):
    detail = "invalid_candidate"


class InvalidSpec(ParameterError):
    detail = "invalid_code_spec"


# ── Infeasible sizes (exit 3) ───────────────────────────────────────


class CapacityError(FewWeightError):
    exit_code = 3
    status_code = 413
    detail = "capacity_exceeded"


class FieldSizeOverflow(CapacityError):
    detail = "field_size_overflow"


class CeilingExceeded(CapacityError):
    detail = "ceiling_exceeded"


# ── Findings (exit 1) ───────────────────────────────────────────────


class FindingError(FewWeightError):
    """A computed disagreement; carries the authoritative and the rival value."""

    exit_code = 1
    status_code = 409
    detail = "finding"

    def __init__(
        self,
        message: str,
        *,
        expected: Any = None,
        observed: Any = None,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.expected = expected
        self.observed = observed
        self.context = dict(context or {})
        parts = [message]
        if expected is not None or observed is not None:
            parts.append(f"expected={expected!r} observed={observed!r}")
        if self.context:
            parts.append(f"context={self.context!r}")
        super().__init__(" | ".join(parts))


class InternalInconsistency(FindingError):
    detail = "internal_inconsistency"


class SizeMismatch(FindingError):
    detail = "size_mismatch"


class MethodDisagreement(FindingError):
    detail = "method_disagreement"


class VerificationFailed(FindingError):
    detail = "verification_failed"


class CountMismatch(FindingError):
    detail = "count_mismatch"


class NonIntegerEntry(FindingError):
    detail = "non_integer_entry"


class DegenerateCode(FindingError):
    detail = "degenerate_code"


class NotBent(FindingError):
    detail = "not_bent"


class NotWeaklyRegular(FindingError):
    detail = "not_weakly_regular"


class DualNotQuadratic(FindingError):
    detail = "dual_not_quadratic"


class NotHomogeneous(FindingError):
    detail = "not_homogeneous"
