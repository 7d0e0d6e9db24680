"""Exact arithmetic in Z[ζ_p] over the integral basis ζ⁰, ζ¹, …, ζ^{p−2}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

from app.errors import BadAutomorphism, MixedPrime, NonIntegerEntry, ParameterError
from app.field import quad_char

_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


@dataclass(frozen=True)
class CycInt:
    p: int
    coeffs: tuple

    # ── constructors ──

    @classmethod
    def from_int(cls, p: int, n: int) -> CycInt:
        return cls(p, (int(n),) + (0,) * (p - 2))

    @classmethod
    def zero(cls, p: int) -> CycInt:
        return cls.from_int(p, 0)

    @classmethod
    def from_counts(cls, p: int, counts: Sequence[int]) -> CycInt:
        """Reduce Σ counts[j]·ζ^j (length p) using ζ^{p−1} = −(ζ⁰ + … + ζ^{p−2})."""
        if len(counts) != p:
            raise ParameterError(f"expected {p} exponent counts, got {len(counts)}")
        top = int(counts[p - 1])
        return cls(p, tuple(int(c) - top for c in counts[: p - 1]))

    # ── views ──

    def full(self) -> List[int]:
        """Length-p coefficient list with a zero ζ^{p−1} slot."""
        return list(self.coeffs) + [0]

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def as_integer(self) -> int:
        if not self.is_integer():
            raise NonIntegerEntry("cyclotomic value is not a rational integer", observed=self.to_json())
        return self.coeffs[0]

    def root_exponent(self) -> Optional[int]:
        """j when self == ζ^j, otherwise None."""
        for j in range(self.p):
            if self == cyc_from_root(self.p, j):
                return j
        return None

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    # ── ring operations ──

    def _coerce(self, other: Union[int, CycInt]) -> CycInt:
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise MixedPrime(f"cannot combine Z[ζ_{self.p}] with Z[ζ_{other.p}]")
            return other
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other: Union[int, CycInt]) -> CycInt:
        o = self._coerce(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __radd__(self, other: int) -> CycInt:
        return self + other

    def __neg__(self) -> CycInt:
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other: Union[int, CycInt]) -> CycInt:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> CycInt:
        return (-self) + other

    def __mul__(self, other: Union[int, CycInt]) -> CycInt:
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        o = self._coerce(other)
        p = self.p
        prod = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[(i + j) % p] += a * b
        return CycInt.from_counts(p, prod)

    def __rmul__(self, other: int) -> CycInt:
        return self * other

    def __pow__(self, n: int) -> CycInt:
        if n < 0:
            raise ValueError("negative powers are not defined in Z[ζ_p]")
        out = CycInt.from_int(self.p, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def exact_div(self, n: int) -> Optional[CycInt]:
        """self / n when n divides every coordinate, otherwise None."""
        if n == 0 or any(a % n for a in self.coeffs):
            return None
        return CycInt(self.p, tuple(a // n for a in self.coeffs))

    def conj(self) -> CycInt:
        return apply_automorphism(self, self.p - 1)

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                body = str(abs(c))
            else:
                mono = "ζ" if j == 1 else "ζ" + str(j).translate(_SUPERSCRIPT)
                body = mono if abs(c) == 1 else f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        head_sign, head = terms[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


# ── Operations ───────────────────────────────────────────────────────

def cyc_from_root(p: int, j: int) -> CycInt:
    counts = [0] * p
    counts[j % p] = 1
    return CycInt.from_counts(p, counts)


def cyc_arith(a: CycInt, b: Union[int, CycInt], op: str) -> CycInt:
    """op ∈ {add, sub, mul, scale}; scale takes an integer b."""
    if op == "scale":
        if not isinstance(b, int):
            raise ParameterError("scale expects an integer factor")
        return a * b
    if isinstance(b, CycInt) and b.p != a.p:
        raise MixedPrime(f"cannot combine Z[ζ_{a.p}] with Z[ζ_{b.p}]")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ParameterError(f"unknown operation {op!r}")


def apply_automorphism(a: CycInt, z: int) -> CycInt:
    """σ_z: ζ ↦ ζ^z."""
    p = a.p
    if z % p == 0:
        raise BadAutomorphism(f"σ_{z} is not an automorphism of Q(ζ_{p})")
    counts = [0] * p
    for i, c in enumerate(a.full()):
        counts[(z * i) % p] += c
    return CycInt.from_counts(p, counts)


def quadratic_gauss_sum(p: int) -> CycInt:
    """Σ_{c∈F_p*} η₁(c) ζ^c, the fixed square root of p*."""
    counts = [0] * p
    for c in range(1, p):
        counts[c] = quad_char(p, c)
    return CycInt.from_counts(p, counts)


def gauss_sum_closed(p: int, m: int) -> CycInt:
    """G(η_m, χ_m) = (−1)^{m−1} √(p*)^m."""
    sign = -1 if (m - 1) % 2 else 1
    return quadratic_gauss_sum(p) ** m * sign
