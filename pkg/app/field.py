"""
Finite-field layer: parameter validation and F_{p^e} lookup tables.

Elements of F_q are integer *codes*: the polynomial c_0 + c_1 x + … + c_{e-1} x^{e-1}
over F_p is stored as c_0 + c_1 p + … + c_{e-1} p^{e-1}.  Zero is code 0, the
prime field F_p is codes 0..p-1, and the primitive element α (the class of x)
is code p.

  Stage 0 – parameter validation (primality, order of p mod 2ℓᵏ, ceilings)
  Stage 1 – primitive polynomial search (smallest integer code first)
  Stage 2 – antilog / log tables, digit matrix, trace table
  Stage 3 – vectorized element arithmetic used by every other module
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_pow_mod

from app.config import settings
from app.errors import (
    CeilingExceeded,
    EqualPrimes,
    EvenInput,
    FieldSizeOverflow,
    InternalInconsistency,
    NotPrime,
    NotPrimitiveRoot,
    ParameterError,
    ZeroElement,
)

logger = logging.getLogger(__name__)


# ── Data classes ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class FieldParams:
    """Validated (p, ℓ, k) with the derived e = φ(ℓᵏ), q = pᵉ, N = (q−1)/(2ℓᵏ)."""
    p: int
    ell: int
    k: int
    e: int
    q: int
    exp_N: int

    @property
    def lk(self) -> int:
        return self.ell ** self.k

    @property
    def lk1(self) -> int:
        return self.ell ** (self.k - 1)

    @property
    def two_lk(self) -> int:
        return 2 * self.lk

    @property
    def sqrt_q(self) -> int:
        return self.p ** (self.e // 2)

    @property
    def peak_shift(self) -> int:
        """Offset of the exceptional Gaussian period of order 2ℓᵏ.

        0 when (√q+1)/(2ℓᵏ) is even, ℓᵏ when it is odd; in the odd case
        S(a, b) carries ζ^{−a·Tr(ξ^{i_b})} instead of ζ^{a·Tr(ξ^{i_b})}.
        """
        return self.lk if ((self.sqrt_q + 1) // self.two_lk) % 2 else 0

    @property
    def p_star(self) -> int:
        return self.p if self.p % 4 == 1 else -self.p

    @property
    def sqrt_pstar_e(self) -> int:
        """√(p*)ᵉ, an integer because e is even."""
        return self.p_star ** (self.e // 2)

    @property
    def t1(self) -> int:
        return self.e % self.p

    @property
    def t2(self) -> int:
        return self.lk1 % self.p

    @property
    def ell_is_one_mod_p(self) -> bool:
        return self.ell % self.p == 1

    def to_dict(self) -> Dict[str, int]:
        return {
            "p": self.p,
            "ell": self.ell,
            "k": self.k,
            "e": self.e,
            "q": self.q,
            "exp_N": self.exp_N,
        }


@dataclass(frozen=True)
class FieldTable:
    params: FieldParams
    modulus: Tuple[int, ...]   # monic, highest degree first
    antilog: np.ndarray        # index i -> code of α^i, length q-1
    log: np.ndarray            # code -> index, log[0] = -1
    digits: np.ndarray         # code -> coefficient vector (lowest first)
    tr: np.ndarray             # code -> Tr(x) in 0..p-1
    place: np.ndarray = field(repr=False)  # p^j, for digits -> code

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def alpha(self) -> int:
        return int(self.antilog[1])

    @property
    def xi(self) -> int:
        return int(self.antilog[self.params.exp_N % (self.q - 1)])

    # ── element arithmetic (scalars or arrays of codes) ──

    def power(self, i: int) -> int:
        """Code of α^i."""
        return int(self.antilog[i % (self.q - 1)])

    def log_of(self, x: int) -> int:
        if x == 0:
            raise ZeroElement("the zero element has no discrete logarithm")
        return int(self.log[x])

    def mul(self, a: Any, b: Any) -> Any:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)]
        out = np.where((a == 0) | (b == 0), 0, prod)
        return int(out) if out.ndim == 0 else out

    def add(self, a: Any, b: Any) -> Any:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = ((self.digits[a] + self.digits[b]) % self.p) @ self.place
        return int(out) if np.ndim(out) == 0 else out

    def neg(self, a: Any) -> Any:
        a = np.asarray(a, dtype=np.int64)
        out = ((-self.digits[a]) % self.p) @ self.place
        return int(out) if np.ndim(out) == 0 else out

    def pow_elements(self, xs: Any, n: int) -> Any:
        """x^n elementwise; 0^n = 0 for n > 0 and 0^0 = 1."""
        xs = np.asarray(xs, dtype=np.int64)
        if n == 0:
            out = np.ones_like(xs)
        else:
            out = np.where(xs == 0, 0, self.antilog[(self.log[xs] * n) % (self.q - 1)])
        return int(out) if out.ndim == 0 else out

    def scale(self, c: int, xs: np.ndarray) -> np.ndarray:
        return self.mul(np.full_like(xs, c), xs)

    def trace_of(self, xs: Any) -> Any:
        out = self.tr[np.asarray(xs, dtype=np.int64)]
        return int(out) if np.ndim(out) == 0 else out

    def trace_scaled(self, c: int, xs: np.ndarray) -> np.ndarray:
        """Tr(c·x) over an array of codes."""
        if c == 0:
            return np.zeros(np.shape(xs), dtype=np.int64)
        xs = np.asarray(xs, dtype=np.int64)
        shifted = self.antilog[(self.log[xs] + self.log[c]) % (self.q - 1)]
        return np.where(xs == 0, 0, self.tr[shifted])

    def nonzero_elements(self) -> np.ndarray:
        return self.antilog

    def ordered_elements(self) -> np.ndarray:
        """Zero first, then α⁰, α¹, …, α^{q-2}."""
        return np.concatenate([np.zeros(1, dtype=np.int64), self.antilog])


# ── Stage 0 – Parameter validation ───────────────────────────────────

def _multiplicative_order(p: int, m: int, phi: int) -> int:
    for d in sympy.divisors(phi):
        if pow(p, d, m) == 1:
            return d
    return 0


def _field_exponent(p: int, ell: int, k: int, limit: int) -> int:
    """e = (ℓ−1)ℓᵏ⁻¹, refused as soon as pᵉ would pass the ceiling."""
    max_e = 0
    power = p
    while power <= limit:
        max_e += 1
        power *= p
    e = ell - 1
    for _ in range(k - 1):
        if e > max_e:
            break
        e *= ell
    if e > max_e:
        raise FieldSizeOverflow(f"q = {p}^φ({ell}^{k}) exceeds the field size ceiling {limit}")
    return e


def validate_params(p: int, ell: int, k: int, *, ceiling: Optional[int] = None) -> FieldParams:
    for name, value in (("p", p), ("ell", ell), ("k", k)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    for name, value in (("p", p), ("ell", ell)):
        if value % 2 == 0:
            raise EvenInput(f"{name} = {value} is even")
        if not sympy.isprime(value):
            raise NotPrime(f"{name} = {value} is not prime")
    if p == ell:
        raise EqualPrimes(f"p and ell must differ, both are {p}")

    limit = settings.field_size_ceiling if ceiling is None else ceiling
    e = _field_exponent(p, ell, k, limit)
    modulus = 2 * ell**k
    order = _multiplicative_order(p, modulus, e)
    if order != e:
        raise NotPrimitiveRoot(f"ord_{modulus}({p}) = {order}, expected φ({ell}^{k}) = {e}")

    q = p**e
    return FieldParams(p=p, ell=ell, k=k, e=e, q=q, exp_N=(q - 1) // modulus)


# ── Stage 1 – Primitive polynomial search ────────────────────────────

def _modulus_from_code(code: int, p: int, e: int) -> list:
    low = [(code // p**j) % p for j in range(e)]
    return [ZZ(1)] + [ZZ(c) for c in reversed(low)]


def _is_primitive(poly: list, p: int, q: int, prime_factors: list) -> bool:
    if poly[-1] == 0:
        return False
    x = [ZZ(1), ZZ(0)]
    one = [ZZ(1)]
    if gf_pow_mod(x, q - 1, poly, p, ZZ) != one:
        return False
    return all(gf_pow_mod(x, (q - 1) // r, poly, p, ZZ) != one for r in prime_factors)


def find_primitive_polynomial(p: int, e: int) -> Tuple[int, ...]:
    q = p**e
    factors = sympy.primefactors(q - 1)
    for code in range(1, q):
        poly = _modulus_from_code(code, p, e)
        if _is_primitive(poly, p, q, factors):
            return tuple(int(c) for c in poly)
    raise InternalInconsistency(f"no primitive polynomial of degree {e} over F_{p}")


# ── Stage 2 – Tables ─────────────────────────────────────────────────

def _antilog_table(modulus: Tuple[int, ...], p: int, e: int) -> np.ndarray:
    q = p**e
    # x^e = -(m_{e-1} x^{e-1} + … + m_0)
    low = list(reversed(modulus[1:]))
    reduction = [(-c) % p for c in low]
    place = [p**j for j in range(e)]

    antilog = np.empty(q - 1, dtype=np.int64)
    coeffs = [1] + [0] * (e - 1)
    for i in range(q - 1):
        antilog[i] = sum(c * w for c, w in zip(coeffs, place))
        top = coeffs[-1]
        coeffs = [0] + coeffs[:-1]
        if top:
            coeffs = [(c + top * r) % p for c, r in zip(coeffs, reduction)]
    return antilog


def build_field(params: FieldParams, *, ceiling: Optional[int] = None) -> FieldTable:
    p, e, q = params.p, params.e, params.q
    limit = settings.field_size_ceiling if ceiling is None else ceiling
    if q > limit:
        raise FieldSizeOverflow(f"q = {q} exceeds the table size ceiling {limit}")

    modulus = find_primitive_polynomial(p, e)
    antilog = _antilog_table(modulus, p, e)

    log = np.full(q, -1, dtype=np.int64)
    log[antilog] = np.arange(q - 1, dtype=np.int64)
    if (log[1:] < 0).any():
        raise InternalInconsistency("antilog table does not cover F_q*", context=params.to_dict())

    codes = np.arange(q, dtype=np.int64)
    place = p ** np.arange(e, dtype=np.int64)
    digits = (codes[:, None] // place[None, :]) % p

    # Tr(α^j) for the polynomial basis, via the Frobenius orbit α^{j p^i}.
    tr_basis = np.zeros(e, dtype=np.int64)
    for j in range(e):
        orbit = antilog[[(j * pow(p, i, q - 1)) % (q - 1) for i in range(e)]]
        total = digits[orbit].sum(axis=0) % p
        if total[1:].any():
            raise InternalInconsistency(f"trace of α^{j} is not in F_p", context={"digits": total.tolist()})
        tr_basis[j] = total[0]
    tr = (digits @ tr_basis) % p

    for arr in (antilog, log, digits, tr, place):
        arr.flags.writeable = False

    tbl = FieldTable(
        params=params,
        modulus=modulus,
        antilog=antilog,
        log=log,
        digits=digits,
        tr=tr,
        place=place,
    )

    if int(tr[1]) != e % p:
        raise InternalInconsistency("Tr(1) != e mod p", expected=e % p, observed=int(tr[1]))
    xi_order = (q - 1) // int(np.gcd(params.exp_N, q - 1))
    if xi_order != params.two_lk:
        raise InternalInconsistency("ξ has the wrong order", expected=params.two_lk, observed=xi_order)

    logger.info("Built F_%d^%d (q=%d) with modulus %s", p, e, q, modulus)
    return tbl


# ── Stage 3 – Scalar helpers ─────────────────────────────────────────

def trace(tbl: FieldTable, x: int) -> int:
    return int(tbl.tr[x])


def residue_class(tbl: FieldTable, b: int) -> int:
    """i_b = −Ind_α(b) mod 2ℓᵏ, so that b^{−N} = ξ^{i_b}."""
    if b == 0:
        raise ZeroElement("residue class of zero is undefined")
    return (-int(tbl.log[b])) % tbl.params.two_lk


def quad_char(p: int, z: int) -> int:
    z %= p
    if z == 0:
        return 0
    return int(sympy.legendre_symbol(z, p))


def quad_char_ext(tbl: FieldTable, x: int) -> int:
    """η_e on F_q: +1 on even powers of α, −1 on odd powers, 0 at zero."""
    if x == 0:
        return 0
    return 1 if int(tbl.log[x]) % 2 == 0 else -1


def prime_field_element(tbl: FieldTable, z: int) -> int:
    return z % tbl.p


def require_pairs_within(q: int, ceiling: Optional[int] = None) -> None:
    limit = settings.pair_ceiling if ceiling is None else ceiling
    if q * q > limit:
        raise CeilingExceeded(f"q² = {q * q} exceeds the pair ceiling {limit}")
