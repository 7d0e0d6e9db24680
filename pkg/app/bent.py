"""
Walsh analysis of p-ary functions f: F_q → F_p from the trace-monomial catalog.

  Stage 0 – candidate families and their value tables
  Stage 1 – Walsh transform W_f(λ) = Σ_x ζ^{f(x) − Tr(λx)} (single λ or full spectrum)
  Stage 2 – profile extraction: bentness, sign ε_f, dual f*, l_f = 2, k_f
  Stage 3 – level counts of the dual against their closed form
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional

import numpy as np

from app.config import settings
from app.cyclotomic import CycInt
from app.errors import (
    CountMismatch,
    DualNotQuadratic,
    InvalidCandidate,
    NotBent,
    NotHomogeneous,
    NotWeaklyRegular,
)
from app.field import FieldParams, FieldTable, quad_char

logger = logging.getLogger(__name__)

# ── Constants ─────────────────────────────────────────────────────────
WALSH_CHUNK = 32   # λ values per worker task


# ── Data classes ──────────────────────────────────────────────────────

class BentFamily(str, enum.Enum):
    SQUARE = "square"              # Tr(x²)
    ALPHA_KASAMI = "alpha-kasami"  # Tr(α x^{pⁱ+1})
    KASAMI = "kasami"              # Tr(x^{pⁱ+1})
    COULTER = "coulter"            # Tr(x^{(3ⁱ+1)/2}), p = 3


@dataclass(frozen=True)
class BentCandidate:
    family: BentFamily
    i: Optional[int]
    tbl: FieldTable

    def __post_init__(self) -> None:
        if self.family is BentFamily.SQUARE:
            return
        if self.i is None or self.i < 0:
            raise InvalidCandidate(f"family {self.family.value} needs an exponent i ≥ 0")
        if self.family is BentFamily.COULTER and self.tbl.p != 3:
            raise InvalidCandidate(f"the coulter family needs p = 3, got p = {self.tbl.p}")

    @property
    def coefficient(self) -> int:
        return self.tbl.alpha if self.family is BentFamily.ALPHA_KASAMI else 1

    @property
    def exponent(self) -> int:
        p = self.tbl.p
        if self.family is BentFamily.SQUARE:
            return 2
        if self.family is BentFamily.COULTER:
            return (3**self.i + 1) // 2
        return p**self.i + 1

    @property
    def name(self) -> str:
        if self.family is BentFamily.SQUARE:
            return "Tr(x^2)"
        if self.family is BentFamily.ALPHA_KASAMI:
            return f"Tr(alpha*x^({self.tbl.p}^{self.i}+1))"
        if self.family is BentFamily.KASAMI:
            return f"Tr(x^({self.tbl.p}^{self.i}+1))"
        return f"Tr(x^((3^{self.i}+1)/2))"

    def values(self) -> np.ndarray:
        """f indexed by element code; f(0) = 0."""
        tbl = self.tbl
        n = tbl.q - 1
        powers = tbl.antilog[(np.arange(n, dtype=np.int64) * (self.exponent % n)) % n]
        out = np.zeros(tbl.q, dtype=np.int64)
        out[tbl.antilog] = tbl.trace_scaled(self.coefficient, powers)
        return out

    def to_dict(self) -> Dict[str, object]:
        return {"family": self.family.value, "i": self.i, "name": self.name}


@dataclass(frozen=True)
class BentProfile:
    candidate: BentCandidate
    epsilon: int
    dual: np.ndarray   # f* indexed by element code
    l_f: int
    k_f: int

    @property
    def params(self) -> FieldParams:
        return self.candidate.tbl.params

    def dual_of(self, gamma: int) -> int:
        return int(self.dual[gamma])

    def quadratic_class_counts(self) -> Dict[str, int]:
        """γ counts by f*(γ) = 0, η₁(f*(γ)) = +1 and η₁(f*(γ)) = −1."""
        p = self.params.p
        levels = np.bincount(self.dual, minlength=p)
        plus = sum(int(levels[v]) for v in range(1, p) if quad_char(p, v) == 1)
        minus = sum(int(levels[v]) for v in range(1, p) if quad_char(p, v) == -1)
        return {"zero": int(levels[0]), "plus": plus, "minus": minus}


def make_candidate(tbl: FieldTable, family: str, i: Optional[int] = None) -> BentCandidate:
    try:
        fam = BentFamily(family)
    except ValueError:
        known = ", ".join(f.value for f in BentFamily)
        raise InvalidCandidate(f"unknown bent family {family!r}; expected one of {known}") from None
    return BentCandidate(family=fam, i=i, tbl=tbl)


# ── Stage 1 – Walsh transform ────────────────────────────────────────

def _counts_to_cyc(p: int, counts: np.ndarray) -> CycInt:
    return CycInt.from_counts(p, [int(c) for c in counts])


def walsh_transform(cand: BentCandidate, lam: int) -> CycInt:
    tbl = cand.tbl
    codes = np.arange(tbl.q, dtype=np.int64)
    exps = (cand.values() - tbl.trace_scaled(lam, codes)) % tbl.p
    return _counts_to_cyc(tbl.p, np.bincount(exps, minlength=tbl.p))


def _walsh_chunk(f_nz: np.ndarray, tr_pow: np.ndarray, js: np.ndarray, p: int) -> np.ndarray:
    n = tr_pow.shape[0]
    idx = (np.arange(n, dtype=np.int64)[None, :] + js[:, None]) % n
    exps = (f_nz[None, :] - tr_pow[idx]) % p
    counts = np.stack([(exps == r).sum(axis=1) for r in range(p)], axis=1)
    counts[:, 0] += 1  # x = 0 contributes ζ^{f(0)} = 1
    return counts


def walsh_spectrum(cand: BentCandidate) -> List[CycInt]:
    """W_f(λ) for every λ, indexed by element code."""
    tbl = cand.tbl
    p, n = tbl.p, tbl.q - 1
    f = cand.values()
    f_nz = f[tbl.antilog]
    tr_pow = tbl.trace_of(tbl.antilog)

    chunks = [np.arange(s, min(s + WALSH_CHUNK, n), dtype=np.int64) for s in range(0, n, WALSH_CHUNK)]
    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        results = list(pool.map(lambda js: _walsh_chunk(f_nz, tr_pow, js, p), chunks))

    spectrum: List[Optional[CycInt]] = [None] * tbl.q
    spectrum[0] = _counts_to_cyc(p, np.bincount(f % p, minlength=p))
    for js, counts in zip(chunks, results):
        for j, row in zip(js, counts):
            spectrum[int(tbl.antilog[j])] = _counts_to_cyc(p, row)
    return spectrum  # type: ignore[return-value]


# ── Stage 2 – Profile extraction ─────────────────────────────────────

def _homogeneity_degree(tbl: FieldTable, f: np.ndarray) -> int:
    p = tbl.p
    codes = np.arange(tbl.q, dtype=np.int64)
    for k in range(2, p, 2):
        if gcd(k - 1, p - 1) != 1:
            continue
        if all(
            np.array_equal(f[tbl.scale(c, codes)], (pow(c, k, p) * f) % p)
            for c in range(2, p)
        ):
            return k
    raise NotHomogeneous("no even k_f with gcd(k_f − 1, p − 1) = 1 satisfies f(cx) = c^{k_f} f(x)")


def extract_profile(cand: BentCandidate, *, stated_epsilon: Optional[int] = None) -> BentProfile:
    tbl = cand.tbl
    params = tbl.params
    p, q = params.p, params.q
    base = params.sqrt_pstar_e

    spectrum = walsh_spectrum(cand)
    for lam, w in enumerate(spectrum):
        norm = w * w.conj()
        if norm != CycInt.from_int(p, q):
            raise NotBent(
                f"|W_f(λ)|² ≠ p^e for {cand.name}",
                expected=q,
                observed=norm.to_json(),
                context={"lambda": lam},
            )

    w0 = spectrum[0]
    if w0 == CycInt.from_int(p, base):
        epsilon = 1
    elif w0 == CycInt.from_int(p, -base):
        epsilon = -1
    else:
        raise NotWeaklyRegular(
            f"W_f(0) of {cand.name} is not ±√(p*)^e",
            expected=[base, -base],
            observed=w0.to_json(),
        )

    dual = np.zeros(q, dtype=np.int64)
    for lam, w in enumerate(spectrum):
        quotient = w.exact_div(epsilon * base)
        j = quotient.root_exponent() if quotient is not None else None
        if j is None:
            raise NotWeaklyRegular(
                f"W_f(λ) of {cand.name} is not ε_f·√(p*)^e·ζ^j",
                observed=w.to_json(),
                context={"lambda": lam, "epsilon": epsilon},
            )
        dual[lam] = j

    codes = np.arange(q, dtype=np.int64)
    for c in range(2, p):
        if not np.array_equal(dual[tbl.scale(c, codes)], (c * c * dual) % p):
            raise DualNotQuadratic(f"f*(cx) ≠ c² f*(x) for {cand.name}", context={"c": c})

    k_f = _homogeneity_degree(tbl, cand.values())
    dual.flags.writeable = False

    if stated_epsilon is not None and stated_epsilon != epsilon:
        logger.warning(
            "Empirical ε_f = %d for %s differs from the stated %d; the empirical sign is used",
            epsilon, cand.name, stated_epsilon,
        )
    logger.info("Verified %s on F_%d: ε_f=%d, k_f=%d", cand.name, q, epsilon, k_f)
    return BentProfile(candidate=cand, epsilon=epsilon, dual=dual, l_f=2, k_f=k_f)


# ── Stage 3 – Dual level counts ──────────────────────────────────────

def dual_level_counts_closed(params: FieldParams, epsilon: int) -> Dict[int, int]:
    p, e, base = params.p, params.e, params.sqrt_pstar_e
    zero = p ** (e - 1) + epsilon * (p - 1) * base // p
    other = p ** (e - 1) - epsilon * base // p
    counts = {0: zero}
    counts.update({lam: other for lam in range(1, p)})
    return counts


def dual_level_counts(profile: BentProfile) -> Dict[int, int]:
    p = profile.params.p
    levels = np.bincount(profile.dual, minlength=p)
    observed = {lam: int(levels[lam]) for lam in range(p)}
    expected = dual_level_counts_closed(profile.params, profile.epsilon)
    if observed != expected:
        raise CountMismatch(
            f"dual level sizes of {profile.candidate.name} differ from the closed form",
            expected=expected,
            observed=observed,
        )
    return observed
