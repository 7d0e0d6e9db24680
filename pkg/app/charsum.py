"""
Exponential sums over F_q with q = pᵉ, N = (q−1)/(2ℓᵏ).

  Stage 1 – partition of {0, …, 2ℓᵏ−1} and the trace table of ξ^i
  Stage 2 – Weil sums S(a, b) = Σ_{x≠0} χ(a x^N + b x) and the period S(a)
  Stage 3 – congruence classes of u against ±t₁, ±t₂
  Stage 4 – w(u, b) = Σ_{z∈F_p*} ζ^{−uz} S(z, b)
  Stage 5 – Gauss sums, quadratic-polynomial sums, η₁-weighted Weil sums

Every closed form has a brute-force twin; brute force is authoritative.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from app.cyclotomic import CycInt, cyc_from_root, gauss_sum_closed
from app.errors import (
    InternalInconsistency,
    MethodDisagreement,
    NonPrimeFieldA,
    ParameterError,
    ZeroElement,
)
from app.field import FieldParams, FieldTable, quad_char, quad_char_ext, residue_class

logger = logging.getLogger(__name__)


# ── Data classes ──────────────────────────────────────────────────────

class Label(str, enum.Enum):
    ZERO = "Zero"
    P1_1 = "P1_1"
    P1_2 = "P1_2"
    P1_3 = "P1_3"
    P2 = "P2"
    ELL_K = "EllK"
    P3_1 = "P3_1"
    P3_2 = "P3_2"
    P3_3 = "P3_3"
    P4 = "P4"


PLUS_T2: FrozenSet[Label] = frozenset({Label.P1_2, Label.P3_2})
MINUS_T2: FrozenSet[Label] = frozenset({Label.P1_3, Label.P3_3})


class CongruenceCase(str, enum.Enum):
    ZERO_U = "ZeroU"
    GENERIC = "Generic"
    PHI_ONLY_PLUS = "PhiOnly_plus"
    PHI_ONLY_MINUS = "PhiOnly_minus"
    ELL_ONLY_PLUS = "EllOnly_plus"
    ELL_ONLY_MINUS = "EllOnly_minus"
    BOTH_PLUS = "Both_plus"
    BOTH_MINUS = "Both_minus"

    @property
    def family(self) -> str:
        return self.value.split("_")[0]

    @property
    def sign(self) -> int:
        if self.value.endswith("_plus"):
            return 1
        if self.value.endswith("_minus"):
            return -1
        return 0


@dataclass(frozen=True)
class PartitionTables:
    params: FieldParams
    table: FieldTable
    class_of: Tuple[Label, ...]
    trace_of_xi: Tuple[int, ...]

    def peak_index(self, b: int) -> int:
        """i_b moved onto the exceptional Gaussian period; Tr(ξ^{peak}) = ±Tr(ξ^{i_b})."""
        params = self.params
        return (residue_class(self.table, b) + params.peak_shift) % params.two_lk

    def peak_label_of(self, b: int) -> Label:
        """The label every per-b closed form is keyed on."""
        return self.class_of[self.peak_index(b)]

    def class_sizes(self) -> Dict[Label, int]:
        sizes = {label: 0 for label in Label}
        for label in self.class_of:
            sizes[label] += 1
        return sizes


# ── Stage 1 – Partition and trace table ──────────────────────────────

def _label(params: FieldParams, i: int) -> Label:
    e, lk, lk1 = params.e, params.lk, params.lk1
    if i == 0:
        return Label.ZERO
    if i <= e:
        if i % lk1:
            return Label.P1_1
        return Label.P1_2 if i % 2 else Label.P1_3
    if i <= lk:
        return Label.ELL_K if i == lk else Label.P2
    if i <= 2 * lk - lk1:
        j = i - lk
        u = -(-j // lk1)
        v = u * lk1 - j
        if v > 0:
            return Label.P3_1
        return Label.P3_2 if u % 2 == 0 else Label.P3_3
    return Label.P4


def closed_trace_of_xi(params: FieldParams, label: Label) -> int:
    """Tr(ξ^i) mod p as a function of the label of i."""
    p, t1, t2 = params.p, params.t1, params.t2
    if label is Label.ZERO:
        return t1 % p
    if label is Label.ELL_K:
        return (-t1) % p
    if label in MINUS_T2:
        return (-t2) % p
    if label in PLUS_T2:
        return t2 % p
    return 0


def _xi_powers(tbl: FieldTable) -> np.ndarray:
    params = tbl.params
    idx = (np.arange(params.two_lk, dtype=np.int64) * params.exp_N) % (tbl.q - 1)
    return tbl.antilog[idx]


def build_partition(tbl: FieldTable) -> PartitionTables:
    params = tbl.params
    class_of = tuple(_label(params, i) for i in range(params.two_lk))
    direct = tuple(int(t) for t in tbl.trace_of(_xi_powers(tbl)))

    for i, (label, observed) in enumerate(zip(class_of, direct)):
        expected = closed_trace_of_xi(params, label)
        if observed != expected:
            raise InternalInconsistency(
                f"Tr(ξ^{i}) disagrees with its closed form",
                expected=expected,
                observed=observed,
                context={"i": i, "label": label.value},
            )

    half = (params.ell - 1) // 2
    counts = {label: class_of.count(label) for label in (Label.P1_2, Label.P1_3, Label.P3_2, Label.P3_3)}
    if any(c != half for c in counts.values()):
        raise InternalInconsistency(
            "sub-partition sizes differ from (ℓ−1)/2",
            expected=half,
            observed={k.value: v for k, v in counts.items()},
        )

    logger.debug("Partition labels: %s", [label.value for label in class_of])
    return PartitionTables(params=params, table=tbl, class_of=class_of, trace_of_xi=direct)


# ── Stage 2 – Weil sums ──────────────────────────────────────────────

def _histogram(p: int, exponents: np.ndarray) -> CycInt:
    counts = np.bincount(np.asarray(exponents, dtype=np.int64) % p, minlength=p)
    return CycInt.from_counts(p, [int(c) for c in counts])


def weil_sum_bruteforce(tbl: FieldTable, a: int, b: int) -> CycInt:
    xs = tbl.nonzero_elements()
    x_n = tbl.pow_elements(xs, tbl.params.exp_N)
    exps = tbl.trace_scaled(a, x_n) + tbl.trace_scaled(b, xs)
    return _histogram(tbl.p, exps)


def weil_sum_period(tbl: FieldTable, a: int) -> CycInt:
    return _histogram(tbl.p, tbl.trace_scaled(a, _xi_powers(tbl)))


def period_sum_closed(params: FieldParams, a: int) -> CycInt:
    """S_{2ℓᵏ}(a) for a ∈ F_p."""
    p, t1, t2 = params.p, params.t1, params.t2
    const = params.two_lk - 2 * params.ell
    return (
        cyc_from_root(p, t1 * a)
        + cyc_from_root(p, -t1 * a)
        + (cyc_from_root(p, t2 * a) + cyc_from_root(p, -t2 * a)) * (params.ell - 1)
        + const
    )


def _require_prime_field(params: FieldParams, a: int) -> int:
    if not 0 <= a < params.p:
        raise NonPrimeFieldA(f"closed forms need a ∈ F_p (codes 0..{params.p - 1}), got {a}")
    return a


def weil_sum_closed(tbl: FieldTable, part: PartitionTables, a: int, b: int) -> CycInt:
    params = tbl.params
    a = _require_prime_field(params, a)
    s_a = period_sum_closed(params, a)
    if b == 0:
        return s_a * params.exp_N
    peak = part.peak_index(b)
    factor = (params.sqrt_q + 1) // params.two_lk
    return cyc_from_root(params.p, a * part.trace_of_xi[peak]) * params.sqrt_q - s_a * factor


# ── Stage 3 – Congruence classes of u ────────────────────────────────

def classify_u(params: FieldParams, u: int) -> CongruenceCase:
    p, t1, t2 = params.p, params.t1, params.t2
    u %= p
    if u == 0:
        return CongruenceCase.ZERO_U
    phi = (u * u - t1 * t1) % p == 0
    ell = (u * u - t2 * t2) % p == 0
    if phi and ell:
        phi_sign = 1 if u == t1 else -1
        ell_sign = 1 if u == t2 else -1
        if phi_sign != ell_sign:
            raise InternalInconsistency(
                "u matches ±t₁ and ±t₂ with opposite signs",
                context={"u": u, "t1": t1, "t2": t2},
            )
        return CongruenceCase.BOTH_PLUS if phi_sign > 0 else CongruenceCase.BOTH_MINUS
    if phi:
        return CongruenceCase.PHI_ONLY_PLUS if u == t1 else CongruenceCase.PHI_ONLY_MINUS
    if ell:
        return CongruenceCase.ELL_ONLY_PLUS if u == t2 else CongruenceCase.ELL_ONLY_MINUS
    return CongruenceCase.GENERIC


def special_labels(params: FieldParams, case: CongruenceCase) -> FrozenSet[Label]:
    """Labels of i_b where Tr(ξ^{i_b}) ≡ u for a nonzero u of the given case."""
    table = {
        CongruenceCase.PHI_ONLY_PLUS: {Label.ZERO},
        CongruenceCase.PHI_ONLY_MINUS: {Label.ELL_K},
        CongruenceCase.BOTH_PLUS: {Label.ZERO} | PLUS_T2,
        CongruenceCase.BOTH_MINUS: {Label.ELL_K} | MINUS_T2,
        CongruenceCase.ELL_ONLY_PLUS: set(PLUS_T2),
        CongruenceCase.ELL_ONLY_MINUS: set(MINUS_T2),
    }
    return frozenset(table.get(case, set()))


def case_fraction(params: FieldParams, case: CongruenceCase) -> Fraction:
    """The share F with |special i_b members| = (q−1)·F."""
    family = case.family
    if family == "PhiOnly":
        return Fraction(1, params.two_lk)
    if family == "Both":
        return Fraction(1, 2 * params.lk1)
    if family == "EllOnly":
        return Fraction(params.ell - 1, params.two_lk)
    return Fraction(0)


def zero_u_labels(params: FieldParams) -> FrozenSet[Label]:
    """Labels of i_b with Tr(ξ^{i_b}) ≢ 0 (mod p)."""
    labels = set(PLUS_T2 | MINUS_T2)
    if not params.ell_is_one_mod_p:
        labels |= {Label.ZERO, Label.ELL_K}
    return frozenset(labels)


def zero_u_fraction(params: FieldParams) -> Fraction:
    if params.ell_is_one_mod_p:
        return Fraction(params.ell - 1, params.lk)
    return Fraction(1, params.lk1)


# ── Stage 4 – w(u, b) ────────────────────────────────────────────────

def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise InternalInconsistency(f"{what} is not an integer", observed=str(value))
    return int(value)


def w_closed_value(params: FieldParams, u: int, label: Optional[Label]) -> int:
    """w(u, b) in closed form; label is the class of i_b, or None for b = 0."""
    p, ell, q = params.p, params.ell, params.q
    lk, lk1, sq = params.lk, params.lk1, params.sqrt_q
    case = classify_u(params, u)

    if case is CongruenceCase.ZERO_U:
        if label is None:
            if params.ell_is_one_mod_p:
                value = Fraction(q - 1, lk) * ((p - 1) * lk - p * ell + p)
            else:
                value = Fraction(q - 1, lk1) * ((p - 1) * lk1 - p)
        elif params.ell_is_one_mod_p:
            if label in zero_u_labels(params):
                value = Fraction(sq + 1, lk) * (-p * lk + p * ell - p) + 1
            else:
                value = Fraction(sq + 1, lk) * (p * ell - p) - p + 1
        else:
            if label in zero_u_labels(params):
                value = Fraction(sq + 1, lk1) * (-p * lk1 + p) + 1
            else:
                value = Fraction(p * (sq + 1), lk1) - p + 1
        return _as_int(value, "w(0, b)")

    if label is None:
        family = case.family
        if family == "PhiOnly":
            value = Fraction(q - 1, 2 * lk) * (p - 2 * lk)
        elif family == "Both":
            value = Fraction(q - 1, 2 * lk1) * (p - 2 * lk1)
        elif family == "EllOnly":
            value = Fraction(q - 1, 2 * lk) * (ell * p - p - 2 * lk)
        else:
            value = Fraction(1 - q)
        return _as_int(value, "w(u, 0)")

    if case is CongruenceCase.GENERIC:
        return 1
    share = case_fraction(params, case)
    value = 1 - p * (sq + 1) * share
    if label in special_labels(params, case):
        value += p * sq
    return _as_int(value, "w(u, b)")


def w_sum(tbl: FieldTable, part: PartitionTables, u: int, b: int, mode: str = "closed") -> CycInt:
    params = tbl.params
    p = params.p
    if mode == "brute":
        total = CycInt.zero(p)
        for z in range(1, p):
            total = total + cyc_from_root(p, -u * z) * weil_sum_bruteforce(tbl, z, b)
        return total
    if mode == "closed":
        label = None if b == 0 else part.peak_label_of(b)
        return CycInt.from_int(p, w_closed_value(params, u % p, label))
    raise ParameterError(f"unknown mode {mode!r}; expected brute or closed")


# ── Stage 5 – Gauss, quadratic and η₁-weighted sums ──────────────────

def gauss_sum_bruteforce(tbl: FieldTable) -> CycInt:
    """Σ_{c≠0} η_e(c) ζ^{Tr(c)}."""
    p = tbl.p
    tr = tbl.trace_of(tbl.nonzero_elements())
    even = np.bincount(tr[0::2], minlength=p)
    odd = np.bincount(tr[1::2], minlength=p)
    return CycInt.from_counts(p, [int(c) for c in even - odd])


def quadratic_sum_bruteforce(tbl: FieldTable, r2: int, r1: int, r0: int) -> CycInt:
    """Σ_{x∈F_q} χ(r2 x² + r1 x + r0)."""
    if r2 == 0:
        raise ZeroElement("the quadratic coefficient must be nonzero")
    xs = tbl.ordered_elements()
    exps = (
        tbl.trace_scaled(r2, tbl.pow_elements(xs, 2))
        + tbl.trace_scaled(r1, xs)
        + tbl.trace_of(r0)
    )
    return _histogram(tbl.p, exps)


def quadratic_sum_closed(tbl: FieldTable, r2: int, r1: int, r0: int) -> CycInt:
    """χ(r0 − r1²(4r2)⁻¹)·η_e(r2)·G(η_e, χ)."""
    if r2 == 0:
        raise ZeroElement("the quadratic coefficient must be nonzero")
    q = tbl.q
    four_r2 = tbl.mul(4 % tbl.p, r2)
    inv = tbl.pow_elements(four_r2, q - 2)
    shift = tbl.add(r0, tbl.neg(tbl.mul(tbl.mul(r1, r1), inv)))
    gauss = gauss_sum_closed(tbl.p, tbl.params.e)
    return cyc_from_root(tbl.p, tbl.trace_of(shift)) * gauss * quad_char_ext(tbl, r2)


def eta_weighted_sum(tbl: FieldTable, part: PartitionTables, b: int, mode: str = "closed") -> CycInt:
    """Σ_{z∈F_p*} η₁(z) S(z, b)."""
    params = tbl.params
    p = params.p
    if mode == "brute":
        total = CycInt.zero(p)
        for z in range(1, p):
            total = total + weil_sum_bruteforce(tbl, z, b) * quad_char(p, z)
        return total
    if mode != "closed":
        raise ParameterError(f"unknown mode {mode!r}; expected brute or closed")

    g1 = gauss_sum_closed(p, 1)
    weight = (1 + quad_char(p, -1)) * (quad_char(p, params.t1) + (params.ell - 1) * quad_char(p, params.t2))
    period = g1 * weight
    if b == 0:
        return period * params.exp_N
    peak = part.peak_index(b)
    factor = (params.sqrt_q + 1) // params.two_lk
    return g1 * (params.sqrt_q * quad_char(p, part.trace_of_xi[peak])) - period * factor


# ── Comparison ───────────────────────────────────────────────────────

def require_agreement(what: str, brute: CycInt, closed: CycInt, **context: object) -> None:
    if brute != closed:
        raise MethodDisagreement(
            f"{what}: closed form disagrees with brute force",
            expected=brute.to_json(),
            observed=closed.to_json(),
            context=context,
        )
