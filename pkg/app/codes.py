"""
Codes from the defining sets

    D_u = {(x, y) ≠ (0, 0) : Tr(x + y^N) = u}
    D′  = {(x, y) ≠ (0, 0) : f(x) + Tr(y^N) = 0}

with codewords c(γ, δ) = (Tr(γx + δy))_{(x, y) ∈ D}.

  Stage 1 – defining sets (enumeration + closed-form size)
  Stage 2 – codeword weights by direct counting
  Stage 3 – closed-form N = #{(x, y) ∈ D : Tr(γx + δy) = 0}, weight = n − N
  Stage 4 – weight distributions (direct, closed per pair, closed by class)
  Stage 5 – Griesmer bound and seeded sampling
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.bent import BentProfile
from app.charsum import (
    MINUS_T2,
    PLUS_T2,
    CongruenceCase,
    Label,
    PartitionTables,
    case_fraction,
    classify_u,
    special_labels,
    zero_u_fraction,
    zero_u_labels,
)
from app.config import settings
from app.errors import (
    CeilingExceeded,
    DegenerateCode,
    InternalInconsistency,
    InvalidSpec,
    MethodDisagreement,
    ParameterError,
    SizeMismatch,
    VerificationFailed,
)
from app.field import FieldParams, FieldTable, quad_char, require_pairs_within, residue_class

logger = logging.getLogger(__name__)

# ── Constants ─────────────────────────────────────────────────────────
DELTA_BLOCK_CELLS = 1 << 22   # δ-block × n cells materialized at once


# ── Data classes ──────────────────────────────────────────────────────

class CodeKind(str, enum.Enum):
    DU = "du"
    DPRIME = "dprime"


@dataclass(frozen=True)
class CodeSpec:
    kind: CodeKind
    params: FieldParams
    u: Optional[int] = None
    profile: Optional[BentProfile] = None

    @classmethod
    def du(cls, params: FieldParams, u: int) -> CodeSpec:
        if not 0 <= u < params.p:
            raise InvalidSpec(f"u must lie in 0..{params.p - 1}, got {u}")
        return cls(kind=CodeKind.DU, params=params, u=u)

    @classmethod
    def dprime(cls, params: FieldParams, profile: BentProfile) -> CodeSpec:
        if profile.params != params:
            raise InvalidSpec("bent profile was built over a different field")
        if profile.l_f != 2:
            raise InvalidSpec(f"D′ needs l_f = 2, profile has l_f = {profile.l_f}")
        return cls(kind=CodeKind.DPRIME, params=params, profile=profile)

    @property
    def epsilon(self) -> Optional[int]:
        return self.profile.epsilon if self.profile is not None else None

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is CodeKind.DU:
            return {"kind": self.kind.value, "u": self.u}
        cand = self.profile.candidate
        return {
            "kind": self.kind.value,
            "family": cand.family.value,
            "i": cand.i,
            "function": cand.name,
            "epsilon": self.profile.epsilon,
        }


@dataclass(frozen=True)
class DefiningSet:
    spec: CodeSpec
    tbl: FieldTable
    xs: np.ndarray   # pairs in (log x, log y) order, zero first
    ys: np.ndarray

    @property
    def n(self) -> int:
        return int(self.xs.shape[0])

    def pairs(self) -> Iterator[Tuple[int, int]]:
        for x, y in zip(self.xs, self.ys):
            yield int(x), int(y)


@dataclass(frozen=True)
class WeightDistribution:
    dist: Dict[int, int]
    n: int
    dim: int
    p: int

    @property
    def d_min(self) -> int:
        return min(w for w, a in self.dist.items() if w > 0 and a > 0)

    @property
    def num_weights(self) -> int:
        return sum(1 for w, a in self.dist.items() if w > 0 and a > 0)

    @property
    def total(self) -> int:
        return sum(self.dist.values())

    def to_rows(self) -> List[Tuple[int, int]]:
        return sorted(self.dist.items())

    def enumerator(self) -> str:
        terms = ["1"]
        for w, a in self.to_rows():
            if w > 0:
                terms.append(f"{a}z^{w}")
        return " + ".join(terms)


@dataclass(frozen=True)
class GriesmerResult:
    bound: int
    meets: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"bound": self.bound, "meets": self.meets}


@dataclass
class SampleResult:
    seed: int
    samples: int
    checked: List[Tuple[int, int, int]] = field(default_factory=list)   # (γ, δ, weight)
    mismatches: List[Dict[str, int]] = field(default_factory=list)


def finalize_distribution(counts: Counter, n: int, params: FieldParams) -> WeightDistribution:
    """Validate a raw weight → count map and wrap it."""
    dist = {int(w): int(a) for w, a in counts.items() if a > 0}
    if dist.get(0, 0) != 1:
        raise DegenerateCode(
            "a nonzero (γ, δ) gives the zero codeword",
            expected=1,
            observed=dist.get(0, 0),
        )
    total = sum(dist.values())
    if total != params.q**2:
        raise InternalInconsistency("distribution mass differs from p^{2e}", expected=params.q**2, observed=total)
    if max(dist) > n:
        raise InternalInconsistency("a weight exceeds the code length", expected=n, observed=max(dist))
    return WeightDistribution(dist=dict(sorted(dist.items())), n=n, dim=2 * params.e, p=params.p)


# ── Stage 1 – Defining sets ──────────────────────────────────────────

def _x_values(spec: CodeSpec, tbl: FieldTable, order: np.ndarray) -> np.ndarray:
    if spec.kind is CodeKind.DU:
        return tbl.trace_of(order)
    return spec.profile.candidate.values()[order]


def build_defining_set(spec: CodeSpec, tbl: FieldTable, *, ceiling: Optional[int] = None) -> DefiningSet:
    params = spec.params
    p = params.p
    require_pairs_within(params.q, ceiling)

    order = tbl.ordered_elements()
    x_part = _x_values(spec, tbl, order)
    y_part = tbl.trace_of(tbl.pow_elements(order, params.exp_N))
    target = spec.u if spec.kind is CodeKind.DU else 0

    mask = (x_part[:, None] + y_part[None, :]) % p == target
    mask[0, 0] = False
    rows, cols = np.nonzero(mask)
    xs, ys = order[rows], order[cols]
    xs.flags.writeable = False
    ys.flags.writeable = False
    dset = DefiningSet(spec=spec, tbl=tbl, xs=xs, ys=ys)

    closed = defining_set_size_closed(spec)
    if dset.n != closed:
        raise SizeMismatch(
            "defining set size disagrees with its closed form",
            expected=dset.n,
            observed=closed,
            context=spec.to_dict(),
        )
    logger.info("Built defining set %s over F_%d: n=%d", spec.to_dict(), params.q, dset.n)
    return dset


def _zero_u_share_total(params: FieldParams) -> Fraction:
    """(q−1)/ℓᵏ·(ℓ−1) when ℓ ≡ 1 (mod p), else (q−1)/ℓᵏ⁻¹."""
    return (params.q - 1) * zero_u_fraction(params)


def defining_set_size_closed(spec: CodeSpec) -> int:
    params = spec.params
    p, e, q = params.p, params.e, params.q
    if spec.kind is CodeKind.DU:
        return p ** (2 * e - 1) - (1 if spec.u == 0 else 0)
    s = spec.epsilon * params.sqrt_pstar_e
    value = Fraction(q * q, p) - 1 + s * (Fraction(q * (p - 1), p) - _zero_u_share_total(params))
    if value.denominator != 1:
        raise InternalInconsistency("|D′| closed form is not an integer", observed=str(value))
    return int(value)


# ── Stage 2 – Direct weights ─────────────────────────────────────────

def codeword_weight_direct(D: DefiningSet, gamma: int, delta: int) -> int:
    tbl = D.tbl
    t = tbl.trace_scaled(gamma, D.xs) + tbl.trace_scaled(delta, D.ys)
    return int((t % tbl.p != 0).sum())


def codeword_weights_direct(D: DefiningSet, gammas: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """Weights of c(γ_j, δ_j) for paired arrays of codes."""
    tbl = D.tbl
    p = tbl.p
    out = np.empty(len(gammas), dtype=np.int64)
    for j, (g, d) in enumerate(zip(gammas, deltas)):
        t = tbl.trace_scaled(int(g), D.xs) + tbl.trace_scaled(int(d), D.ys)
        out[j] = int((t % p != 0).sum())
    return out


# ── Stage 3 – Closed-form N ──────────────────────────────────────────

def _as_int(value: Fraction, what: str, **context: Any) -> int:
    if value.denominator != 1:
        raise InternalInconsistency(f"{what} is not an integer", observed=str(value), context=context)
    return int(value)


def _in_prime_field_star(params: FieldParams, gamma: int) -> bool:
    return 1 <= gamma < params.p


def N1_closed(spec: CodeSpec, part: PartitionTables, gamma: int, delta: int) -> int:
    if spec.kind is not CodeKind.DU:
        raise InvalidSpec("N1_closed applies to D_u codes")
    params = spec.params
    p, e, q, sq = params.p, params.e, params.q, params.sqrt_q
    n1 = defining_set_size_closed(spec)
    if gamma == 0 and delta == 0:
        return n1

    P2, pe1 = p ** (2 * e - 2), p ** (e - 1)
    label = part.peak_label_of(delta) if delta else None

    if spec.u == 0:
        if not _in_prime_field_star(params, gamma):
            return P2 - 1
        share = zero_u_fraction(params)
        if label is None:
            value = p ** (2 * e - 1) - 1 - pe1 * (q - 1) * share
        elif label in zero_u_labels(params):
            value = P2 - 1 + pe1 * (sq + 1) * share - pe1 * sq
        else:
            value = P2 - 1 + pe1 * (sq + 1) * share
        return _as_int(value, "N1", gamma=gamma, delta=delta)

    if not _in_prime_field_star(params, gamma):
        return P2
    case = classify_u(params, spec.u)
    if case is CongruenceCase.GENERIC:
        return 0 if label is None else P2
    share = case_fraction(params, case)
    if label is None:
        value = pe1 * (q - 1) * share
    elif label in special_labels(params, case):
        value = P2 + pe1 * sq - pe1 * (sq + 1) * share
    else:
        value = P2 - pe1 * (sq + 1) * share
    return _as_int(value, "N1", gamma=gamma, delta=delta)


def _dprime_T(params: FieldParams) -> int:
    p = params.p
    return quad_char(p, params.t1) + (params.ell - 1) * quad_char(p, params.t2)


def N2_closed(spec: CodeSpec, part: PartitionTables, gamma: int, delta: int) -> int:
    if spec.kind is not CodeKind.DPRIME:
        raise InvalidSpec("N2_closed applies to D′ codes")
    params = spec.params
    p, ell, q, sq = params.p, params.ell, params.q, params.sqrt_q
    lk, lk1 = params.lk, params.lk1
    n2 = defining_set_size_closed(spec)
    if gamma == 0 and delta == 0:
        return n2

    A = Fraction(q * q, p * p)
    s = spec.epsilon * params.sqrt_pstar_e
    dual = spec.profile.dual_of(gamma)
    eta = quad_char(p, dual)
    share = zero_u_fraction(params)
    label = part.peak_label_of(delta) if delta else None
    ell_one = params.ell_is_one_mod_p
    p_one = p % 4 == 1

    if dual == 0:
        if label is None:
            inner = Fraction(q * (p - 1), p) - _zero_u_share_total(params)
        elif label in zero_u_labels(params):
            inner = Fraction((p - 1) * sq * (sq - p), p * p) - share * (sq + 1) * Fraction(sq - p, p)
        else:
            inner = Fraction(q * (p - 1), p * p) - share * (sq + 1) * Fraction(sq - p, p)
        return _as_int(A + s * inner - 1, "N2", gamma=gamma, delta=delta)

    if label is None:
        if not p_one:
            return _as_int(A - 1, "N2", gamma=gamma, delta=delta)
        weight = (ell - 1) if ell_one else _dprime_T(params)
        return _as_int(A + s * eta * weight * Fraction(q - 1, p * lk) - 1, "N2", gamma=gamma, delta=delta)

    inner = Fraction(q * (p - 1), p * p)
    if ell_one and p_one:
        inner -= Fraction((ell - 1) * (sq + 1) * (sq + eta), p * lk)
        if label in zero_u_labels(params):
            inner += Fraction(sq * (1 + eta), p)
    elif ell_one:
        inner -= Fraction((ell - 1) * (q + sq), p * lk)
        if label in MINUS_T2:
            inner += Fraction(sq * (1 + eta), p)
        elif label in PLUS_T2:
            inner += Fraction(sq * (1 - eta), p)
    elif p_one:
        eta1, eta2 = quad_char(p, params.t1), quad_char(p, params.t2)
        inner -= Fraction((sq + 1) * (ell * sq + eta * _dprime_T(params)), p * lk)
        if label in (Label.ZERO, Label.ELL_K):
            inner += Fraction(sq * (1 + eta * eta1), p)
        elif label in PLUS_T2 | MINUS_T2:
            inner += Fraction(sq * (1 + eta * eta2), p)
    else:
        eta1, eta2 = quad_char(p, params.t1), quad_char(p, params.t2)
        inner -= Fraction(q + sq, p * lk1)
        bonus = {
            Label.ZERO: 1 - eta * eta1,
            Label.ELL_K: 1 + eta * eta1,
            Label.P1_2: 1 - eta * eta2,
            Label.P3_2: 1 - eta * eta2,
            Label.P1_3: 1 + eta * eta2,
            Label.P3_3: 1 + eta * eta2,
        }.get(label, 0)
        inner += Fraction(sq * bonus, p)
    return _as_int(A + s * inner - 1, "N2", gamma=gamma, delta=delta)


def N_closed(spec: CodeSpec, part: PartitionTables, gamma: int, delta: int) -> int:
    if spec.kind is CodeKind.DU:
        return N1_closed(spec, part, gamma, delta)
    return N2_closed(spec, part, gamma, delta)


def weight_closed(spec: CodeSpec, part: PartitionTables, gamma: int, delta: int) -> int:
    return defining_set_size_closed(spec) - N_closed(spec, part, gamma, delta)


# ── Stage 4 – Distributions ──────────────────────────────────────────

def _gamma_block_weights(D: DefiningSet, gammas: np.ndarray) -> Counter:
    tbl = D.tbl
    p, q = tbl.p, tbl.q
    n_nz = q - 1
    tr_pow = tbl.trace_of(tbl.antilog)
    y_zero = D.ys == 0
    y_log = np.where(y_zero, 0, tbl.log[D.ys])
    block = max(1, DELTA_BLOCK_CELLS // max(D.n, 1))

    counts: Counter = Counter()
    for g in gammas:
        tx = tbl.trace_scaled(int(g), D.xs)
        counts[int((tx % p != 0).sum())] += 1  # δ = 0
        for start in range(0, n_nz, block):
            js = np.arange(start, min(start + block, n_nz), dtype=np.int64)
            ty = tr_pow[(js[:, None] + y_log[None, :]) % n_nz]
            ty[:, y_zero] = 0
            weights = ((tx[None, :] + ty) % p != 0).sum(axis=1)
            counts.update(Counter(weights.tolist()))
    return counts


def _direct_distribution(D: DefiningSet, work_ceiling: Optional[int]) -> Counter:
    tbl = D.tbl
    q = tbl.q
    limit = settings.direct_work_ceiling if work_ceiling is None else work_ceiling
    if q * q * D.n > limit:
        raise CeilingExceeded(f"direct enumeration needs q²·n = {q * q * D.n} > {limit} trace evaluations")

    gammas = tbl.ordered_elements()
    chunks = [gammas[s:s + settings.gamma_chunk] for s in range(0, q, settings.gamma_chunk)]
    total: Counter = Counter()
    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        for partial in pool.map(lambda gs: _gamma_block_weights(D, gs), chunks):
            total.update(partial)
    return total


def _delta_representatives(part: PartitionTables) -> List[Tuple[int, int]]:
    """(δ, multiplicity): δ = 0 once, then one δ per residue class of i_δ."""
    params = part.params
    tbl = part.table
    reps = [(0, 1)]
    for i in range(params.two_lk):
        reps.append((tbl.power((-i) % params.two_lk), params.exp_N))
    return reps


def _gamma_representatives(spec: CodeSpec, part: PartitionTables) -> List[Tuple[int, int]]:
    params = spec.params
    p, q = params.p, params.q
    if spec.kind is CodeKind.DU:
        return [(0, 1), (1, p - 1), (part.table.alpha, q - p)]

    dual = spec.profile.dual
    reps = [(0, 1)]
    groups: Dict[str, List[int]] = {"zero": [], "plus": [], "minus": []}
    for code in range(1, q):
        v = int(dual[code])
        key = "zero" if v == 0 else ("plus" if quad_char(p, v) == 1 else "minus")
        groups[key].append(code)
    for members in groups.values():
        if members:
            reps.append((members[0], len(members)))
    return reps


def _closed_aggregated(spec: CodeSpec, part: PartitionTables) -> Counter:
    n = defining_set_size_closed(spec)
    counts: Counter = Counter()
    for gamma, g_mult in _gamma_representatives(spec, part):
        for delta, d_mult in _delta_representatives(part):
            w = n - N_closed(spec, part, gamma, delta)
            counts[w] += g_mult * d_mult
            logger.debug("class γ=%d δ=%d -> weight %d ×%d", gamma, delta, w, g_mult * d_mult)
    return counts


def check_class_representatives(spec: CodeSpec, part: PartitionTables, D: DefiningSet) -> int:
    """Compare direct and closed weights on one (γ, δ) per closed-form class.

    Returns the number of pairs checked.
    """
    params = spec.params
    gammas = [g for g, _ in _gamma_representatives(spec, part)]
    if spec.kind is CodeKind.DU:
        gammas = sorted(set(gammas) | set(range(1, params.p)))
    checked = 0
    for gamma in gammas:
        for delta, _ in _delta_representatives(part):
            direct = codeword_weight_direct(D, gamma, delta)
            closed = D.n - N_closed(spec, part, gamma, delta)
            checked += 1
            if direct != closed:
                raise MethodDisagreement(
                    "closed-form weight disagrees with direct counting",
                    expected=direct,
                    observed=closed,
                    context={
                        "gamma": gamma,
                        "delta": delta,
                        "i_delta": residue_class(part.table, delta) if delta else None,
                        **spec.to_dict(),
                    },
                )
    logger.debug("Checked %d class representatives of %s pointwise", checked, spec.to_dict())
    return checked


def _closed_per_pair(spec: CodeSpec, part: PartitionTables, ceiling: Optional[int]) -> Counter:
    q = spec.params.q
    require_pairs_within(q, ceiling)
    n = defining_set_size_closed(spec)
    counts: Counter = Counter()
    for gamma in range(q):
        for delta in range(q):
            counts[n - N_closed(spec, part, gamma, delta)] += 1
    return counts


def weight_distribution(
    spec: CodeSpec,
    part: PartitionTables,
    method: str = "closed",
    *,
    D: Optional[DefiningSet] = None,
    aggregate: bool = True,
    ceiling: Optional[int] = None,
    work_ceiling: Optional[int] = None,
) -> WeightDistribution:
    params = spec.params
    if method not in ("direct", "closed", "both"):
        raise ParameterError(f"unknown method {method!r}; expected direct, closed or both")

    closed_dist = direct_dist = None
    if method in ("closed", "both"):
        raw = _closed_aggregated(spec, part) if aggregate else _closed_per_pair(spec, part, ceiling)
        closed_dist = finalize_distribution(raw, defining_set_size_closed(spec), params)
    if method in ("direct", "both"):
        D = D if D is not None else build_defining_set(spec, part.table, ceiling=ceiling)
        raw = _direct_distribution(D, work_ceiling)
        direct_dist = finalize_distribution(raw, D.n, params)
        if method == "both":
            check_class_representatives(spec, part, D)

    if closed_dist is not None and direct_dist is not None and closed_dist.dist != direct_dist.dist:
        raise MethodDisagreement(
            "closed-form distribution disagrees with direct enumeration",
            expected=direct_dist.to_rows(),
            observed=closed_dist.to_rows(),
            context=spec.to_dict(),
        )
    result = direct_dist if direct_dist is not None else closed_dist
    logger.info("Distribution (%s) for %s: %d distinct nonzero weights", method, spec.to_dict(), result.num_weights)
    return result


# ── Stage 5 – Griesmer and sampling ──────────────────────────────────

def griesmer_check(n: int, k: int, d: int, p: int) -> GriesmerResult:
    if k < 1 or d < 1:
        raise ParameterError("griesmer_check needs k ≥ 1 and d ≥ 1")
    bound = sum(-(-d // p**i) for i in range(k))
    return GriesmerResult(bound=bound, meets=n == bound)


def sample_verify(
    spec: CodeSpec,
    part: PartitionTables,
    sample_size: Optional[int] = None,
    seed: Optional[int] = None,
    *,
    D: Optional[DefiningSet] = None,
    ceiling: Optional[int] = None,
) -> SampleResult:
    q = spec.params.q
    size = settings.sample_size if sample_size is None else sample_size
    seed = settings.sample_seed if seed is None else seed
    tbl = part.table
    D = D if D is not None else build_defining_set(spec, tbl, ceiling=ceiling)

    rng = np.random.default_rng(seed)
    picks = rng.choice(q * q - 1, size=min(size, q * q - 1), replace=False) + 1
    gammas, deltas = picks // q, picks % q
    direct = codeword_weights_direct(D, gammas, deltas)

    result = SampleResult(seed=seed, samples=len(picks))
    for g, d, w in zip(gammas.tolist(), deltas.tolist(), direct.tolist()):
        closed = D.n - N_closed(spec, part, g, d)
        result.checked.append((g, d, w))
        if closed != w:
            result.mismatches.append({"gamma": g, "delta": d, "direct": w, "closed": closed})

    if result.mismatches:
        first = result.mismatches[0]
        raise VerificationFailed(
            "sampled codeword weight disagrees with the closed form",
            expected=first["direct"],
            observed=first["closed"],
            context={"gamma": first["gamma"], "delta": first["delta"], "mismatches": len(result.mismatches)},
        )
    logger.info("Sampled %d codewords of %s with seed %d: no mismatches", result.samples, spec.to_dict(), seed)
    return result
