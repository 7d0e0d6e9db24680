"""
Predicted weight distributions as data: every theorem branch is a list of
(weight, frequency) sympy expressions over the symbols below, instantiated
with exact rationals and required to land on integers.

Symbols: p, ell, k, e, q, sqrt_q = p^{e/2}, sqrt_pstar_e = (p*)^{e/2},
epsilon = ε_f, T = η₁(t₁) + (ℓ−1)η₁(t₂), eta1 = η₁(t₁).
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import sympy as sp

from app.charsum import CongruenceCase, classify_u
from app.codes import CodeKind, CodeSpec, WeightDistribution, defining_set_size_closed
from app.errors import InternalInconsistency, InvalidSpec, NonIntegerEntry
from app.field import FieldParams, quad_char

logger = logging.getLogger(__name__)

P, L, K, E, Q, RQ, PS, EPS, TT, ETA1 = sp.symbols(
    "p ell k e q sqrt_q sqrt_pstar_e epsilon T eta1", integer=True
)

Row = Tuple[sp.Expr, sp.Expr]


class Branch(str, enum.Enum):
    U0_ELL1 = "U0_Ell1"
    U0_ELLNOT1 = "U0_EllNot1"
    UNZ_GENERIC = "Unz_Generic"
    UNZ_PHI_ONLY = "Unz_PhiOnly"
    UNZ_BOTH = "Unz_Both"
    UNZ_ELL_ONLY = "Unz_EllOnly"
    ELL1_P1MOD4 = "Ell1_P1mod4"
    ELL1_P3MOD4 = "Ell1_P3mod4"
    ELLNOT1_P1MOD4_SAME = "EllNot1_P1mod4_SameSign"
    ELLNOT1_P1MOD4_OPP = "EllNot1_P1mod4_OppSign"
    ELLNOT1_P3MOD4 = "EllNot1_P3mod4"


@dataclass(frozen=True)
class TheoremCase:
    theorem: CodeKind
    branch: Branch
    t1: int
    t2: int
    T: Optional[int] = None
    u_case: Optional[CongruenceCase] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "theorem": self.theorem.value,
            "branch": self.branch.value,
            "t1": self.t1,
            "t2": self.t2,
            "T": self.T,
        }


# ── D_u tables ───────────────────────────────────────────────────────

def _du_zero_rows(share: sp.Expr) -> List[Row]:
    base = P ** (2 * E - 2) * (P - 1)
    return [
        (P ** (E - 1) * (Q - 1) * share, P - 1),
        (base + P ** (E - 1) * (RQ - (RQ + 1) * share), (P - 1) * (Q - 1) * share),
        (base - P ** (E - 1) * (RQ + 1) * share, (P - 1) * (Q - 1) * (1 - share)),
        (base, (Q - 1) + (Q - P) * Q),
    ]


def _du_nonzero_rows(share: sp.Expr) -> List[Row]:
    base = P ** (2 * E - 2) * (P - 1)
    special = (Q - 1) * share
    return [
        (P ** (2 * E - 1) - P ** (E - 1) * (Q - 1) * share, P - 1),
        (base - P ** (E - 1) * RQ + P ** (E - 1) * (RQ + 1) * share, (P - 1) * special),
        (base + P ** (E - 1) * (RQ + 1) * share, (P - 1) * (Q - 1 - special)),
        (base, (Q - 1) + Q * (Q - P)),
    ]


Y_ELL1 = (L - 1) / L**K
Y_ELLNOT1 = 1 / L ** (K - 1)

DU_TABLES: Dict[Branch, List[Row]] = {
    Branch.U0_ELL1: _du_zero_rows(Y_ELL1),
    Branch.U0_ELLNOT1: _du_zero_rows(Y_ELLNOT1),
    Branch.UNZ_GENERIC: [
        (P ** (2 * E - 1), P - 1),
        (P ** (2 * E - 2) * (P - 1), Q**2 - P),
    ],
    Branch.UNZ_PHI_ONLY: _du_nonzero_rows(1 / (2 * L**K)),
    Branch.UNZ_BOTH: _du_nonzero_rows(1 / (2 * L ** (K - 1))),
    Branch.UNZ_ELL_ONLY: _du_nonzero_rows((L - 1) / (2 * L**K)),
}


# ── D′ tables ────────────────────────────────────────────────────────

S_F = EPS * PS                                  # ε_f √(p*)^e
B_W = Q**2 * (P - 1) / P**2                     # weight shared by every row
ZERO_LEVEL = P ** (E - 1) + EPS * (P - 1) * PS / P
OTHER_LEVEL = P ** (E - 1) - EPS * PS / P
HALF = (P - 1) / 2
BONUS = 2 * RQ / P


def _dprime_common(share: sp.Expr) -> List[Row]:
    """Rows from γ with f*(γ) = 0 (γ ≠ 0 for δ = 0)."""
    return [
        (B_W, ZERO_LEVEL - 1),
        (
            B_W + S_F * (P - 1) * (Q * (P - 1) / P**2 + RQ / P - share * (Q + RQ) / P),
            ZERO_LEVEL * (Q - 1) * share,
        ),
        (
            B_W + S_F * (P - 1) * (Q * (P - 1) / P**2 - share * (Q + RQ) / P),
            ZERO_LEVEL * (Q - 1) * (1 - share),
        ),
    ]


def _ell1_p1_rows() -> List[Row]:
    x0 = (Q - 1) * Y_ELL1
    rows = _dprime_common(Y_ELL1)
    for eta in (1, -1):
        rows.append((B_W + S_F * (Q * (P - 1) / P - x0) - S_F * eta * (Q - 1) * (L - 1) / (P * L**K), HALF * OTHER_LEVEL))
    core = Q * (P - 1) ** 2 / P**2 - x0
    plus = core + (L - 1) * (RQ + 1) * (RQ + 1) / (P * L**K)
    minus = core + (L - 1) * (RQ + 1) * (RQ - 1) / (P * L**K)
    rows += [
        (B_W + S_F * (plus - BONUS), HALF * OTHER_LEVEL * (Q - 1) * Y_ELL1),
        (B_W + S_F * plus, HALF * OTHER_LEVEL * (Q - 1) * (1 - Y_ELL1)),
        (B_W + S_F * minus, HALF * OTHER_LEVEL * (Q - 1)),
    ]
    return rows


def _ell1_p3_rows() -> List[Row]:
    x0 = (Q - 1) * Y_ELL1
    core = Q * (P - 1) ** 2 / P**2 - x0 + (L - 1) * (Q + RQ) / (P * L**K)
    share = (L - 1) / (2 * L**K)
    return _dprime_common(Y_ELL1) + [
        (B_W + S_F * (Q * (P - 1) / P - x0), (P - 1) * OTHER_LEVEL),
        (B_W + S_F * (core - BONUS), (P - 1) * OTHER_LEVEL * (Q - 1) * share),
        (B_W + S_F * core, (P - 1) * OTHER_LEVEL * (Q - 1) * (1 - share)),
    ]


def _ellnot1_p1_rows(eta2_sign: int) -> List[Row]:
    """eta2_sign = +1 when η₁(t₂) = η₁(t₁), −1 when they differ."""
    x0 = (Q - 1) * Y_ELLNOT1
    rows = _dprime_common(Y_ELLNOT1)
    for eta in (1, -1):
        rows.append((B_W + S_F * (Q * (P - 1) / P - x0) - S_F * eta * TT * (Q - 1) / (P * L**K), HALF * OTHER_LEVEL))
    for eta in (1, -1):
        base = Q * (P - 1) ** 2 / P**2 - x0 + (RQ + 1) * (L * RQ + eta * TT) / (P * L**K)
        rows += [
            (B_W + S_F * (base - RQ * (1 + eta * ETA1) / P), HALF * OTHER_LEVEL * (Q - 1) / L**K),
            (
                B_W + S_F * (base - RQ * (1 + eta * eta2_sign * ETA1) / P),
                HALF * OTHER_LEVEL * (Q - 1) * (L - 1) / L**K,
            ),
            (B_W + S_F * base, HALF * OTHER_LEVEL * (Q - 1) * (1 - 1 / L ** (K - 1))),
        ]
    return rows


def _ellnot1_p3_rows() -> List[Row]:
    x0 = (Q - 1) * Y_ELLNOT1
    core = Q * (P - 1) ** 2 / P**2 - x0 + (Q + RQ) / (P * L ** (K - 1))
    share = 1 / (2 * L ** (K - 1))
    return _dprime_common(Y_ELLNOT1) + [
        (B_W + S_F * (Q * (P - 1) / P - x0), (P - 1) * OTHER_LEVEL),
        (B_W + S_F * (core - BONUS), (P - 1) * OTHER_LEVEL * (Q - 1) * share),
        (B_W + S_F * core, (P - 1) * OTHER_LEVEL * (Q - 1) * (1 - share)),
    ]


DPRIME_TABLES: Dict[Branch, List[Row]] = {
    Branch.ELL1_P1MOD4: _ell1_p1_rows(),
    Branch.ELL1_P3MOD4: _ell1_p3_rows(),
    Branch.ELLNOT1_P1MOD4_SAME: _ellnot1_p1_rows(1),
    Branch.ELLNOT1_P1MOD4_OPP: _ellnot1_p1_rows(-1),
    Branch.ELLNOT1_P3MOD4: _ellnot1_p3_rows(),
}

LENGTH_DU_ZERO = P ** (2 * E - 1) - 1
LENGTH_DU_NONZERO = P ** (2 * E - 1)
LENGTH_DPRIME_ELL1 = Q**2 / P - 1 + S_F * (Q * (P - 1) / P - (Q - 1) * Y_ELL1)
LENGTH_DPRIME_ELLNOT1 = Q**2 / P - 1 + S_F * (Q * (P - 1) / P - (Q - 1) * Y_ELLNOT1)


# ── Classification ───────────────────────────────────────────────────

def classify_case(spec: CodeSpec) -> TheoremCase:
    params = spec.params
    p, t1, t2 = params.p, params.t1, params.t2
    ell_one = params.ell_is_one_mod_p

    if spec.kind is CodeKind.DU:
        u_case = classify_u(params, spec.u)
        if u_case is CongruenceCase.ZERO_U:
            branch = Branch.U0_ELL1 if ell_one else Branch.U0_ELLNOT1
        else:
            branch = {
                "Generic": Branch.UNZ_GENERIC,
                "PhiOnly": Branch.UNZ_PHI_ONLY,
                "Both": Branch.UNZ_BOTH,
                "EllOnly": Branch.UNZ_ELL_ONLY,
            }[u_case.family]
        return TheoremCase(theorem=CodeKind.DU, branch=branch, t1=t1, t2=t2, u_case=u_case)

    T = None
    if ell_one:
        branch = Branch.ELL1_P1MOD4 if p % 4 == 1 else Branch.ELL1_P3MOD4
    else:
        eta1, eta2 = quad_char(p, t1), quad_char(p, t2)
        T = eta1 + (params.ell - 1) * eta2
        if p % 4 == 3:
            branch = Branch.ELLNOT1_P3MOD4
        elif eta1 == eta2:
            branch = Branch.ELLNOT1_P1MOD4_SAME
        else:
            branch = Branch.ELLNOT1_P1MOD4_OPP
    return TheoremCase(theorem=CodeKind.DPRIME, branch=branch, t1=t1, t2=t2, T=T)


# ── Instantiation ────────────────────────────────────────────────────

def _substitutions(params: FieldParams, case: TheoremCase, epsilon: int) -> Dict[sp.Symbol, int]:
    return {
        P: params.p,
        L: params.ell,
        K: params.k,
        E: params.e,
        Q: params.q,
        RQ: params.sqrt_q,
        PS: params.sqrt_pstar_e,
        EPS: epsilon,
        TT: case.T if case.T is not None else 0,
        ETA1: quad_char(params.p, params.t1),
    }


def _evaluate(expr: sp.Expr, subs: Dict[sp.Symbol, int], what: str, branch: Branch) -> int:
    value = sp.sympify(expr).subs(subs)
    if not value.is_Integer:
        raise NonIntegerEntry(
            f"{what} of table {branch.value} is not an integer",
            observed=str(value),
            context={"expr": str(expr)},
        )
    return int(value)


def table_rows(case: TheoremCase) -> List[Row]:
    if case.theorem is CodeKind.DU:
        return DU_TABLES[case.branch]
    return DPRIME_TABLES[case.branch]


def predicted_length(spec: CodeSpec, case: TheoremCase, epsilon: Optional[int] = None) -> int:
    params = spec.params
    if spec.kind is CodeKind.DU:
        expr = LENGTH_DU_ZERO if spec.u == 0 else LENGTH_DU_NONZERO
    else:
        expr = LENGTH_DPRIME_ELL1 if params.ell_is_one_mod_p else LENGTH_DPRIME_ELLNOT1
    eps = _resolve_epsilon(spec, epsilon)
    return _evaluate(expr, _substitutions(params, case, eps), "length", case.branch)


def _resolve_epsilon(spec: CodeSpec, epsilon: Optional[int]) -> int:
    if spec.kind is CodeKind.DU:
        return 1
    if epsilon is None:
        epsilon = spec.epsilon
    if epsilon not in (1, -1):
        raise InvalidSpec(f"ε_f must be ±1, got {epsilon!r}")
    return epsilon


def predict_distribution(
    spec: CodeSpec, case: Optional[TheoremCase] = None, epsilon: Optional[int] = None
) -> WeightDistribution:
    params = spec.params
    case = case if case is not None else classify_case(spec)
    expected_case = classify_case(spec)
    if case.branch is not expected_case.branch:
        raise InvalidSpec(f"table {case.branch.value} does not apply; expected {expected_case.branch.value}")
    eps = _resolve_epsilon(spec, epsilon)
    subs = _substitutions(params, case, eps)

    counts: Counter = Counter({0: 1})
    for idx, (w_expr, f_expr) in enumerate(table_rows(case)):
        weight = _evaluate(w_expr, subs, f"weight of row {idx}", case.branch)
        freq = _evaluate(f_expr, subs, f"frequency of row {idx}", case.branch)
        if freq < 0:
            raise InternalInconsistency(
                f"negative frequency in table {case.branch.value}",
                observed=freq,
                context={"row": idx, "weight": weight},
            )
        if freq == 0:
            logger.warning("Row %d of table %s is vacuous (weight %d, frequency 0)", idx, case.branch.value, weight)
            continue
        counts[weight] += freq

    total = sum(counts.values())
    if total != params.q**2:
        raise InternalInconsistency(
            f"frequencies of table {case.branch.value} do not sum to p^(2e)",
            expected=params.q**2,
            observed=total,
        )
    n = predicted_length(spec, case, eps)
    if spec.kind is CodeKind.DU or eps == spec.epsilon:
        size = defining_set_size_closed(spec)
        if n != size:
            raise InternalInconsistency("predicted length disagrees with the size formula", expected=size, observed=n)
    if max(counts) > n:
        raise InternalInconsistency("a predicted weight exceeds the length", expected=n, observed=max(counts))
    return WeightDistribution(dist=dict(sorted(counts.items())), n=n, dim=2 * params.e, p=params.p)


def diff_distributions(observed: WeightDistribution, predicted: WeightDistribution) -> List[Dict[str, int]]:
    """Weights whose frequencies differ after zero rows are dropped."""
    weights = sorted(set(observed.dist) | set(predicted.dist))
    rows = []
    for w in weights:
        a, b = observed.dist.get(w, 0), predicted.dist.get(w, 0)
        if a != b:
            rows.append({"weight": w, "observed": a, "predicted": b})
    return rows
