"""Report builders shared by the command line and the HTTP router."""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter
from functools import lru_cache
from typing import Optional, Tuple

from pydantic import BaseModel

from app.bent import dual_level_counts, extract_profile, make_candidate
from app.charsum import (
    PartitionTables,
    build_partition,
    classify_u,
    eta_weighted_sum,
    period_sum_closed,
    require_agreement,
    w_sum,
    weil_sum_bruteforce,
    weil_sum_closed,
    weil_sum_period,
)
from app.codes import (
    CodeSpec,
    WeightDistribution,
    build_defining_set,
    defining_set_size_closed,
    griesmer_check,
    sample_verify,
    weight_distribution,
)
from app.config import settings
from app.cyclotomic import CycInt
from app.errors import CeilingExceeded, ParameterError
from app.field import FieldParams, FieldTable, build_field, residue_class, validate_params
from app.predict import classify_case, diff_distributions, predict_distribution
from app.schemas import (
    BentReport,
    ConstructReport,
    CycIntModel,
    DiffRow,
    DistributionReport,
    GriesmerReport,
    ParamsReport,
    SampleMismatch,
    SampleReport,
    VerifyReport,
    WeilReport,
    WeilValue,
)

logger = logging.getLogger(__name__)

METHODS = ("auto", "direct", "closed", "both")


# ── Shared setup ─────────────────────────────────────────────────────

@lru_cache(maxsize=16)
def field_setup(p: int, ell: int, k: int) -> Tuple[FieldParams, FieldTable, PartitionTables]:
    params = validate_params(p, ell, k)
    tbl = build_field(params)
    return params, tbl, build_partition(tbl)


def build_spec(
    part: PartitionTables,
    *,
    du: Optional[int] = None,
    dprime: Optional[str] = None,
    i: Optional[int] = None,
) -> CodeSpec:
    if (du is None) == (dprime is None):
        raise ParameterError("exactly one of --du U or --dprime FAMILY is required")
    if du is not None:
        return CodeSpec.du(part.params, du)
    profile = extract_profile(make_candidate(part.table, dprime, i))
    return CodeSpec.dprime(part.params, profile)


def resolve_method(spec: CodeSpec, method: str, *, ceiling: Optional[int] = None) -> str:
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if method != "auto":
        return method
    q = spec.params.q
    pairs_ok = q * q <= (settings.pair_ceiling if ceiling is None else ceiling)
    work_ok = q * q * defining_set_size_closed(spec) <= settings.direct_work_ceiling
    return "both" if pairs_ok and work_ok else "closed"


def _cyc(value: Optional[CycInt]) -> Optional[CycIntModel]:
    return CycIntModel(**value.to_json()) if value is not None else None


# ── params / weil / bent ─────────────────────────────────────────────

def params_report(p: int, ell: int, k: int) -> ParamsReport:
    params, tbl, part = field_setup(p, ell, k)
    return ParamsReport(
        **params.to_dict(),
        two_lk=params.two_lk,
        sqrt_q=params.sqrt_q,
        p_star=params.p_star,
        t1=params.t1,
        t2=params.t2,
        modulus=list(tbl.modulus),
        partition=[label.value for label in part.class_of],
        trace_of_xi=list(part.trace_of_xi),
    )


def _weil_value(name: str, brute: Optional[CycInt], closed: Optional[CycInt], **context: object) -> WeilValue:
    agree = None
    if brute is not None and closed is not None:
        require_agreement(name, brute, closed, **context)
        agree = True
    return WeilValue(name=name, brute=_cyc(brute), closed=_cyc(closed), agree=agree)


def weil_report(
    p: int,
    ell: int,
    k: int,
    *,
    a: int,
    b_log: Optional[int] = None,
    u: Optional[int] = None,
    method: str = "both",
) -> WeilReport:
    if method not in ("brute", "closed", "both"):
        raise ParameterError(f"unknown method {method!r}; expected brute, closed or both")
    params, tbl, part = field_setup(p, ell, k)
    if not 0 <= a < params.q:
        raise ParameterError(f"a must be an element code in 0..{params.q - 1}")
    b = 0 if b_log is None else tbl.power(b_log)
    brute_on = method in ("brute", "both")
    closed_on = method in ("closed", "both")
    if closed_on and a >= params.p:
        logger.warning("a = %d lies outside F_p; closed forms skipped, brute force only", a)
        closed_on, brute_on = False, True
    if brute_on and params.q > settings.weil_sum_ceiling:
        raise CeilingExceeded(f"brute-force sums need q ≤ {settings.weil_sum_ceiling}, got q = {params.q}")

    context = {"a": a, "b_log": b_log}
    values = [
        _weil_value(
            "S(a,b)",
            weil_sum_bruteforce(tbl, a, b) if brute_on else None,
            weil_sum_closed(tbl, part, a, b) if closed_on else None,
            **context,
        ),
        _weil_value(
            "S(a)",
            weil_sum_period(tbl, a) if brute_on else None,
            period_sum_closed(params, a) if closed_on else None,
            **context,
        ),
        _weil_value(
            "eta_sum(b)",
            eta_weighted_sum(tbl, part, b, "brute") if method != "closed" else None,
            eta_weighted_sum(tbl, part, b, "closed") if method != "brute" else None,
            **context,
        ),
    ]
    if u is not None:
        values.append(
            _weil_value(
                "w(u,b)",
                w_sum(tbl, part, u, b, "brute") if method != "closed" else None,
                w_sum(tbl, part, u, b, "closed") if method != "brute" else None,
                u=u,
                **context,
            )
        )

    i_b = residue_class(tbl, b) if b else None
    return WeilReport(
        params=params.to_dict(),
        a=a,
        b_log=b_log,
        u=u,
        residue_class=i_b,
        label=part.class_of[i_b].value if i_b is not None else None,
        u_case=classify_u(params, u).value if u is not None else None,
        method=method,
        values=values,
    )


def bent_report(
    p: int, ell: int, k: int, *, family: str, i: Optional[int] = None, stated_epsilon: Optional[int] = None
) -> BentReport:
    params, tbl, _ = field_setup(p, ell, k)
    cand = make_candidate(tbl, family, i)
    profile = extract_profile(cand, stated_epsilon=stated_epsilon)
    levels = dual_level_counts(profile)
    return BentReport(
        params=params.to_dict(),
        family=cand.family.value,
        i=cand.i,
        function=cand.name,
        epsilon=profile.epsilon,
        stated_epsilon=stated_epsilon,
        l_f=profile.l_f,
        k_f=profile.k_f,
        level_counts={str(lam): c for lam, c in levels.items()},
        dual_classes=profile.quadratic_class_counts(),
    )


# ── codes ────────────────────────────────────────────────────────────

def construct_report(spec: CodeSpec, part: PartitionTables, *, ceiling: Optional[int] = None) -> ConstructReport:
    D = build_defining_set(spec, part.table, ceiling=ceiling)
    return ConstructReport(
        params=spec.params.to_dict(),
        spec=spec.to_dict(),
        n=D.n,
        n_closed=defining_set_size_closed(spec),
    )


def _distribution_report(
    spec: CodeSpec, wd: WeightDistribution, source: str, *, table: Optional[str] = None, case: Optional[dict] = None
) -> DistributionReport:
    d = wd.d_min
    g = griesmer_check(wd.n, wd.dim, d, wd.p)
    return DistributionReport(
        params=spec.params.to_dict(),
        spec=spec.to_dict(),
        source=source,
        table=table,
        case=case,
        n=wd.n,
        dim=wd.dim,
        d=d,
        num_weights=wd.num_weights,
        dist=[[w, a] for w, a in wd.to_rows()],
        enumerator=wd.enumerator(),
        griesmer=GriesmerReport(**g.to_dict()),
    )


def spectrum_report(
    spec: CodeSpec, part: PartitionTables, method: str = "auto", *, ceiling: Optional[int] = None
) -> DistributionReport:
    resolved = resolve_method(spec, method, ceiling=ceiling)
    wd = weight_distribution(spec, part, resolved, ceiling=ceiling)
    return _distribution_report(spec, wd, resolved)


def predict_report(spec: CodeSpec) -> DistributionReport:
    case = classify_case(spec)
    wd = predict_distribution(spec, case)
    return _distribution_report(spec, wd, "theorem", table=case.branch.value, case=case.to_dict())


def verify_report(
    spec: CodeSpec, part: PartitionTables, method: str = "auto", *, ceiling: Optional[int] = None
) -> VerifyReport:
    observed = spectrum_report(spec, part, method, ceiling=ceiling)
    predicted = predict_report(spec)
    obs_wd = WeightDistribution(dist=dict(observed.dist), n=observed.n, dim=observed.dim, p=spec.params.p)
    pred_wd = WeightDistribution(dist=dict(predicted.dist), n=predicted.n, dim=predicted.dim, p=spec.params.p)
    diff = [DiffRow(**row) for row in diff_distributions(obs_wd, pred_wd)]
    return VerifyReport(
        params=spec.params.to_dict(),
        spec=spec.to_dict(),
        equal=not diff and observed.n == predicted.n,
        observed=observed,
        predicted=predicted,
        diff=diff,
    )


def sample_report(
    spec: CodeSpec,
    part: PartitionTables,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    *,
    ceiling: Optional[int] = None,
) -> SampleReport:
    result = sample_verify(spec, part, samples, seed, ceiling=ceiling)
    predicted = predict_distribution(spec)
    g = griesmer_check(predicted.n, predicted.dim, predicted.d_min, predicted.p)
    weights = Counter(w for _, _, w in result.checked)
    return SampleReport(
        params=spec.params.to_dict(),
        spec=spec.to_dict(),
        seed=result.seed,
        samples=result.samples,
        n=predicted.n,
        weights=[[w, c] for w, c in sorted(weights.items())],
        mismatches=[SampleMismatch(**m) for m in result.mismatches],
        predicted_d=predicted.d_min,
        griesmer=GriesmerReport(**g.to_dict()),
    )


# ── Serialization ────────────────────────────────────────────────────

def to_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(), sort_keys=True, indent=2)


def to_csv(report: DistributionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["weight", "frequency"])
    for w, a in report.dist:
        writer.writerow([w, a])
    return buf.getvalue()
