from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CycIntModel(BaseModel):
    p: int
    coeffs: List[int]


class ParamsReport(BaseModel):
    p: int
    ell: int
    k: int
    e: int
    q: int
    exp_N: int
    two_lk: int
    sqrt_q: int
    p_star: int
    t1: int
    t2: int
    modulus: List[int]
    partition: List[str]
    trace_of_xi: List[int]


# ── Character sums ──────────────────────────────────────────────────


class WeilValue(BaseModel):
    name: str
    brute: Optional[CycIntModel] = None
    closed: Optional[CycIntModel] = None
    agree: Optional[bool] = None


class WeilReport(BaseModel):
    params: Dict[str, int]
    a: int
    b_log: Optional[int] = None
    u: Optional[int] = None
    residue_class: Optional[int] = None
    label: Optional[str] = None
    u_case: Optional[str] = None
    method: str
    values: List[WeilValue]


# ── Bent functions ──────────────────────────────────────────────────


class BentReport(BaseModel):
    params: Dict[str, int]
    family: str
    i: Optional[int] = None
    function: str
    epsilon: int
    stated_epsilon: Optional[int] = None
    l_f: int
    k_f: int
    level_counts: Dict[str, int]
    dual_classes: Dict[str, int]


# ── Codes ───────────────────────────────────────────────────────────


class ConstructReport(BaseModel):
    params: Dict[str, int]
    spec: Dict[str, Any]
    n: int
    n_closed: int


class GriesmerReport(BaseModel):
    bound: int
    meets: bool


class DistributionReport(BaseModel):
    params: Dict[str, int]
    spec: Dict[str, Any]
    source: str  # direct | closed | both | theorem
    table: Optional[str] = None
    case: Optional[Dict[str, Any]] = None
    n: int
    dim: int
    d: int
    num_weights: int
    dist: List[List[int]]
    enumerator: str
    griesmer: GriesmerReport


class DiffRow(BaseModel):
    weight: int
    observed: int
    predicted: int


class VerifyReport(BaseModel):
    params: Dict[str, int]
    spec: Dict[str, Any]
    equal: bool
    observed: DistributionReport
    predicted: DistributionReport
    diff: List[DiffRow]


class SampleMismatch(BaseModel):
    gamma: int
    delta: int
    direct: int
    closed: int


class SampleReport(BaseModel):
    params: Dict[str, int]
    spec: Dict[str, Any]
    seed: int
    samples: int
    n: int
    weights: List[List[int]]
    mismatches: List[SampleMismatch]
    predicted_d: int
    griesmer: GriesmerReport


# ── Requests ────────────────────────────────────────────────────────


class ParamsRequest(BaseModel):
    p: int = Field(ge=1)
    ell: int = Field(ge=1)
    k: int = Field(default=1, ge=1)


class CodeRequest(ParamsRequest):
    du: Optional[int] = None
    dprime: Optional[str] = None  # square | alpha-kasami | kasami | coulter
    i: Optional[int] = None
    method: str = "auto"          # auto | direct | closed | both
    samples: int = Field(default=100, ge=1)
    seed: int = 0
