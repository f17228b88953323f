"""Request/response bodies for the HTTP service.

Polynomials travel as either an expression string or a polynomial-file text
blob (the same format the CLI reads and writes), which keeps arbitrary
precision integer coefficients exact over the wire.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

Merger = Literal["heap", "tree"]
CoeffKind = Literal["int", "f64"]


class PolyInput(BaseModel):
    """One operand: exactly one of `expr` or `text` must be set."""

    expr: Optional[str] = None
    text: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.expr is None) == (self.text is None):
            raise ValueError("provide exactly one of 'expr' or 'text'")
        return self


class MulOptions(BaseModel):
    l: int = Field(default=64, ge=1)
    threads: int = Field(default=1, ge=1)
    merger: Merger = "heap"
    coeff: CoeffKind = "int"


class MultiplyRequest(BaseModel):
    a: PolyInput
    b: PolyInput
    vars: Optional[list[str]] = None  # overrides variable inference for expressions
    options: MulOptions = MulOptions()
    include_result: bool = True


class MultiplyResponse(BaseModel):
    a_terms: int
    b_terms: int
    result_terms: int
    time_ms: float
    result: Optional[str] = None


class BenchRequest(BaseModel):
    example: Literal[1, 2, 3]
    power: int = Field(default=8, ge=1)
    l: int = Field(default=64, ge=1)
    threads: list[int] = Field(default=[1], min_length=1)
    mergers: list[Merger] = Field(default=["heap"], min_length=1)
    repetitions: int = Field(default=1, ge=1)
    coeff: CoeffKind = "int"
    full: bool = False
    verify_limit: int = 10 ** 6  # verify against the schoolbook product below this many pairwise products


class BenchRow(BaseModel):
    merger: Merger
    threads: int
    repetition: int
    time_ms: float


class BenchResponse(BaseModel):
    example: int
    power: int
    f_terms: int
    g_terms: int
    result_terms: int
    rows: list[BenchRow]
    verified: Optional[bool] = None  # None when the product was too large to verify


class TuneRequest(BaseModel):
    seed: int = 0
    sizes: list[int]
    l_values: list[int]
    threads: int = Field(default=1, ge=1)
    merger: Merger = "heap"
    m_min: int = Field(default=4, ge=1)
    m_max: int = Field(default=8, le=14)
    max_deg: int = Field(default=15, ge=1)
    warmups: int = Field(default=1, ge=0)


class TuneResponse(BaseModel):
    histogram: dict[int, int]
    recommended_l: int
    n_products: int


class GenerateRequest(BaseModel):
    seed: int = 0
    vars: int | list[str] = 4
    terms: int = Field(default=100, ge=1)
    max_deg: int = Field(default=15, ge=0)
    coeff: CoeffKind = "int"


class GenerateResponse(BaseModel):
    text: str
    terms: int


class ClusterRequest(BaseModel):
    a: PolyInput
    b: PolyInput
    vars: Optional[list[str]] = None
    nodes: int = Field(default=1, ge=1)
    options: MulOptions = MulOptions()
    include_result: bool = True


class ClusterResponse(BaseModel):
    result_terms: int
    time_ms: float
    node_ops: list[int]
    messages: int
    bytes: int
    result: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str
    cpus: int
