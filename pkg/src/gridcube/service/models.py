"""Pydantic request/response models for the gridcube service.

Problem payloads mirror the JSON file formats: rationals are "p/q"
strings (bare integers accepted), indices are 1-based. Models stay
permissive about the exact payload shape; exact validation happens in
the serialization layer, which raises typed domain errors mapped to
HTTP statuses by the app.
"""

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

Rational = str | int


class MatrixPayload(BaseModel):
    kind: Literal["matrix"] = "matrix"
    blocks: list[list[list[Rational]]]


class ProblemPayload(BaseModel):
    """Kind-tagged problem; fields beyond the tag depend on the kind."""

    model_config = {"extra": "allow"}

    kind: Optional[str] = None


class ClassifyRequest(BaseModel):
    matrix: MatrixPayload


class CertificateReport(BaseModel):
    is_z: bool
    is_p: bool
    is_k: bool
    k_certificate: Optional[list[str]] = None
    p_violation: Optional[str] = None
    stochastic_k: Optional[dict[str, Any]] = None
    stochastic_k_violation: Optional[str] = None
    hidden_k: bool
    hidden_k_gamma: Optional[str] = None
    hidden_k_witness: Optional[list[list[str]]] = None


class ClassifyResponse(BaseModel):
    report: CertificateReport
    text: str


class WitnessRequest(BaseModel):
    matrix: MatrixPayload


class WitnessResponse(BaseModel):
    hidden_k: bool
    gamma: Optional[str] = None
    x: Optional[list[list[str]]] = Field(default=None, alias="X")

    model_config = {"populate_by_name": True}


class SolveRequest(BaseModel):
    problem: ProblemPayload
    method: Optional[str] = None
    rule: str = "least-index"
    oracle: bool = False


class SolveResponse(BaseModel):
    solution: dict[str, Any]
    oracle_checked: bool = False
    pivots: Optional[int] = None


class ReduceRequest(BaseModel):
    problem: ProblemPayload
    target: Literal[
        "plcp", "binary-kglcp", "hiddenk-lcp", "cube-lp", "binary-mdp", "binary-game"
    ]


class ReduceResponse(BaseModel):
    reduced: dict[str, Any]
    trace: dict[str, Any]
    witness: Optional[dict[str, Any]] = None


class RecoverRequest(BaseModel):
    trace: dict[str, Any]
    solution: dict[str, Any]


class RecoverResponse(BaseModel):
    solution: dict[str, Any]
    verified: bool


class UsoRequest(BaseModel):
    problem: ProblemPayload
    check: bool = False
    dot: bool = False


class UsoResponse(BaseModel):
    uso: dict[str, Any]
    is_uso: Optional[bool] = None
    dot: Optional[str] = None
    sink: Optional[list[list[int]]] = None


class VerifyRequest(BaseModel):
    problem: ProblemPayload
    solution: dict[str, Any]


class VerifyResponse(BaseModel):
    valid: bool
    detail: str = ""


class ErrorDetail(BaseModel):
    type: str
    message: str
    exit_code: int
