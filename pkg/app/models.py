"""Pydantic schemas for input files and machine-readable reports.

Algebra and triple files are the on-disk form of the fixtures under ``data/``;
``RunReport`` is what the command line prints. Rationals travel as strings
("p/q", or "p" when q == 1) and are validated here so the services only ever
see well-formed values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, Field, model_validator


def _check_rational(value: str | int) -> str:
    try:
        Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {value!r}") from exc
    return str(value).strip()


RationalStr = Annotated[str, BeforeValidator(_check_rational)]


class BasisEntry(BaseModel):
    name: str = Field(..., min_length=1, description="기저 벡터 이름")
    degree: int = Field(default=0, description="정수 차수 (홀짝성이 Koszul 부호를 결정)")


class TermEntry(BaseModel):
    basis: str
    coeff: RationalStr = "1"


class BracketEntry(BaseModel):
    left: str
    right: str
    result: list[TermEntry] = Field(default_factory=list)


class AlgebraFile(BaseModel):
    name: str
    basis: list[BasisEntry]
    brackets: list[BracketEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _names_known(self) -> "AlgebraFile":
        names = [entry.name for entry in self.basis]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate basis names: {names}")
        known = set(names)
        for bracket in self.brackets:
            for name in [bracket.left, bracket.right, *(term.basis for term in bracket.result)]:
                if name not in known:
                    raise ValueError(f"bracket refers to unknown basis vector {name!r}")
        return self


class TripleFile(AlgebraFile):
    subalgebra: list[str] = Field(..., description="부분대수 h 의 기저 이름")
    complement: list[str] = Field(..., description="여공간 n 의 기저 이름")


class TopEntry(BaseModel):
    label: str
    value: list[dict[str, str]] = Field(
        default_factory=list,
        description='S^l V 원소: [{"monomial": "x*y", "coeff": "1/2"}, ...]',
    )


class TopFile(BaseModel):
    """Top component a_l: one S^l V element per label of the source X."""

    ell: int = Field(..., ge=0)
    entries: list[TopEntry]


class CheckRecord(BaseModel):
    check_name: str
    status: Literal["PASS", "FAIL", "SKIP"]
    detail: str = ""
    witness: Any = None


class RunReport(BaseModel):
    command: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    results: list[CheckRecord] = Field(default_factory=list)
    data: Any = None
    exit_status: int = 0
    pretty: bool = Field(default=False, exclude=True, description="--pretty 로 텍스트 표 출력")

    def add(self, record: CheckRecord) -> None:
        self.results.append(record)

    def finalize(self) -> "RunReport":
        if self.exit_status != 2:
            self.exit_status = 1 if any(r.status == "FAIL" for r in self.results) else 0
        return self
