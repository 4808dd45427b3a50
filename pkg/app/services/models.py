"""Shared dataclasses and the error hierarchy for the service layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class PBWError(Exception):
    """Base exception for every domain failure raised by the engine."""

    code = "PBW_ERROR"

    def __init__(self, message: str, *, witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(slots=True)
class CheckResult:
    """Outcome of one verification: ok flag plus the smallest offending input."""

    name: str
    ok: bool
    witness: Any = None
    detail: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, name: str, detail: str = "", **extra: Any) -> "CheckResult":
        return cls(name=name, ok=True, detail=detail, extra=extra)

    @classmethod
    def failed(cls, name: str, witness: Any, detail: str = "", **extra: Any) -> "CheckResult":
        return cls(name=name, ok=False, witness=witness, detail=detail, extra=extra)
