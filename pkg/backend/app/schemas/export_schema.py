from typing import Any

from pydantic import BaseModel


class LaurentPolyPayload(BaseModel):
    var: str
    terms: dict[str, str]


class TriangleExport(BaseModel):
    f: str
    t: str
    kind: str = "s1"
    rows: list[list[LaurentPolyPayload]]


class SeriesExport(BaseModel):
    var: str
    order: int
    coeffs: list[Any]


class ValueExport(BaseModel):
    quantity: str
    params: dict[str, Any] = {}
    value: str
    decimal: str | None = None
