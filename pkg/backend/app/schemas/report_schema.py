from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class ReportCell(BaseModel):
    indices: list[int]
    lhs: str
    rhs: str
    residual: str
    passed: bool = Field(alias="pass")
    note: str | None = None

    model_config = ConfigDict(populate_by_name=True)


class VerificationReport(BaseModel):
    identity: str
    params: dict[str, Any] = {}
    cells: list[ReportCell] = []
    advisory: bool = False
    notes: list[str] = []

    @property
    def passed(self) -> bool:
        return all(cell.passed for cell in self.cells)

    @property
    def failures(self) -> list[ReportCell]:
        return [cell for cell in self.cells if not cell.passed]
