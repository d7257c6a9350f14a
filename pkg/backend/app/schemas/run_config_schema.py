from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator

Command = Literal["triangle", "harmonic", "convpoly", "eulersum", "verify"]
OutputFormat = Literal["json", "csv"]


class RunConfig(BaseModel):
    command: Command
    f: str = "linear:1,0"
    t: str = "1"
    output_format: OutputFormat = "json"
    output: Path | None = None
    verbose: bool = False

    kind: Literal["s1", "s2"] = "s1"
    normalization: Literal["printed", "newton"] = "newton"
    rows: int | None = Field(default=None, ge=0)

    p: int = Field(default=1, ge=1)
    n: int = Field(default=0, ge=0)
    method: Literal["direct", "ftilde", "roots", "subst"] = "direct"

    x: int | None = None
    variant: Literal["sigma", "sigma_tilde"] = "sigma"
    fit: bool = False

    r: int = Field(default=2, ge=1)
    terms: int | None = Field(default=None, ge=1)
    mode: Literal["harmonic_over_f", "fzeta", "fzeta2r"] = "harmonic_over_f"
    decimal: int | None = Field(default=None, ge=1)

    suite: str = "all"
    max_n: int = Field(default=8, ge=1)

    @model_validator(mode="after")
    def check_command_flags(self) -> "RunConfig":
        if self.output_format == "csv" and self.command not in ("triangle", "verify"):
            raise ValueError(f"CSV output is only available for triangle and verify, not {self.command}.")
        if self.command == "convpoly" and self.x is None:
            raise ValueError("convpoly needs --x.")
        if self.command == "triangle" and self.rows is None:
            raise ValueError("triangle needs --rows.")
        return self
