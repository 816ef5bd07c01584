"""
Configuration
Environment-driven defaults and the validated configuration of a single CLI run.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import InputError


class Settings(BaseSettings):
    """Defaults, overridable through PERMORB_* environment variables or a .env file."""

    model_config = SettingsConfigDict(env_prefix="PERMORB_", env_file=".env", extra="ignore")

    precision: int = 60
    tolerance: float = 1e-30
    budget: int = 10**7
    max_k: int = 24
    log_level: str = "INFO"


class Engine(str, Enum):
    THEOREM = "theorem"
    GENERIC = "generic"
    BOTH = "both"


class ReportFormat(str, Enum):
    HUMAN = "human"
    MACHINE = "machine"


class RunConfig(BaseModel):
    """Everything one subcommand needs: input source, k, numerics, engine and output."""

    input_path: Optional[str] = None
    builtin: Optional[str] = None
    central_charge: Optional[str] = None
    n: Optional[int] = None
    k: int = 1
    precision: int = 60
    tolerance: float = 1e-30
    engine: Engine = Engine.THEOREM
    output: Optional[str] = None
    report_format: ReportFormat = ReportFormat.HUMAN
    budget: int = 10**7
    max_k: int = 24

    @field_validator("k")
    @classmethod
    def check_k(cls, value: int) -> int:
        if value < 1:
            raise ValueError("k must be at least 1")
        return value

    @field_validator("precision")
    @classmethod
    def check_precision(cls, value: int) -> int:
        if value < 50:
            raise ValueError("precision must be at least 50 digits")
        return value

    @field_validator("tolerance")
    @classmethod
    def check_tolerance(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerance must be positive")
        return value

    @model_validator(mode="after")
    def check_source(self) -> "RunConfig":
        if (self.input_path is None) == (self.builtin is None):
            raise ValueError("exactly one of an input file or --builtin is required")
        return self


def build_run_config(**values) -> RunConfig:
    """Construct a RunConfig, turning pydantic failures into InputError."""
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise InputError("Invalid run configuration", detail=str(e)) from e
