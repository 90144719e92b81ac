from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, field_validator

from app.core.config import Settings


class Command(str, Enum):
    VALIDATE = "validate"
    LIFT = "lift"
    DISCRIMINANT = "discriminant"
    VERIFY_FI = "verify-fi"
    LEVIFLAT = "leviflat"
    CHARPOLY = "charpoly"
    CLAIRAUT = "clairaut"
    TRACE = "trace"
    CLASSIFY = "classify"


class JobOptions(BaseModel):
    """
        Numeric options of a job; every field has a documented default.

        Attributes:
        - seed (int): Seed of the Brill sampler.
        - samples (int): Base points sampled by the Brill check.
        - tol (float): Fiber clustering and classifier tolerance.
        - step (float): Arc-length step of the leaf tracer.
        - steps (int): Number of tracer steps.
        - theta (float): Complex-time direction of traces.
        - max_denominator (int): Largest accepted denominator of eigenvalue ratios.
        - residual_bound (float): Largest |F| accepted along a trace.
        - brill_tolerance (float): Flatness tolerance of the Brill check.
    """
    seed: int = 0
    samples: PositiveInt = 20
    tol: PositiveFloat = 1e-6
    step: PositiveFloat = 1e-3
    steps: int = Field(default=10_000, ge=0)
    theta: float = 0.0
    max_denominator: PositiveInt = 50
    residual_bound: PositiveFloat = 1e-6
    brill_tolerance: PositiveFloat = 1e-8

    @classmethod
    def from_settings(cls, settings: Settings) -> "JobOptions":
        return cls(**settings.model_dump(include=set(cls.model_fields)))


class JobSpec(BaseModel):
    """
        A single command with its inputs.

        Inputs are file paths or inline strings, read by the formats of the
        services: ``web`` and ``fi`` accept either, ``clairaut`` is a
        polynomial in p, ``function`` a polynomial in x, y, p, ``point`` and
        ``s0`` comma separated complex numbers.

        Attributes:
        - command (Command): What to run.
        - options (JobOptions | None): Overrides; unset means the configured defaults.
    """
    command: Command
    web: Optional[str] = None
    fi: Optional[str] = None
    clairaut: Optional[str] = None
    plane: Optional[str] = None
    point: Optional[str] = None
    function: Optional[str] = None
    s0: Optional[str] = None
    csv: Optional[str] = None
    options: Optional[JobOptions] = None

    @field_validator("web", "fi", "clairaut", "plane", "point", "function", "s0", "csv")
    def validate_not_blank(cls, value):
        if value is not None and not value.strip():
            raise ValueError("Inputs must not be blank")
        return value


class JobReport(BaseModel):
    """
        Report printed by the CLI (``--json``) and returned by ``POST /api/v1/jobs``.

        Attributes:
        - command (str): The command that ran.
        - options (dict): The resolved options.
        - result (dict): Command-specific results; polynomials as grammar strings.
        - diagnostics (list[str]): Warnings raised while running.
    """
    command: str
    options: dict[str, Any]
    result: dict[str, Any]
    diagnostics: list[str] = Field(default_factory=list)
