import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

ENV_PREFIX = "HOLOWEB_"


class Settings(BaseModel):
    """
    Numeric defaults shared by the CLI, the HTTP surface and the services.

    Attributes:
        tol (float): Generic comparison tolerance (fibers, classifier).
        samples (int): Monte-Carlo base points for Brill's condition.
        seed (int): Seed of every sampling routine.
        step (float): Leaf tracer step length.
        steps (int): Leaf tracer step count.
        theta (float): Direction of complex time e^{i theta} for traces.
        max_denominator (int): Largest denominator accepted for eigenvalue ratios.
        residual_bound (float): Largest |F| tolerated along a trace.
        brill_tolerance (float): Flatness tolerance of the Brill check.
        log_level (str): Root logging level.
    """
    tol: float = 1e-6
    samples: int = 20
    seed: int = 0
    step: float = 1e-3
    steps: int = 10_000
    theta: float = 0.0
    max_denominator: int = 50
    residual_bound: float = 1e-6
    brill_tolerance: float = 1e-8
    log_level: str = "INFO"


def load_settings() -> Settings:
    """
    Load settings from the environment, reading a ``.env`` file first.

    Each field can be overridden by ``HOLOWEB_<FIELD>`` (upper case).

    Returns:
        Settings: The resolved settings.

    Raises:
        ValueError: If an environment variable holds a value of the wrong type.
    """
    load_dotenv()
    overrides = {}
    for field in Settings.model_fields:
        value = os.getenv(f"{ENV_PREFIX}{field.upper()}")
        if value is not None:
            overrides[field] = value
    try:
        return Settings(**overrides)
    except ValidationError as e:
        names = ", ".join(f"{ENV_PREFIX}{str(err['loc'][0]).upper()}" for err in e.errors())
        raise ValueError(f"Invalid environment variable(s): {names}") from e


@lru_cache
def get_settings() -> Settings:
    return load_settings()
