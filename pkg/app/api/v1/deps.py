from fastapi import HTTPException

from app.core.config import Settings, get_settings


def job_settings() -> Settings:
    """
    Resolve the configured defaults for a job request.

    Returns:
        Settings: Cached settings loaded from the environment.

    Raises:
        HTTPException: If the environment holds invalid values.
    """
    try:
        return get_settings()
    except ValueError as e:
        raise HTTPException(status_code=500, detail=str(e))
