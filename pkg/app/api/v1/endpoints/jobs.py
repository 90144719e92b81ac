from fastapi import APIRouter, Depends, HTTPException

from app.api.v1.deps import job_settings
from app.core.config import Settings
from app.core.monitoring import timeit
from app.schemas.job_schemas import JobReport, JobSpec
from app.services.jobs import EXIT_INPUT_ERROR, run

router = APIRouter()


@router.post("", response_model=JobReport)
@timeit
def run_job(job: JobSpec, settings: Settings = Depends(job_settings)):
    """
    Run a job and return the same report as ``holoweb <command> --json``.

    A false verdict (e.g. a first integral that does not verify) is a
    successful request; rejected input is a 400 with the error message.

    Args:
        job (JobSpec): Command and inputs.
        settings (Settings): Defaults for unset options.

    Returns:
        JobReport: The report.

    Raises:
        HTTPException: 400 on rejected input, 500 on unexpected failures.
    """
    try:
        outcome = run(job, settings)
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Job failed: {str(e)}")
    if outcome.exit_code == EXIT_INPUT_ERROR:
        raise HTTPException(status_code=400, detail=outcome.report.result["error"])
    return outcome.report
