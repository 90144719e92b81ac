from fastapi import FastAPI

from app.api.v1.endpoints.base import router as base_router
from app.api.v1.endpoints.jobs import router as jobs_router

app = FastAPI(title="holoweb")

app.include_router(base_router, prefix="/api/v1", tags=["base"])
app.include_router(jobs_router, prefix="/api/v1/jobs", tags=["jobs"])

if __name__ == '__main__':
    import uvicorn

    from app.core.config import get_settings
    from app.core.monitoring import setup_logging

    setup_logging(get_settings().log_level)
    uvicorn.run("main:app", host="0.0.0.0", port=8000, log_level="debug", reload=True)
