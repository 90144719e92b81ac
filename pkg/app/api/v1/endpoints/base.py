from importlib.metadata import PackageNotFoundError, version

from fastapi import APIRouter

router = APIRouter()


def _package_version() -> str:
    try:
        return version("holoweb")
    except PackageNotFoundError:
        return "0.1.0"


@router.get("/")
async def root():
    return {"name": "holoweb", "version": _package_version()}
