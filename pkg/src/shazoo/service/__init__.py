"""REST service wrapping the core package (FastAPI + pydantic models)."""

from . import handlers, models

__all__ = ["handlers", "models"]
