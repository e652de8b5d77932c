# app/config.py

import os
from pydantic import BaseModel

TOOL_VERSION = "0.4.0"


class Settings(BaseModel):
    max_group: int = 1_000_000
    max_events: int = 50_000
    max_event_pairs: int = 5_000_000
    max_vertex_dim: int = 64
    max_assignments: int = 100_000
    max_bijection_checks: int = 10_000_000
    database: str = "test_spaces.db"
    log_level: str = "WARNING"


def get_settings() -> Settings:
    """Reads the caps from the environment, falling back to the defaults."""
    return Settings(
        max_group=int(os.getenv("TSL_MAX_GROUP", "1000000")),
        max_events=int(os.getenv("TSL_MAX_EVENTS", "50000")),
        max_event_pairs=int(os.getenv("TSL_MAX_EVENT_PAIRS", "5000000")),
        max_vertex_dim=int(os.getenv("TSL_MAX_VERTEX_DIM", "64")),
        max_assignments=int(os.getenv("TSL_MAX_ASSIGNMENTS", "100000")),
        max_bijection_checks=int(os.getenv("TSL_MAX_BIJECTION_CHECKS", "10000000")),
        database=os.getenv("TSL_DATABASE", "test_spaces.db"),
        log_level=os.getenv("TSL_LOG_LEVEL", "WARNING"),
    )
