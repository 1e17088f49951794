"""
Dependencies module - 서비스/저장소 조립 함수 재export
"""
from __future__ import annotations

from app.dependencies.error_handlers import with_error_handlers
from app.dependencies.services import (
    get_artifact_repository,
    get_conformal_service,
    get_cpd_service,
    get_grid_service,
    get_partition_service,
    get_pipeline_service,
    get_score_service,
    get_score_table_repository,
    get_semidiscrete_service,
    get_simulation_service,
)

__all__ = [
    "with_error_handlers",
    "get_artifact_repository",
    "get_conformal_service",
    "get_cpd_service",
    "get_grid_service",
    "get_partition_service",
    "get_pipeline_service",
    "get_score_service",
    "get_score_table_repository",
    "get_semidiscrete_service",
    "get_simulation_service",
]
