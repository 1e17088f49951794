from typing import Optional

from app.config import Settings, get_settings
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.score_table_repository import ScoreTableRepository
from app.services.conformal_service import ConformalService
from app.services.cpd_service import CpdService
from app.services.grid_service import GridService
from app.services.partition_service import PartitionService
from app.services.pipeline_service import PipelineService
from app.services.score_service import ScoreService
from app.services.semidiscrete_service import SemiDiscreteService
from app.services.simulation_service import SimulationService


def get_grid_service(settings: Optional[Settings] = None) -> GridService:
    """GridService 의존성 주입"""
    return GridService(settings=settings or get_settings())


def get_partition_service(settings: Optional[Settings] = None) -> PartitionService:
    """PartitionService 의존성 주입"""
    return PartitionService(settings=settings or get_settings())


def get_conformal_service(
    settings: Optional[Settings] = None,
    partition_service: Optional[PartitionService] = None,
) -> ConformalService:
    """ConformalService 의존성 주입"""
    settings = settings or get_settings()
    return ConformalService(
        partition_service=partition_service or get_partition_service(settings),
        settings=settings,
    )


def get_semidiscrete_service(
    settings: Optional[Settings] = None,
    partition_service: Optional[PartitionService] = None,
) -> SemiDiscreteService:
    """SemiDiscreteService 의존성 주입"""
    settings = settings or get_settings()
    return SemiDiscreteService(
        grid_service=get_grid_service(settings),
        partition_service=partition_service or get_partition_service(settings),
        settings=settings,
    )


def get_cpd_service(
    settings: Optional[Settings] = None,
    partition_service: Optional[PartitionService] = None,
) -> CpdService:
    """CpdService 의존성 주입"""
    settings = settings or get_settings()
    partition_service = partition_service or get_partition_service(settings)
    return CpdService(
        partition_service=partition_service,
        semidiscrete_service=get_semidiscrete_service(settings, partition_service),
        settings=settings,
    )


def get_score_service(settings: Optional[Settings] = None) -> ScoreService:
    """ScoreService 의존성 주입"""
    return ScoreService(settings=settings or get_settings())


def get_simulation_service(settings: Optional[Settings] = None, handle_signals: bool = True) -> SimulationService:
    """SimulationService 의존성 주입 (CLI 는 SIGINT 시 현재 배치 후 중단)"""
    settings = settings or get_settings()
    grid_service = get_grid_service(settings)
    partition_service = get_partition_service(settings)
    return SimulationService(
        grid_service=grid_service,
        partition_service=partition_service,
        conformal_service=get_conformal_service(settings, partition_service),
        semidiscrete_service=SemiDiscreteService(
            grid_service=grid_service, partition_service=partition_service, settings=settings
        ),
        settings=settings,
        handle_signals=handle_signals,
    )


def get_artifact_repository(include_meta: bool = True) -> ArtifactRepository:
    """ArtifactRepository 의존성 주입"""
    return ArtifactRepository(include_meta=include_meta)


def get_score_table_repository() -> ScoreTableRepository:
    """ScoreTableRepository 의존성 주입"""
    return ScoreTableRepository()


def get_pipeline_service(settings: Optional[Settings] = None) -> PipelineService:
    """PipelineService 의존성 주입"""
    settings = settings or get_settings()
    grid_service = get_grid_service(settings)
    partition_service = get_partition_service(settings)
    return PipelineService(
        grid_service=grid_service,
        partition_service=partition_service,
        conformal_service=get_conformal_service(settings, partition_service),
        semidiscrete_service=SemiDiscreteService(
            grid_service=grid_service, partition_service=partition_service, settings=settings
        ),
        settings=settings,
    )
