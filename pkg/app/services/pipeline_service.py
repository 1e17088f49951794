import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.config import Settings
from app.exceptions import ConfigurationError
from app.models.partition import FittedArtifact, TransportMode
from app.schemas.conformal import RadiusChoice
from app.schemas.cpd import PredictionLine
from app.schemas.grid import GridPlan, GridSummary
from app.schemas.region import FigureExport, QuantileRegionExport
from app.services.base import TransportBaseService
from app.services.conformal_service import ConformalService
from app.services.cpd_service import CpdService
from app.services.grid_service import GridService
from app.services.partition_service import PartitionService
from app.services.semidiscrete_service import SemiDiscreteService
from app.utils import rng as rng_utils
from app.workers.handlers import get_handler_for_scenario

logger = logging.getLogger(__name__)

# 분위 영역 그림의 반지름 (r_α 는 별도 패널)
FIGURE_RADII = (0.8, 0.999, 1.0)
FIGURE_SAMPLE_SIZE = 99
FIGURE_ALPHA = 0.1


class PipelineService(TransportBaseService):
    """fit / predict / export / figures 명령이 쓰는 작업 흐름"""

    def __init__(
        self,
        grid_service: Optional[GridService] = None,
        partition_service: Optional[PartitionService] = None,
        conformal_service: Optional[ConformalService] = None,
        semidiscrete_service: Optional[SemiDiscreteService] = None,
        cpd_service: Optional[CpdService] = None,
        settings: Optional[Settings] = None,
    ):
        super().__init__(settings)
        self.grid_service = grid_service or GridService(settings=self.settings)
        self.partition_service = partition_service or PartitionService(settings=self.settings)
        self.conformal_service = conformal_service or ConformalService(
            partition_service=self.partition_service, settings=self.settings
        )
        self.semidiscrete_service = semidiscrete_service or SemiDiscreteService(
            grid_service=self.grid_service, partition_service=self.partition_service, settings=self.settings
        )
        self.cpd_service = cpd_service or CpdService(
            partition_service=self.partition_service,
            semidiscrete_service=self.semidiscrete_service,
            settings=self.settings,
        )

    # ==================== plan ====================

    def plan(
        self,
        n_plus_1: int,
        dim: int,
        alpha: Optional[float] = None,
        grid: Optional[Sequence[int]] = None,
        seed: Optional[int] = None,
        max_origin: Optional[int] = None,
    ) -> Tuple[GridPlan, Optional[RadiusChoice]]:
        direction_seed = rng_utils.derive_int(seed, "grid")
        if grid is not None:
            plan = self.grid_service.make_plan(n_plus_1, dim, grid, direction_seed)
        else:
            plan = self.grid_service.plan_decomposition(
                n_plus_1, dim, alpha_hint=alpha, direction_seed=direction_seed, max_origin=max_origin
            )
        choice = None
        if alpha is not None:
            choice = self.conformal_service.conformal_radius(self.grid_service.build_grid(plan), alpha)
        return plan, choice

    @staticmethod
    def summarize(plan: GridPlan, choice: Optional[RadiusChoice]) -> GridSummary:
        return GridSummary(
            n_plus_1=plan.n_plus_1,
            dim=plan.dim,
            n_radii=plan.n_radii,
            n_dirs=plan.n_dirs,
            n_origin=plan.n_origin,
            alpha=None if choice is None else choice.alpha,
            j_alpha=None if choice is None else choice.j_alpha,
            radius=None if choice is None else choice.radius,
            nominal_mass=None if choice is None else choice.nominal_mass,
            may_be_unbounded=False if choice is None else choice.may_be_unbounded,
        )

    # ==================== fit ====================

    def fit(
        self,
        scores,
        alpha: float,
        grid: Optional[Sequence[int]] = None,
        mode: TransportMode = TransportMode.DISCRETE,
        seed: Optional[int] = None,
        M: Optional[int] = None,
        mass_tol: Optional[float] = None,
    ) -> Tuple[FittedArtifact, GridSummary]:
        """점수 표 -> 그리드 -> r_α -> 할당 스트림 (준이산이면 라게르 가중치 포함)"""
        scores = self._validate_points(scores, None, "fit")
        n, dim = scores.shape
        semidiscrete = mode == TransportMode.SEMIDISCRETE
        plan, choice = self.plan(
            n + 1, dim, alpha=alpha, grid=grid, seed=seed, max_origin=1 if semidiscrete else None
        )
        if semidiscrete and plan.n_origin > 1:
            raise ConfigurationError(
                message="Invalid grid plan",
                detail=f"Semi-discrete mode allows at most one origin site, got n_o={plan.n_origin}"
            )
        target_grid = self.grid_service.build_grid(plan)
        seeds = {"grid": plan.direction_seed}
        if seed is not None:
            seeds["master"] = int(seed)

        diagram = None
        if semidiscrete:
            streams = rng_utils.fan_out(seed)
            diagram = self.semidiscrete_service.fit_for_grid(
                target_grid, M=M, mass_tol=mass_tol, rng=np.random.default_rng(streams["dual"])
            )
            moments = self.semidiscrete_service.cell_moments(diagram)
            diagram = replace(diagram, cell_counts=moments.counts)
            artifact = self.semidiscrete_service.fit_sd_partition(scores, moments, target_grid, diagram)
            seeds.update(artifact.seeds)
        else:
            artifact = self.partition_service.fit(scores, target_grid)
        artifact = replace(artifact, seeds=seeds)

        fitted = FittedArtifact(
            artifact=artifact,
            diagram=diagram,
            alpha=alpha,
            j_alpha=choice.j_alpha,
            radius=choice.radius,
            nominal_mass=choice.nominal_mass,
        )
        return fitted, self.summarize(plan, choice)

    # ==================== predict ====================

    def predict(
        self,
        fitted: FittedArtifact,
        prediction,
        candidates,
        cpd: bool = False,
        randomized: bool = False,
        seed: Optional[int] = None,
        radius: Optional[float] = None,
    ) -> List[PredictionLine]:
        """후보별 소속 판정, k*, norm_rank (+ vector_rank, randomized_norm)"""
        artifact = fitted.artifact
        if randomized and artifact.mode != TransportMode.SEMIDISCRETE:
            raise ConfigurationError(
                message="Mode mismatch",
                detail=f"--randomized needs a semidiscrete artifact, got {artifact.mode.value}"
            )
        r = fitted.radius if radius is None else radius
        if r is None:
            raise ConfigurationError(
                message="Invalid input",
                detail="Artifact carries no conformal radius; pass one explicitly"
            )
        prediction_set = self.conformal_service.predict_set(artifact, r, prediction)
        candidates = self._validate_points(candidates, artifact.dim, "predict")
        rng = rng_utils.stream(seed, "tau") if randomized else None

        lines = []
        mask = prediction_set.region.active_mask
        for y in candidates:
            if randomized:
                evaluation = self.cpd_service.cpd_evaluate_randomized(
                    y, prediction_set.prediction, artifact, fitted.diagram, rng
                )
            else:
                evaluation = self.cpd_service.cpd_evaluate(y, prediction_set.prediction, artifact)
            k = evaluation.assigned_index
            lines.append(PredictionLine(
                candidate=evaluation.candidate,
                member=bool(mask[k]),
                assigned_index=k,
                norm_rank=evaluation.norm_rank,
                vector_rank=evaluation.vector_rank if cpd else None,
                randomized_norm=evaluation.randomized_norm if randomized else None,
                monotonicity=evaluation.monotonicity if cpd else None,
            ))
        return lines

    # ==================== export ====================

    def export(self, fitted: FittedArtifact, r: float, prediction=None, include_scores: bool = False) -> QuantileRegionExport:
        region = self.conformal_service.quantile_region(fitted.artifact, r)
        return self.conformal_service.export_region(region, prediction=prediction, include_scores=include_scores)

    # ==================== figures ====================

    def figures(self, seed: Optional[int] = None) -> List[FigureExport]:
        """활성 셀 (r = 0.8, 0.999, 1, r_α), 가우시안 / 바나나 분위 영역"""
        gaussian = self._figure_fit("gaussian", seed)
        banana = self._figure_fit("banana", seed)

        cell_panels = [self.export(gaussian, r, include_scores=True) for r in FIGURE_RADII]
        cell_panels.append(self.export(gaussian, gaussian.radius, include_scores=True))
        return [
            FigureExport(
                name="active_cells",
                description="Active cells of the quantile region for increasing radius (last panel at r_alpha)",
                panels=cell_panels,
            ),
            FigureExport(
                name="gaussian",
                description="Quantile region at r_alpha for anisotropic Gaussian scores, Sigma=[[1,0.8],[0.8,1]]",
                panels=[self.export(gaussian, gaussian.radius, include_scores=True)],
            ),
            FigureExport(
                name="banana",
                description="Quantile region at r_alpha for skewed banana scores rotated by 45 degrees",
                panels=[self.export(banana, banana.radius, include_scores=True)],
            ),
        ]

    def _figure_fit(self, scenario: str, seed: Optional[int]) -> FittedArtifact:
        handler = get_handler_for_scenario(scenario)
        scores = handler(FIGURE_SAMPLE_SIZE, rng_utils.stream(seed, "scenario"))
        fitted, summary = self.fit(scores, FIGURE_ALPHA, seed=seed)
        logger.info(
            f"Figure data for {scenario}: grid=({summary.n_radii},{summary.n_dirs},{summary.n_origin}), r={summary.radius}"
        )
        return fitted
