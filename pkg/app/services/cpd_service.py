import logging
from typing import Optional

import numpy as np
from scipy import stats

from app.config import Settings
from app.exceptions import ConfigurationError, InputError
from app.models.laguerre import LaguerreDiagram
from app.models.partition import PartitionArtifact, TransportMode
from app.models.score import ScoreVector
from app.schemas.conformal import KsReport, ScenarioConfig
from app.schemas.cpd import CpdEvaluation, DempsterHillInterval
from app.services.base import TransportBaseService
from app.services.partition_service import PartitionService
from app.services.semidiscrete_service import SemiDiscreteService
from app.utils import rng as rng_utils
from app.workers.handlers import get_handler_for_scenario, get_scenario_dim
from app.workers.replication_worker import ReplicationWorker

logger = logging.getLogger(__name__)

MONOTONE = "guaranteed"
NOT_MONOTONE = "monotonicity not guaranteed"


def ks_uniform(values, label: str) -> KsReport:
    """Uniform(0,1) 대비 KS, 5% 임계값 1.36/√reps"""
    values = np.asarray(values, dtype=float)
    result = stats.kstest(values, "uniform")
    critical = 1.36 / np.sqrt(values.shape[0])
    return KsReport(
        label=label,
        reps=int(values.shape[0]),
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        critical_value=float(critical),
        passed=bool(result.statistic < critical),
    )


class CpdService(TransportBaseService):
    """다변량 등각 예측 분포 (보수적 / 무작위) 와 1차원 Dempster–Hill"""

    def __init__(
        self,
        partition_service: Optional[PartitionService] = None,
        semidiscrete_service: Optional[SemiDiscreteService] = None,
        settings: Optional[Settings] = None,
    ):
        super().__init__(settings)
        self.partition_service = partition_service or PartitionService(settings=self.settings)
        self.semidiscrete_service = semidiscrete_service or SemiDiscreteService(
            partition_service=self.partition_service, settings=self.settings
        )

    # ==================== 벡터 CPD ====================

    def cpd_evaluate(
        self,
        y,
        prediction,
        artifact: PartitionArtifact,
        score: Optional[ScoreVector] = None,
    ) -> CpdEvaluation:
        """보수적 모드: vector_rank = ψ(S(x, y)), 무작위성 없음"""
        y = self._validate_vector(y, artifact.dim, "cpd_evaluate")
        score_values, tag = self._score(y, prediction, artifact, score)
        result = self.partition_service.assign(artifact, score_values)
        k = result.index
        return CpdEvaluation(
            candidate=y.tolist(),
            score=score_values.tolist(),
            assigned_index=k,
            vector_rank=artifact.grid.points[k].tolist(),
            norm_rank=float(artifact.target_norms[k]),
            monotonicity=tag,
        )

    def cpd_evaluate_randomized(
        self,
        y,
        prediction,
        sd_artifact: PartitionArtifact,
        diagram: Optional[LaguerreDiagram],
        rng,
        score: Optional[ScoreVector] = None,
    ) -> CpdEvaluation:
        """무작위 모드: 배정 셀 안의 u ~ U(· | A_k*)"""
        if sd_artifact.mode != TransportMode.SEMIDISCRETE:
            raise ConfigurationError(
                message="Mode mismatch",
                detail="Randomized evaluation requires a semidiscrete artifact"
            )
        evaluation = self.cpd_evaluate(y, prediction, sd_artifact, score)
        point = self.semidiscrete_service.sample_in_cell(
            evaluation.assigned_index, sd_artifact.grid, diagram, rng
        )
        evaluation.randomized_point = point.tolist()
        evaluation.randomized_norm = float(np.linalg.norm(point))
        return evaluation

    def _score(self, y, prediction, artifact: PartitionArtifact, score: Optional[ScoreVector]):
        if score is None:
            prediction = self._validate_vector(prediction, artifact.dim, "cpd_evaluate")
            return y - prediction, MONOTONE
        values = self._validate_vector(score.values, artifact.dim, "cpd_evaluate")
        if score.monotone:
            return values, MONOTONE
        logger.warning("Score is not a monotone residual: the transport map is not guaranteed to be monotone in y")
        return values, NOT_MONOTONE

    # ==================== Dempster–Hill ====================

    def dempster_hill(self, y: float, sample, tau: Optional[float] = None) -> DempsterHillInterval:
        """Q(y, τ) = (#{α_i < y} + τ·#{α_i = y}) / (n+1), y 자신 포함"""
        values = self._validate_finite(np.atleast_1d(sample), "dempster_hill").ravel()
        y = float(self._validate_finite(y, "dempster_hill"))
        if tau is not None and not 0 <= tau <= 1:
            raise InputError(
                message="Invalid input",
                detail=f"tau must lie in [0, 1], got {tau}"
            )
        size = values.shape[0] + 1
        below = int(np.sum(values < y))
        ties = int(np.sum(values == y)) + 1
        return DempsterHillInterval(
            lower=below / size,
            upper=(below + ties) / size,
            randomized_value=None if tau is None else (below + tau * ties) / size,
        )

    def dh_pit_suite(self, config: ScenarioConfig, reps: Optional[int] = None, seed: Optional[int] = None) -> KsReport:
        """교환 가능 복제에서 Q(y_{n+1}, τ) 의 KS 검정

        config.tau 가 주어지면 τ 고정 (τ=0 은 비무작위 대조군).
        """
        handler = get_handler_for_scenario(config.scenario)
        if get_scenario_dim(config.scenario) != 1:
            raise ConfigurationError(
                message="Invalid input",
                detail=f"Dempster-Hill suite needs a 1D scenario, got {config.scenario}"
            )
        reps = config.reps if reps is None else reps
        seed = config.seed if seed is None else seed
        streams = rng_utils.fan_out(seed)
        n = config.n

        def replicate(index: int, rngs) -> float:
            draws = handler(n + 1, rngs["scenario"]).ravel()
            tau = config.tau if config.tau is not None else float(rngs["tau"].random())
            return self.dempster_hill(draws[n], draws[:n], tau).randomized_value

        worker = ReplicationWorker(
            replicate,
            streams={"scenario": streams["scenario"], "tau": streams["tau"]},
            batch_size=self.settings.batch_size,
        )
        values = worker.run(reps)
        label = "dempster-hill" if config.tau is None else f"dempster-hill tau={config.tau}"
        return ks_uniform(values, label)
