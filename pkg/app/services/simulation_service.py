import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from app.config import Settings
from app.exceptions import ConfigurationError
from app.models.grid import SphericalGrid
from app.schemas.conformal import (
    CoverageReport,
    PitHistogram,
    RandomizedPitReport,
    ScenarioConfig,
    SimulationMethod,
)
from app.services.base import TransportBaseService
from app.services.conformal_service import NORM_EPS, ConformalService
from app.services.cpd_service import ks_uniform
from app.services.grid_service import GridService
from app.services.lap import AssignmentSolver
from app.services.partition_service import PartitionService, transport_cost_matrix
from app.services.semidiscrete_service import SemiDiscreteService
from app.utils import rng as rng_utils
from app.workers.handlers import get_handler_for_scenario, get_scenario_dim
from app.workers.replication_worker import ReplicationWorker

logger = logging.getLogger(__name__)


class SimulationService(TransportBaseService):
    """커버리지 / PIT 몬테카를로 하네스

    복제마다 보정 집합을 새로 뽑는다 (보정과 시험 무작위성 모두에 대한 주변 커버리지).
    기본 방법은 증강 (n+1) 점 할당의 마지막 행을 읽는 것이고,
    이는 스트림 k*(Z_{n+1}) 와 같다.
    """

    def __init__(
        self,
        grid_service: Optional[GridService] = None,
        partition_service: Optional[PartitionService] = None,
        conformal_service: Optional[ConformalService] = None,
        semidiscrete_service: Optional[SemiDiscreteService] = None,
        settings: Optional[Settings] = None,
        handle_signals: bool = False,
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
        self.fast_solver = AssignmentSolver(settings=self.settings, canonical=False)
        self.handle_signals = handle_signals

    # ==================== 공통 ====================

    def scenario_grid(self, config: ScenarioConfig, max_origin: Optional[int] = None) -> SphericalGrid:
        dim = get_scenario_dim(config.scenario)
        direction_seed = rng_utils.derive_int(config.seed, "grid")
        if config.grid is not None:
            plan = self.grid_service.make_plan(config.n + 1, dim, config.grid, direction_seed)
        else:
            plan = self.grid_service.plan_decomposition(
                config.n + 1, dim, alpha_hint=config.alpha, direction_seed=direction_seed, max_origin=max_origin
            )
        return self.grid_service.build_grid(plan)

    def _query_index(self, scores: np.ndarray, grid: SphericalGrid, method: SimulationMethod) -> int:
        """마지막 점 Z_{n+1} 이 배정되는 타깃 인덱스"""
        n = scores.shape[0] - 1
        if method == SimulationMethod.STREAM:
            artifact = self.partition_service.fit(scores[:n], grid)
            return self.partition_service.assign(artifact, scores[n]).index
        second = np.sum(grid.points * grid.points, axis=1)
        cost = transport_cost_matrix(scores, grid.points, second)
        return int(self.fast_solver.solve(cost).mapping[n])

    def _worker(self, replicate, seed: Optional[int], names: Tuple[str, ...] = ("scenario",)) -> ReplicationWorker:
        streams = rng_utils.fan_out(seed)
        return ReplicationWorker(
            replicate,
            streams={name: streams[name] for name in names},
            batch_size=self.settings.batch_size,
            handle_signals=self.handle_signals,
        )

    # ==================== 커버리지 ====================

    def simulate_coverage(self, config: ScenarioConfig) -> CoverageReport:
        """r_α 에서의 소속 비율 (d=1 이면 고전 순위 구간 기준선 동반)"""
        handler = get_handler_for_scenario(config.scenario)
        grid = self.scenario_grid(config)
        choice = self.conformal_service.conformal_radius(grid, config.alpha)
        n = config.n
        with_baseline = grid.dim == 1

        def replicate(index: int, rngs) -> Tuple[bool, Optional[bool]]:
            scores = handler(n + 1, rngs["scenario"])
            k = self._query_index(scores, grid, config.method)
            hit = bool(grid.norms[k] <= choice.radius + NORM_EPS)
            baseline_hit = None
            if with_baseline:
                low, high, _ = ConformalService.classical_interval(scores[:n, 0], config.alpha)
                baseline_hit = bool(low <= scores[n, 0] <= high)
            return hit, baseline_hit

        results = self._worker(replicate, config.seed).run(config.reps)
        trials = len(results)
        hits = sum(1 for hit, _ in results if hit)
        nominal = choice.nominal_mass

        baseline_coverage = baseline_nominal = None
        if with_baseline and trials:
            baseline_coverage = sum(1 for _, b in results if b) / trials
            baseline_nominal = ConformalService.classical_interval(np.zeros(n), config.alpha)[2]

        return CoverageReport(
            scenario=config.scenario,
            n=n,
            alpha=config.alpha,
            trials=trials,
            hits=hits,
            empirical_coverage=hits / trials if trials else 0.0,
            nominal=nominal,
            binomial_95_halfwidth=1.96 * math.sqrt(nominal * (1 - nominal) / max(trials, 1)),
            baseline_coverage=baseline_coverage,
            baseline_nominal=baseline_nominal,
        )

    # ==================== PIT ====================

    def pit_histogram(self, config: ScenarioConfig, grid: Optional[SphericalGrid] = None) -> PitHistogram:
        """‖ψ(Z_{n+1})‖ 껍질별 빈도와 이산 법칙 대비 카이제곱

        d=1 은 부호 있는 위치 (−1, …, 0, …, 1) 로 집계한다.
        """
        handler = get_handler_for_scenario(config.scenario)
        grid = grid or self.scenario_grid(config)
        n = config.n
        signed = grid.dim == 1

        positions, expected, slot_of = self._pit_layout(grid, signed)

        def replicate(index: int, rngs) -> int:
            scores = handler(n + 1, rngs["scenario"])
            return int(slot_of[self._query_index(scores, grid, config.method)])

        slots = self._worker(replicate, config.seed).run(config.reps)
        trials = len(slots)
        counts = np.bincount(np.asarray(slots, dtype=np.int64), minlength=len(positions))

        chi2_statistic = chi2_pvalue = None
        keep = expected > 0
        if trials and np.count_nonzero(keep) >= 2:
            result = stats.chisquare(counts[keep], f_exp=expected[keep] * trials)
            chi2_statistic, chi2_pvalue = float(result.statistic), float(result.pvalue)

        return PitHistogram(
            scenario=config.scenario,
            trials=trials,
            signed=signed,
            positions=[float(p) for p in positions],
            counts=[int(c) for c in counts],
            frequencies=[float(c) / trials if trials else 0.0 for c in counts],
            expected=[float(e) for e in expected],
            chi2_statistic=chi2_statistic,
            chi2_pvalue=chi2_pvalue,
        )

    @staticmethod
    def _pit_layout(grid: SphericalGrid, signed: bool):
        """(위치 목록, 기대 질량, 타깃 인덱스 -> 위치 번호)"""
        if not signed:
            # n_o = 0 이어도 껍질 0 은 표에 남긴다
            shells = np.arange(grid.n_radii + 1) / grid.n_radii
            expected = np.array([grid.shell_mass(j) for j in range(grid.n_radii + 1)])
            return shells, expected, grid.shells
        values = np.sign(grid.points[:, 0]) * grid.norms
        positions, slot_of = np.unique(values, return_inverse=True)
        expected = np.bincount(slot_of, minlength=positions.shape[0]) / grid.size
        return positions, expected, slot_of

    # ==================== 무작위 준이산 PIT ====================

    def randomized_pit(self, config: ScenarioConfig) -> RandomizedPitReport:
        """적합된 라게르 다이어그램 하나로 교환 가능 복제

        k* 는 기대 비용 행렬의 증강 할당 마지막 행, u 는 셀 A_k* 내 기각 샘플.
        """
        handler = get_handler_for_scenario(config.scenario)
        grid = self.scenario_grid(config, max_origin=1)
        if grid.n_origin > 1:
            raise ConfigurationError(
                message="Invalid grid plan",
                detail=f"Semi-discrete mode allows at most one origin site, got n_o={grid.n_origin}"
            )
        streams = rng_utils.fan_out(config.seed)
        diagram = self.semidiscrete_service.fit_for_grid(
            grid,
            M=config.mc_sample_size,
            mass_tol=config.mass_tol,
            rng=np.random.default_rng(streams["dual"]),
        )
        moments = self.semidiscrete_service.cell_moments(diagram)
        n = config.n

        def replicate(index: int, rngs) -> Tuple[float, float]:
            scores = handler(n + 1, rngs["scenario"])
            cost = transport_cost_matrix(scores, moments.means, moments.second_moments)
            k = int(self.fast_solver.solve(cost).mapping[n])
            u = self.semidiscrete_service.sample_in_cell(k, grid, diagram, rngs["tau"])
            return float(np.linalg.norm(u)), float(grid.norms[k])

        results = self._worker(replicate, config.seed, names=("scenario", "tau")).run(config.reps)
        randomized = [r for r, _ in results]
        plain = [p for _, p in results]
        return RandomizedPitReport(
            scenario=config.scenario,
            n=n,
            reps=len(results),
            max_mass_deviation=diagram.deviation,
            randomized=ks_uniform(randomized, "randomized norm"),
            non_randomized=ks_uniform(plain, "site norm"),
        )
