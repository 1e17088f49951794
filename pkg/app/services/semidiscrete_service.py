import logging
from typing import Optional, Tuple

import numpy as np

from app.config import Settings
from app.exceptions import (
    ConvergenceError,
    IndexOutOfRangeError,
    InputError,
    InternalError,
    SamplingError,
)
from app.models.grid import SphericalGrid
from app.models.laguerre import CellMoments, LaguerreDiagram
from app.models.partition import PartitionArtifact, TransportMode
from app.services.base import TransportBaseService
from app.services.grid_service import GridService
from app.services.partition_service import PartitionService

logger = logging.getLogger(__name__)

# power 행렬 계산 청크 (M×(n+1) 전체를 한 번에 만들지 않는다)
CHUNK_ROWS = 20_000


class SemiDiscreteService(TransportBaseService):
    """연속 구면 균등 법칙으로의 준이산 수송

    등질량 라게르 셀 가중치 (공통 난수 쌍대 상승), 셀 모멘트,
    기대 비용 할당 스트림, 셀 내부 무작위 수송.
    """

    def __init__(
        self,
        grid_service: Optional[GridService] = None,
        partition_service: Optional[PartitionService] = None,
        settings: Optional[Settings] = None,
    ):
        super().__init__(settings)
        self.grid_service = grid_service or GridService(settings=self.settings)
        self.partition_service = partition_service or PartitionService(settings=self.settings)

    # ==================== 쌍대 상승 ====================

    def fit_weights(
        self,
        sites,
        d: int,
        M: Optional[int] = None,
        mass_tol: Optional[float] = None,
        rng=None,
        max_iter: Optional[int] = None,
    ) -> LaguerreDiagram:
        """K(w) = −mean(w) + E[min_j ‖Y−U_j‖² + w_j] 최대화

        기울기 U(A_j(w)) − 1/(n+1). 고정 표본(공통 난수)을 반복마다 재사용.
        """
        sites = self._validate_points(sites, d, "fit_weights")
        M = self.settings.mc_sample_size if M is None else int(M)
        mass_tol = self.settings.mass_tol if mass_tol is None else float(mass_tol)
        max_iter = self.settings.dual_max_iter if max_iter is None else int(max_iter)
        if M < 10_000:
            raise InputError(
                message="Invalid input",
                detail=f"fit_weights needs M >= 10000 Monte Carlo samples, got {M}"
            )
        self._validate_distinct(sites)

        seed = self._seed_from(rng)
        size = sites.shape[0]
        target = 1.0 / size
        if size == 1:
            return LaguerreDiagram(
                sites=sites, weights=np.zeros(1), mass_estimates=np.ones(1),
                mc_sample_size=M, seed=seed, deviation=0.0,
            )

        sample = self.common_sample(d, M, seed)
        weights = np.zeros(size)
        labels, mins = self._cells(sample, sites, weights)
        objective = float(mins.mean() - weights.mean())
        masses = np.bincount(labels, minlength=size) / M
        trace = [objective]
        step = 1.0

        iteration = 0
        deviation = float(np.max(np.abs(masses - target)))
        while deviation > mass_tol:
            if iteration >= max_iter:
                raise ConvergenceError(
                    message="Dual ascent did not converge",
                    detail=f"max mass deviation {deviation:.3e} > {mass_tol:.3e} after {max_iter} iterations",
                    deviation=deviation,
                )
            direction = size * (masses - target)
            step = min(1.0, 2.0 * step)
            while True:
                candidate = weights + step * direction
                candidate -= candidate.mean()
                new_labels, new_mins = self._cells(sample, sites, candidate)
                new_objective = float(new_mins.mean() - candidate.mean())
                if new_objective >= objective - 1e-12 * max(1.0, abs(objective)):
                    break
                step *= 0.5
                if step < 1e-12:
                    raise ConvergenceError(
                        message="Dual ascent did not converge",
                        detail=f"step size underflow at mass deviation {deviation:.3e}",
                        deviation=deviation,
                    )
            weights, labels, objective = candidate, new_labels, new_objective
            masses = np.bincount(labels, minlength=size) / M
            deviation = float(np.max(np.abs(masses - target)))
            trace.append(objective)
            iteration += 1

        logger.info(f"Laguerre weights fitted: n+1={size}, iterations={iteration}, deviation={deviation:.2e}")
        return LaguerreDiagram(
            sites=sites,
            weights=weights,
            mass_estimates=masses,
            mc_sample_size=M,
            seed=seed,
            deviation=deviation,
            iterations=iteration,
            objective_trace=trace,
        )

    def fit_for_grid(self, grid: SphericalGrid, M: Optional[int] = None, mass_tol: Optional[float] = None, rng=None) -> LaguerreDiagram:
        """그리드 점을 사이트로 (원점 복사본은 1 개까지)"""
        return self.fit_weights(grid.points, grid.dim, M=M, mass_tol=mass_tol, rng=rng)

    def audit_masses(self, diagram: LaguerreDiagram, rng, M: Optional[int] = None) -> np.ndarray:
        """독립 표본으로 셀 질량 재추정"""
        M = diagram.mc_sample_size if M is None else int(M)
        sample = self.grid_service.sample_spherical_uniform(diagram.dim, rng, M)
        labels, _ = self._cells(sample, diagram.sites, diagram.weights)
        return np.bincount(labels, minlength=diagram.size) / M

    def common_sample(self, d: int, M: int, seed: int) -> np.ndarray:
        return self.grid_service.sample_spherical_uniform(d, np.random.default_rng(seed), M)

    # ==================== 모멘트 ====================

    def cell_moments(self, diagram: LaguerreDiagram, rng=None) -> CellMoments:
        """셀별 m_k = E[U | A_k], s_k = E[‖U‖² | A_k]

        rng 가 없으면 쌍대 상승에 쓴 공통 난수 표본을 다시 만든다.
        """
        if rng is None:
            sample = self.common_sample(diagram.dim, diagram.mc_sample_size, diagram.seed)
        else:
            sample = self.grid_service.sample_spherical_uniform(diagram.dim, rng, diagram.mc_sample_size)
        labels, _ = self._cells(sample, diagram.sites, diagram.weights)
        size = diagram.size
        counts = np.bincount(labels, minlength=size)
        if np.any(counts == 0):
            empty = np.flatnonzero(counts == 0).tolist()
            raise InternalError(
                message="Empty Laguerre cell",
                detail=f"Cells {empty} received no Monte Carlo samples"
            )

        sums = np.zeros((size, diagram.dim))
        np.add.at(sums, labels, sample)
        sq_norms = np.sum(sample * sample, axis=1)
        means = sums / counts[:, None]
        second = np.bincount(labels, weights=sq_norms, minlength=size) / counts
        max_norms = np.zeros(size)
        np.maximum.at(max_norms, labels, np.sqrt(sq_norms))

        warnings = []
        floor = diagram.mc_sample_size / (2 * size)
        thin = np.flatnonzero(counts < floor)
        if thin.size:
            message = f"cells {thin.tolist()} have fewer than {floor:.0f} samples; moments are noisy"
            logger.warning(message)
            warnings.append(message)

        return CellMoments(
            means=means,
            second_moments=second,
            counts=counts,
            max_norms=max_norms,
            warnings=warnings,
        )

    @staticmethod
    def expected_cost(z, k: int, moments: CellMoments) -> float:
        """c̄(z, k) = ‖z‖² − 2⟨z, m_k⟩ + s_k"""
        z = np.asarray(z, dtype=float)
        if not 0 <= k < moments.means.shape[0]:
            raise IndexOutOfRangeError(
                message="Column index out of range",
                detail=f"Cell {k} is outside [0, {moments.means.shape[0] - 1}]"
            )
        return float(z @ z - 2.0 * z @ moments.means[k] + moments.second_moments[k])

    # ==================== 준이산 스트림 ====================

    def fit_sd_partition(
        self,
        calib_scores,
        moments: CellMoments,
        grid: SphericalGrid,
        diagram: Optional[LaguerreDiagram] = None,
    ) -> PartitionArtifact:
        """U_k → m_k, ‖U_k‖² → s_k 로 바꾼 할당 스트림"""
        seeds = {"dual": diagram.seed} if diagram is not None else {}
        return self.partition_service.fit_with_moments(
            calib_scores,
            grid,
            centers=moments.means,
            second_moments=moments.second_moments,
            mode=TransportMode.SEMIDISCRETE,
            cell_max_norms=moments.max_norms,
            seeds=seeds,
        )

    def barycentric_map(self, sd_artifact: PartitionArtifact, z) -> np.ndarray:
        """φ(Z) = m_{k*(Z)}"""
        k = self.partition_service.assign(sd_artifact, z).index
        return sd_artifact.centers[k].copy()

    def randomized_transport(
        self,
        z,
        sd_artifact: PartitionArtifact,
        diagram: Optional[LaguerreDiagram],
        rng,
    ) -> Tuple[int, np.ndarray]:
        """u ~ U(· | A_{k*(Z)}) 기각 샘플링; diagram 이 없으면 점 셀 (u = U_k)"""
        k = self.partition_service.assign(sd_artifact, z).index
        return k, self.sample_in_cell(k, sd_artifact.grid, diagram, rng)

    def sample_in_cell(self, k: int, grid: SphericalGrid, diagram: Optional[LaguerreDiagram], rng) -> np.ndarray:
        if diagram is None:
            return grid.points[k].copy()
        batch = max(64, 4 * diagram.size)
        proposed = 0
        cap = self.settings.rejection_cap
        while proposed < cap:
            count = min(batch, cap - proposed)
            proposals = self.grid_service.sample_spherical_uniform(diagram.dim, rng, count)
            hits = np.flatnonzero(diagram.cell_of(proposals) == k)
            if hits.size:
                return proposals[hits[0]]
            proposed += count
        raise SamplingError(
            message="Rejection sampling cap exceeded",
            detail=f"No proposal landed in cell {k} after {cap} draws; the diagram is likely mis-fitted"
        )

    # ==================== 내부 ====================

    @staticmethod
    def _cells(sample: np.ndarray, sites: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """표본별 argmin_j ‖y−U_j‖² + w_j 와 그 최솟값"""
        site_sq = np.sum(sites * sites, axis=1)
        labels = np.empty(sample.shape[0], dtype=np.int64)
        mins = np.empty(sample.shape[0])
        for start in range(0, sample.shape[0], CHUNK_ROWS):
            block = sample[start:start + CHUNK_ROWS]
            power = (
                np.sum(block * block, axis=1)[:, None]
                - 2.0 * block @ sites.T
                + site_sq[None, :]
                + weights[None, :]
            )
            idx = np.argmin(power, axis=1)
            labels[start:start + CHUNK_ROWS] = idx
            mins[start:start + CHUNK_ROWS] = power[np.arange(block.shape[0]), idx]
        return labels, mins

    @staticmethod
    def _validate_distinct(sites: np.ndarray) -> None:
        unique = np.unique(sites, axis=0)
        if unique.shape[0] != sites.shape[0]:
            raise InputError(
                message="Invalid input",
                detail="Laguerre sites must be pairwise distinct (at most one origin copy)"
            )

    @staticmethod
    def _seed_from(rng) -> int:
        if rng is None:
            return int(np.random.SeedSequence().generate_state(1)[0])
        if isinstance(rng, (int, np.integer)):
            return int(rng)
        return int(rng.integers(0, 2**31 - 1))
