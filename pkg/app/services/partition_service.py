import logging
from dataclasses import replace
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog

from app.config import Settings
from app.exceptions import InputError, IndexOutOfRangeError
from app.models.grid import SphericalGrid
from app.models.partition import (
    AssignResult,
    Boundedness,
    PartitionArtifact,
    Region,
    TransportMode,
)
from app.services.base import TransportBaseService
from app.services.lap import AssignmentSolver

logger = logging.getLogger(__name__)


def transport_cost_matrix(points: np.ndarray, centers: np.ndarray, second_moments: np.ndarray) -> np.ndarray:
    """‖z‖² − 2⟨z, m_k⟩ + s_k

    이산 모드는 (U_k, ‖U_k‖²) 를 넘겨 ‖z − U_k‖² 가 된다.
    이산/준이산 경로가 같은 식을 써야 점 셀 극한에서 비트 단위로 일치한다.
    """
    points = np.atleast_2d(points)
    sq = np.sum(points * points, axis=1)[:, None]
    cost = sq - 2.0 * points @ centers.T + second_moments[None, :]
    return np.maximum(cost, 0.0)


class PartitionService(TransportBaseService):
    """증강 할당 스트림: C_k 계산, ψ 평가, 다면체 영역"""

    def __init__(self, solver: Optional[AssignmentSolver] = None, settings: Optional[Settings] = None):
        super().__init__(settings)
        self.solver = solver or AssignmentSolver(settings=self.settings)

    # ==================== fit ====================

    def fit(self, calib_scores, grid: SphericalGrid) -> PartitionArtifact:
        """이산 타깃에 대한 C_k 와 β 표"""
        centers = grid.points
        second = np.sum(centers * centers, axis=1)
        return self.fit_with_moments(
            calib_scores,
            grid,
            centers=centers,
            second_moments=second,
            mode=TransportMode.DISCRETE,
        )

    def fit_with_moments(
        self,
        calib_scores,
        grid: SphericalGrid,
        centers: np.ndarray,
        second_moments: np.ndarray,
        mode: TransportMode,
        cell_max_norms: Optional[np.ndarray] = None,
        seeds: Optional[dict] = None,
    ) -> PartitionArtifact:
        """(center, second moment) 일반형 fit"""
        scores = self._validate_points(calib_scores, grid.dim, "fit")
        if scores.shape[0] + 1 != grid.size:
            raise InputError(
                message="Dimension mismatch",
                detail=f"fit needs n+1 = {grid.size} targets for n = {scores.shape[0]} scores"
            )
        centers = np.asarray(centers, dtype=float)
        second_moments = np.asarray(second_moments, dtype=float)

        canonical = canonical_index(centers, second_moments)
        multiplicity = np.bincount(canonical, minlength=centers.shape[0])[canonical]

        cost = transport_cost_matrix(scores, centers, second_moments) if scores.shape[0] else np.zeros((0, grid.size))
        leave_out, subs = self.solver.leave_one_out(cost)
        # 동일 열(원점 복사본)은 C_k 가 수학적으로 같다
        leave_out = leave_out[canonical]

        halfspace = 0.5 * (
            second_moments[None, :] - second_moments[:, None]
            + leave_out[None, :] - leave_out[:, None]
        )
        np.fill_diagonal(halfspace, 0.0)

        logger.info(f"Fitted {mode.value} partition: n={scores.shape[0]}, d={grid.dim}")
        return PartitionArtifact(
            mode=mode,
            grid=grid,
            calib_scores=scores,
            centers=centers,
            second_moments=second_moments,
            leave_out_costs=leave_out,
            sub_assignments=subs,
            target_norms=np.asarray(grid.norms, dtype=float),
            halfspace_offsets=halfspace,
            multiplicity=multiplicity,
            canonical_index=canonical,
            cell_max_norms=cell_max_norms,
            seeds=dict(seeds or {}),
        )

    # ==================== assign ====================

    def stream_costs(self, artifact: PartitionArtifact, z) -> np.ndarray:
        """f_k(Z) = c(Z, k) + C_k"""
        z = self._validate_vector(z, artifact.dim, "assign")
        row = transport_cost_matrix(z[None, :], artifact.centers, artifact.second_moments)[0]
        return row + artifact.leave_out_costs

    def assign(self, artifact: PartitionArtifact, z) -> AssignResult:
        """k*(Z) = argmin_k f_k(Z), 동률은 작은 인덱스"""
        f = self.stream_costs(artifact, z)
        k = int(np.argmin(f))
        return AssignResult(index=k, target=artifact.grid.points[k], cost=float(f[k]))

    def assign_many(self, artifact: PartitionArtifact, points) -> np.ndarray:
        points = self._validate_points(points, artifact.dim, "assign")
        f = transport_cost_matrix(points, artifact.centers, artifact.second_moments) + artifact.leave_out_costs[None, :]
        return np.argmin(f, axis=1)

    def transport_plan(self, artifact: PartitionArtifact, z) -> AssignResult:
        """증강 (n+1) 점 문제의 전체 순열 (보정점 i -> 열, 마지막이 질의)"""
        result = self.assign(artifact, z)
        permutation: List[int] = [int(c) for c in artifact.sub_assignments[result.index]]
        permutation.append(result.index)
        return replace(result, permutation=permutation)

    # ==================== regions ====================

    def region(self, artifact: PartitionArtifact, j: int) -> Region:
        """R_j 의 반공간 표현 (중복 열은 대표 하나만)"""
        if not 0 <= j < artifact.size:
            raise IndexOutOfRangeError(
                message="Region index out of range",
                detail=f"Region {j} is outside [0, {artifact.size - 1}]"
            )
        canonical = artifact.canonical_index
        others = np.array(
            [k for k in range(artifact.size) if canonical[k] == k and canonical[k] != canonical[j]],
            dtype=np.int64,
        )
        normals = artifact.centers[others] - artifact.centers[j] if others.size else np.zeros((0, artifact.dim))
        offsets = artifact.halfspace_offsets[j, others] if others.size else np.zeros(0)
        return Region(
            index=j,
            normals=normals,
            offsets=offsets,
            neighbours=others,
            multiplicity=int(artifact.multiplicity[j]),
        )

    def membership_slack(self, artifact: PartitionArtifact, j: int, z) -> float:
        z = self._validate_vector(z, artifact.dim, "region membership")
        return self.region(artifact, j).slack(z)

    def check_bounded(self, region: Region, artifact: PartitionArtifact) -> Boundedness:
        """유계성 삼상태 판정

        1) 정리 경로: 타깃(또는 셀)이 단위 공 내부이고 방향들이 공간을 양으로 생성
        2) 법선들이 양으로 생성하면 후퇴 원뿔이 {0}
        3) v = U_j/‖U_j‖ 와 시드 고정 표본 방향으로 반증
        """
        if region.normals.shape[0] == 0:
            return Boundedness.PROVEN_UNBOUNDED

        j = region.index
        directions = artifact.grid.directions
        if artifact.mode == TransportMode.DISCRETE:
            inside = artifact.target_norms[j] < 1.0
        else:
            max_norms = artifact.cell_max_norms
            inside = max_norms is not None and max_norms[j] <= 1.0 - self.settings.inclusion_margin
        if inside and positively_spans(directions):
            return Boundedness.PROVEN_BOUNDED
        if positively_spans(region.normals):
            return Boundedness.PROVEN_BOUNDED

        tol = self.settings.membership_tol
        center = artifact.centers[j]
        norm = float(np.linalg.norm(center))
        if norm > 0 and np.all(region.normals @ (center / norm) <= tol):
            return Boundedness.PROVEN_UNBOUNDED

        rng = np.random.default_rng(self.settings.ray_seed)
        rays = rng.standard_normal((self.settings.ray_samples, artifact.dim))
        rays /= np.linalg.norm(rays, axis=1, keepdims=True)
        if np.any(np.max(rays @ region.normals.T, axis=1) <= tol):
            return Boundedness.PROVEN_UNBOUNDED
        return Boundedness.UNKNOWN

    def region_with_bounds(self, artifact: PartitionArtifact, j: int) -> Region:
        region = self.region(artifact, j)
        return replace(region, bounded=self.check_bounded(region, artifact))


def positively_spans(vectors: np.ndarray) -> bool:
    """벡터들이 R^d 를 양으로 생성하는지 (rank d 이고 Σλ_k a_k = 0, λ ≥ 1 가능)"""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    m, d = vectors.shape
    if m == 0 or np.linalg.matrix_rank(vectors) < d:
        return False
    result = linprog(
        c=np.zeros(m),
        A_eq=vectors.T,
        b_eq=np.zeros(d),
        bounds=[(1.0, None)] * m,
        method="highs",
    )
    return result.status == 0


def canonical_index(centers: np.ndarray, second_moments: np.ndarray) -> np.ndarray:
    """동일한 (center, second moment) 를 가진 인덱스의 대표 (가장 작은 인덱스)"""
    first_seen = {}
    canonical = np.empty(centers.shape[0], dtype=np.int64)
    for k in range(centers.shape[0]):
        key = tuple(centers[k].tolist()) + (float(second_moments[k]),)
        canonical[k] = first_seen.setdefault(key, k)
    return canonical
