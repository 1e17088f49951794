import logging
import math
from typing import Optional, Tuple

import numpy as np

from app.config import Settings
from app.exceptions import ConfigurationError, InputError
from app.models.grid import SphericalGrid
from app.models.partition import (
    PartitionArtifact,
    PredictionSet,
    QuantileRegion,
    TransportMode,
)
from app.schemas.conformal import RadiusChoice
from app.schemas.region import QuantileRegionExport, RegionExport
from app.services.base import TransportBaseService
from app.services.partition_service import PartitionService

logger = logging.getLogger(__name__)

# ‖U_j‖ ≤ r 비교에서 j/n_R 부동소수 오차 흡수
NORM_EPS = 1e-12


class ConformalService(TransportBaseService):
    """반지름 선택, 분위 영역 Ω_r, 예측 집합"""

    def __init__(self, partition_service: Optional[PartitionService] = None, settings: Optional[Settings] = None):
        super().__init__(settings)
        self.partition_service = partition_service or PartitionService(settings=self.settings)

    # ==================== 반지름 ====================

    def conformal_radius(self, grid: SphericalGrid, alpha: float) -> RadiusChoice:
        """j_α = ⌈((n+1)(1−α) − n_o)/n_S⌉, r = j_α/n_R"""
        if not 0 < alpha < 1:
            raise InputError(
                message="Invalid input",
                detail=f"alpha must lie in (0, 1), got {alpha}"
            )
        size = grid.size
        if grid.n_dirs == 0:
            j_alpha = 0
        else:
            j_alpha = max(0, math.ceil((size * (1 - alpha) - grid.n_origin) / grid.n_dirs - 1e-9))
        if j_alpha > grid.n_radii:
            min_alpha = 1 - (grid.n_origin + grid.n_radii * grid.n_dirs) / size
            raise ConfigurationError(
                message="Alpha unreachable for grid",
                detail=f"alpha={alpha} needs shell {j_alpha} > n_R={grid.n_radii}; minimal achievable alpha is {min_alpha:.6g}"
            )

        may_be_unbounded = j_alpha == grid.n_radii and grid.n_dirs > 0
        if may_be_unbounded:
            logger.warning(
                f"j_alpha = n_R = {grid.n_radii}: region includes the outermost shell and may be unbounded (r=1); "
                "replan the grid with an alpha hint"
            )
        return RadiusChoice(
            alpha=alpha,
            j_alpha=j_alpha,
            radius=j_alpha / grid.n_radii,
            nominal_mass=self.nominal_mass(grid, j_alpha),
            may_be_unbounded=may_be_unbounded,
        )

    @staticmethod
    def nominal_mass(grid: SphericalGrid, j: int) -> float:
        """(n_o + j·n_S)/(n+1)"""
        return (grid.n_origin + j * grid.n_dirs) / grid.size

    # ==================== 분위 영역 ====================

    def quantile_region(self, artifact: PartitionArtifact, r: float) -> QuantileRegion:
        """I_r = {j : ‖U_j‖ ≤ r} 과 Ω_r = ⋃_{j∈I_r} R_j (두 모드 공통)"""
        self._validate_radius(r)
        active = np.flatnonzero(artifact.target_norms <= r + NORM_EPS)
        return self._region(artifact, r, active)

    def cell_contained_region(self, artifact: PartitionArtifact, r: float) -> QuantileRegion:
        """준이산 Ω_r^sd: 셀 A_k 가 B(0, r) 안에 있다고 인증된 k 만

        r ≥ 1 이면 전부, 아니면 셀 표본 최대 노름 ≤ r − margin.
        """
        self._validate_radius(r)
        if artifact.mode != TransportMode.SEMIDISCRETE or artifact.cell_max_norms is None:
            raise ConfigurationError(
                message="Mode mismatch",
                detail="Cell containment needs a semidiscrete artifact with cell sample norms"
            )
        if r >= 1:
            active = np.arange(artifact.size)
        else:
            active = np.flatnonzero(artifact.cell_max_norms <= r - self.settings.inclusion_margin)
        return self._region(artifact, r, active)

    @staticmethod
    def _validate_radius(r: float) -> None:
        if not 0 <= r <= 1:
            raise InputError(
                message="Invalid input",
                detail=f"radius must lie in [0, 1], got {r}"
            )

    @staticmethod
    def _region(artifact: PartitionArtifact, r: float, active: np.ndarray) -> QuantileRegion:
        return QuantileRegion(
            radius=float(r),
            active_indices=active,
            artifact=artifact,
            nominal_mass=active.size / artifact.size,
        )

    def contains(self, region: QuantileRegion, z) -> bool:
        """Z ∈ Ω_r ⇔ k*(Z) ∈ I_r"""
        k = self.partition_service.assign(region.artifact, z).index
        return bool(region.active_mask[k])

    def contains_many(self, region: QuantileRegion, points) -> np.ndarray:
        indices = self.partition_service.assign_many(region.artifact, points)
        return region.active_mask[indices]

    # ==================== 예측 집합 ====================

    def predict_set(self, artifact: PartitionArtifact, r: float, prediction) -> PredictionSet:
        """잔차 점수 S(x,y) = y − ŷ(x) 기준 Ω_r(x) = ŷ(x) + Ω_r"""
        prediction = self._validate_vector(prediction, artifact.dim, "predict_set")
        return PredictionSet(region=self.quantile_region(artifact, r), prediction=prediction)

    def predict_contains(self, prediction_set: PredictionSet, y) -> bool:
        y = self._validate_vector(y, prediction_set.region.artifact.dim, "predict_set membership")
        return self.contains(prediction_set.region, y - prediction_set.prediction)

    def export_region(
        self,
        region: QuantileRegion,
        prediction=None,
        include_scores: bool = False,
    ) -> QuantileRegionExport:
        """활성 영역별 법선/오프셋 (ŷ 평행이동 포함) 과 유계성"""
        artifact = region.artifact
        shift = None
        if prediction is not None:
            shift = self._validate_vector(prediction, artifact.dim, "export_region")

        exported = []
        seen = set()
        for j in region.active_indices:
            j = int(j)
            canonical = int(artifact.canonical_index[j])
            if canonical in seen:
                continue
            seen.add(canonical)
            poly = self.partition_service.region_with_bounds(artifact, canonical)
            target = artifact.grid.points[canonical]
            if shift is not None:
                poly = poly.translated(shift)
                target = target + shift
            exported.append(RegionExport(
                index=canonical,
                multiplicity=poly.multiplicity,
                target=target.tolist(),
                normals=poly.normals.tolist(),
                offsets=poly.offsets.tolist(),
                bounded=poly.bounded.value,
            ))

        scores = None
        if include_scores:
            scores = artifact.calib_scores if shift is None else artifact.calib_scores + shift
            scores = scores.tolist()
        return QuantileRegionExport(
            mode=artifact.mode.value,
            radius=region.radius,
            nominal_mass=region.nominal_mass,
            active_indices=[int(j) for j in region.active_indices],
            prediction=None if shift is None else shift.tolist(),
            regions=exported,
            calib_scores=scores,
        )

    # ==================== 1차원 기준선 ====================

    @staticmethod
    def classical_interval(scores, alpha: float) -> Tuple[float, float, float]:
        """[z_(k), z_(n+1−k)], k = ⌊α(n+1)/2⌋, 명목 (n+1−2k)/(n+1)"""
        values = np.sort(np.asarray(scores, dtype=float).ravel())
        n = values.shape[0]
        k = int(math.floor(alpha * (n + 1) / 2 + 1e-12))
        nominal = (n + 1 - 2 * k) / (n + 1)
        if k < 1:
            return float("-inf"), float("inf"), nominal
        return float(values[k - 1]), float(values[n - k]), nominal
