from dataclasses import dataclass, field
from enum import Enum as PyEnum
from typing import List, Optional

import numpy as np

from app.models.grid import SphericalGrid
from app.models.laguerre import LaguerreDiagram


class TransportMode(PyEnum):
    DISCRETE = "discrete"
    SEMIDISCRETE = "semidiscrete"


class Boundedness(PyEnum):
    PROVEN_BOUNDED = "proven-bounded"
    PROVEN_UNBOUNDED = "proven-unbounded"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PartitionArtifact:
    """할당 스트림 상태

    centers / second_moments 는 이산 모드에서 U_k, ‖U_k‖²,
    준이산 모드에서 m_k, s_k.
    """
    mode: TransportMode
    grid: SphericalGrid
    calib_scores: np.ndarray        # (n, d)
    centers: np.ndarray             # (n+1, d)
    second_moments: np.ndarray      # (n+1,)
    leave_out_costs: np.ndarray     # (n+1,) C_k
    sub_assignments: np.ndarray     # (n+1, n) 열 k 제거 시 보정점 i 의 열
    target_norms: np.ndarray        # (n+1,)
    halfspace_offsets: np.ndarray   # (n+1, n+1) β[j][k], 대각 0
    multiplicity: np.ndarray        # (n+1,) 같은 기하 영역을 공유하는 인덱스 수
    canonical_index: np.ndarray     # (n+1,) 중복 제거 후 대표 인덱스
    cell_max_norms: Optional[np.ndarray] = None  # 준이산: 셀 표본 최대 노름
    seeds: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.centers.shape[0])

    @property
    def dim(self) -> int:
        return int(self.centers.shape[1])


@dataclass(frozen=True)
class Region:
    """R_j = {Z : ⟨Z, U_k − U_j⟩ ≤ β[j][k], k ≠ j}"""
    index: int
    normals: np.ndarray
    offsets: np.ndarray
    neighbours: np.ndarray
    multiplicity: int = 1
    bounded: Boundedness = Boundedness.UNKNOWN

    def slack(self, z: np.ndarray) -> float:
        """L(Z) = max_k ⟨Z, n_k⟩ − β_k (0 이하이면 소속)"""
        if self.normals.shape[0] == 0:
            return float("-inf")
        return float(np.max(self.normals @ np.asarray(z, dtype=float) - self.offsets))

    def contains(self, z: np.ndarray, tol: float = 1e-9) -> bool:
        return self.slack(z) <= tol

    def translated(self, shift: np.ndarray) -> "Region":
        """Z -> Z + shift 평행이동 (offset += ⟨shift, n_k⟩)"""
        return Region(
            index=self.index,
            normals=self.normals,
            offsets=self.offsets + self.normals @ np.asarray(shift, dtype=float),
            neighbours=self.neighbours,
            multiplicity=self.multiplicity,
            bounded=self.bounded,
        )


@dataclass(frozen=True)
class AssignResult:
    index: int
    target: np.ndarray
    cost: float
    permutation: Optional[List[int]] = None


@dataclass(frozen=True)
class QuantileRegion:
    """Ω_r = ⋃_{j ∈ I_r} R_j"""
    radius: float
    active_indices: np.ndarray
    artifact: PartitionArtifact
    nominal_mass: float

    @property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.artifact.size, dtype=bool)
        mask[self.active_indices] = True
        return mask


@dataclass(frozen=True)
class PredictionSet:
    """Ω_r(x) = ŷ(x) + Ω_r"""
    region: QuantileRegion
    prediction: np.ndarray


@dataclass
class FittedArtifact:
    """저장 단위: 분할 + (준이산이면) 라게르 다이어그램 + 선택 반지름"""
    artifact: PartitionArtifact
    diagram: Optional[LaguerreDiagram] = None
    alpha: Optional[float] = None
    j_alpha: Optional[int] = None
    radius: Optional[float] = None
    nominal_mass: Optional[float] = None
