from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass(frozen=True)
class LaguerreDiagram:
    """등질량 라게르(power) 셀 가중치"""
    sites: np.ndarray           # (n+1, d)
    weights: np.ndarray         # (n+1,) 합 0
    mass_estimates: np.ndarray  # (n+1,)
    mc_sample_size: int
    seed: int
    deviation: float
    iterations: int = 0
    objective_trace: List[float] = field(default_factory=list)
    cell_counts: Optional[np.ndarray] = None  # 셀 모멘트 표본 수

    @property
    def size(self) -> int:
        return int(self.sites.shape[0])

    @property
    def dim(self) -> int:
        return int(self.sites.shape[1])

    def power(self, u: np.ndarray) -> np.ndarray:
        """‖u − site_k‖² + w_k, u: (m, d) -> (m, n+1)"""
        u = np.atleast_2d(u)
        sq = np.sum(u * u, axis=1)[:, None] - 2.0 * u @ self.sites.T + np.sum(self.sites * self.sites, axis=1)[None, :]
        return sq + self.weights[None, :]

    def cell_of(self, u: np.ndarray) -> np.ndarray:
        return np.argmin(self.power(u), axis=1)


@dataclass(frozen=True)
class CellMoments:
    """셀 조건부 1/2차 모멘트"""
    means: np.ndarray           # (n+1, d) m_k
    second_moments: np.ndarray  # (n+1,) s_k
    counts: np.ndarray          # (n+1,) 셀별 표본 수
    max_norms: np.ndarray       # (n+1,) 셀 표본의 최대 노름
    warnings: List[str] = field(default_factory=list)

    @classmethod
    def point_cells(cls, sites: np.ndarray) -> "CellMoments":
        """점 셀 극한 (m_k = U_k, s_k = ‖U_k‖²)"""
        sites = np.asarray(sites, dtype=float)
        norms = np.linalg.norm(sites, axis=1)
        return cls(
            means=sites.copy(),
            second_moments=np.sum(sites * sites, axis=1),
            counts=np.zeros(sites.shape[0], dtype=int),
            max_norms=norms,
        )
