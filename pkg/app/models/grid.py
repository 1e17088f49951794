from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SphericalGrid:
    """이산 구면 균등 타깃

    점 순서: 원점 복사본 n_origin 개, 이후 반지름 j/n_radii (j=1..n_radii) 껍질 순,
    껍질 안에서는 방향 생성 순서.
    """
    dim: int
    n_origin: int
    n_dirs: int
    n_radii: int
    directions: np.ndarray  # (n_dirs, dim) 단위 벡터
    points: np.ndarray      # (n+1, dim)
    norms: np.ndarray       # (n+1,) 정확히 j/n_radii
    shells: np.ndarray      # (n+1,) 껍질 번호 0..n_radii
    direction_seed: int = 0

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def n(self) -> int:
        """보정 표본 크기 (점 개수 - 1)"""
        return self.size - 1

    def shell_mass(self, j: int) -> float:
        """반지름 j/n_radii 의 이산 질량"""
        count = self.n_origin if j == 0 else self.n_dirs
        return count / self.size
