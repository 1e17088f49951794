from dataclasses import dataclass
from enum import Enum as PyEnum
from typing import List, Optional, Tuple

import numpy as np


class ScoreKind(PyEnum):
    RESIDUAL = "residual"
    ENSEMBLE = "ensemble"
    CLASSIFICATION = "classification"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ScoreVector:
    values: np.ndarray
    kind: ScoreKind = ScoreKind.CUSTOM
    monotone: bool = True

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class ScoreTable:
    """보정 점수 표 (행 = 보정 예제)"""
    scores: np.ndarray
    ids: Optional[List[str]] = None
    columns: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    @property
    def dim(self) -> int:
        return int(self.scores.shape[1])
