from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Assignment:
    """행 -> 열 단사 매핑 (0-based) 과 총 비용"""
    mapping: np.ndarray
    total_cost: float

    def as_dict(self) -> dict:
        return {int(i): int(j) for i, j in enumerate(self.mapping)}
