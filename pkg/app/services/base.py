from typing import Optional

import numpy as np

from app.config import Settings, get_settings
from app.exceptions import InputError


class TransportBaseService:
    """수송 계산 서비스 공통 로직"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def _validate_finite(self, values, operation: str) -> np.ndarray:
        """유한 실수 배열 검증"""
        try:
            arr = np.asarray(values, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError(
                message="Invalid input",
                detail=f"{operation} requires numeric input: {exc}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError(
                message="Non-finite entry",
                detail=f"{operation} received NaN or infinite values"
            )
        return arr

    def _validate_vector(self, z, dim: int, operation: str) -> np.ndarray:
        """길이 dim 인 유한 벡터 검증"""
        arr = self._validate_finite(z, operation)
        arr = np.atleast_1d(arr)
        if arr.ndim != 1 or arr.shape[0] != dim:
            raise InputError(
                message="Dimension mismatch",
                detail=f"{operation} expects a vector of dimension {dim}, got shape {arr.shape}"
            )
        return arr

    def _validate_points(self, points, dim: Optional[int], operation: str) -> np.ndarray:
        """(m, d) 점 배열 검증 (1차원 입력은 d=1 로 본다)"""
        arr = self._validate_finite(points, operation)
        if arr.size == 0:
            return np.zeros((0, dim or 1), dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
        if arr.ndim != 2:
            raise InputError(
                message="Invalid input",
                detail=f"{operation} expects a 2D array of points, got shape {arr.shape}"
            )
        if dim is not None and arr.shape[0] > 0 and arr.shape[1] != dim:
            raise InputError(
                message="Dimension mismatch",
                detail=f"{operation} expects points of dimension {dim}, got {arr.shape[1]}"
            )
        return arr
