import logging
from typing import Optional

import numpy as np

from app.exceptions import InputError
from app.models.score import ScoreKind, ScoreVector
from app.services.base import TransportBaseService

logger = logging.getLogger(__name__)


class ScoreService(TransportBaseService):
    """벡터 비적합 점수 생성자"""

    def residual_score(self, y, prediction) -> ScoreVector:
        """y − ŷ (다중 출력 회귀)"""
        y = self._validate_finite(np.atleast_1d(y), "residual_score")
        prediction = self._validate_vector(prediction, y.shape[0], "residual_score")
        return ScoreVector(values=y - prediction, kind=ScoreKind.RESIDUAL)

    def ensemble_score(self, y: float, predictions) -> ScoreVector:
        """[y − ŷ_1, …, y − ŷ_d] (모델별 잔차)"""
        predictions = self._validate_finite(np.atleast_1d(predictions), "ensemble_score")
        if predictions.ndim != 1 or predictions.shape[0] < 1:
            raise InputError(
                message="Invalid input",
                detail="ensemble_score needs at least one model prediction"
            )
        y = float(self._validate_finite(y, "ensemble_score"))
        return ScoreVector(values=y - predictions, kind=ScoreKind.ENSEMBLE, monotone=False)

    def classification_score(self, onehot, probs) -> ScoreVector:
        """y − p (원-핫 라벨과 확률 단체의 잔차, 합 0)"""
        probs = self._validate_finite(np.atleast_1d(probs), "classification_score")
        onehot = self._validate_vector(onehot, probs.shape[0], "classification_score")
        if np.any(probs < 0) or abs(float(probs.sum()) - 1.0) > 1e-9:
            raise InputError(
                message="Invalid input",
                detail=f"probs must lie on the simplex (non-negative, sum 1), got sum {probs.sum():.12g}"
            )
        if not (np.all((onehot == 0) | (onehot == 1)) and onehot.sum() == 1):
            raise InputError(
                message="Invalid input",
                detail="label must be a one-hot vector"
            )
        return ScoreVector(values=onehot - probs, kind=ScoreKind.CLASSIFICATION, monotone=False)

    def affine_score(self, y, matrix, offset: Optional[np.ndarray] = None) -> ScoreVector:
        """S(y) = A·y + b

        A 가 항등의 양의 배수가 아니면 단조성 보장이 없다 (A-계량 단조성만).
        """
        y = self._validate_finite(np.atleast_1d(y), "affine_score")
        matrix = self._validate_finite(np.atleast_2d(matrix), "affine_score")
        if matrix.shape[1] != y.shape[0]:
            raise InputError(
                message="Dimension mismatch",
                detail=f"affine_score matrix has {matrix.shape[1]} columns for a label of dimension {y.shape[0]}"
            )
        values = matrix @ y
        if offset is not None:
            values = values + self._validate_vector(offset, values.shape[0], "affine_score")
        return ScoreVector(
            values=values,
            kind=ScoreKind.CUSTOM,
            monotone=is_scalar_identity(matrix),
        )

    def custom_score(self, values) -> ScoreVector:
        values = self._validate_finite(np.atleast_1d(values), "custom_score")
        return ScoreVector(values=values, kind=ScoreKind.CUSTOM, monotone=False)


def is_scalar_identity(matrix: np.ndarray) -> bool:
    """A = c·I (c > 0) 여부"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[0] != matrix.shape[1]:
        return False
    c = matrix[0, 0]
    return bool(c > 0 and np.allclose(matrix, c * np.eye(matrix.shape[0]), atol=1e-12, rtol=0))
