"""시나리오별 점수 생성기

모든 생성기는 (개수, rng) -> (개수, d) 배열. 예측 모델은 영 모델
ŷ(x) = 0 이므로 생성된 Y 가 곧 잔차 점수다.
"""
import numpy as np

# 이방성 가우시안 공분산
GAUSSIAN_COV = np.array([[1.0, 0.8], [0.8, 1.0]])
_GAUSSIAN_CHOL = np.linalg.cholesky(GAUSSIAN_COV)

# 45° 회전
_ANGLE = np.pi / 4
ROTATION_45 = np.array([
    [np.cos(_ANGLE), -np.sin(_ANGLE)],
    [np.sin(_ANGLE), np.cos(_ANGLE)],
])

BANANA_X_SCALE = 10.0


def handle_gaussian(count: int, rng: np.random.Generator) -> np.ndarray:
    """Y ~ N(0, Σ), Σ = [[1, 0.8], [0.8, 1]]"""
    return rng.standard_normal((count, 2)) @ _GAUSSIAN_CHOL.T


def handle_banana(count: int, rng: np.random.Generator) -> np.ndarray:
    """Y = R (X_err, Y_err), Y_err = 15 Z₂ + 24(Z₁² − 1), X_err = 10 Z₁"""
    z = rng.standard_normal((count, 2))
    x_err = BANANA_X_SCALE * z[:, 0]
    y_err = 15.0 * z[:, 1] + 24.0 * (z[:, 0] ** 2 - 1.0)
    return np.column_stack([x_err, y_err]) @ ROTATION_45.T


def handle_uniform1d(count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(count, 1))


def handle_normal1d(count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((count, 1))


def handle_coin1d(count: int, rng: np.random.Generator) -> np.ndarray:
    """공정한 동전 {0, 1} (동률 처리 검증용)"""
    return rng.integers(0, 2, size=(count, 1)).astype(float)
