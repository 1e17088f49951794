import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.exceptions import InputError, ConfigurationError
from app.models.grid import SphericalGrid
from app.schemas.grid import GridPlan
from app.services.base import TransportBaseService

logger = logging.getLogger(__name__)


class GridService(TransportBaseService):
    """이산 구면 균등 타깃 구성과 연속 구면 균등 샘플러"""

    # ==================== 분해 계획 ====================

    def plan_decomposition(
        self,
        n_plus_1: int,
        d: int,
        alpha_hint: Optional[float] = None,
        direction_seed: int = 0,
        max_origin: Optional[int] = None,
    ) -> GridPlan:
        """n+1 = n_R·n_S + n_o 분해 선택

        힌트 없음: n_o 최소, 다음 |n_R − n_S| 최소, 동률이면 큰 n_R.
        alpha_hint: j_α < n_R 이고 n_o ≥ 1 인 분해 중 |n_R − √(n+1)| 최소,
        다음 n_o 최소, 동률이면 큰 n_R. 불가능하면 n_o ≥ 1 을 풀고,
        그래도 없으면 힌트 없는 규칙으로 돌아간다 (경고).
        """
        if n_plus_1 < 2:
            raise InputError(
                message="Invalid input",
                detail=f"plan_decomposition requires n_plus_1 >= 2, got {n_plus_1}"
            )
        if d < 1:
            raise InputError(
                message="Invalid input",
                detail=f"plan_decomposition requires d >= 1, got {d}"
            )

        candidates = self._candidates(n_plus_1, d, max_origin)
        if not candidates:
            raise ConfigurationError(
                message="Invalid grid plan",
                detail=f"No decomposition of {n_plus_1} points exists for d={d} (max_origin={max_origin})"
            )

        chosen: Optional[Tuple[int, int, int]] = None
        if alpha_hint is not None:
            if not 0 < alpha_hint < 1:
                raise InputError(
                    message="Invalid input",
                    detail=f"alpha_hint must lie in (0, 1), got {alpha_hint}"
                )
            bounded = [c for c in candidates if self._j_alpha(n_plus_1, c, alpha_hint) < c[0]]
            with_centre = [c for c in bounded if c[2] >= 1]
            pool = with_centre or bounded
            if pool:
                root = math.sqrt(n_plus_1)
                chosen = min(pool, key=lambda c: (abs(c[0] - root), c[2], -c[0]))
            else:
                logger.warning(
                    f"No decomposition of {n_plus_1} points keeps j_alpha < n_R for alpha={alpha_hint}; "
                    "the conformal region may be unbounded"
                )

        if chosen is None:
            chosen = min(candidates, key=lambda c: (c[2], abs(c[0] - c[1]), -c[0]))

        n_radii, n_dirs, n_origin = chosen
        return GridPlan(
            n_plus_1=n_plus_1,
            dim=d,
            n_radii=n_radii,
            n_dirs=n_dirs,
            n_origin=n_origin,
            direction_seed=direction_seed,
        )

    def make_plan(self, n_plus_1: int, d: int, triple, direction_seed: int = 0) -> GridPlan:
        """명시적 (n_R, n_S, n_o) 로 계획 생성"""
        n_radii, n_dirs, n_origin = (int(v) for v in triple)
        try:
            return GridPlan(
                n_plus_1=n_plus_1,
                dim=d,
                n_radii=n_radii,
                n_dirs=n_dirs,
                n_origin=n_origin,
                direction_seed=direction_seed,
            )
        except PydanticValidationError as exc:
            raise ConfigurationError(
                message="Invalid grid plan",
                detail=f"Grid ({n_radii},{n_dirs},{n_origin}) is not valid for n+1={n_plus_1}: {exc.errors()[0]['msg']}"
            )

    @staticmethod
    def _j_alpha(n_plus_1: int, triple: Tuple[int, int, int], alpha: float) -> int:
        _, n_dirs, n_origin = triple
        return math.ceil(((n_plus_1) * (1 - alpha) - n_origin) / n_dirs - 1e-9)

    @staticmethod
    def _candidates(n_plus_1: int, d: int, max_origin: Optional[int]) -> List[Tuple[int, int, int]]:
        """개수 항등식을 만족하는 모든 (n_R, n_S, n_o)

        d=1 은 n_S 짝수, d≥2 는 가능하면 n_S ≥ d+1 (방향이 공간을 양으로 생성).
        """
        def enumerate_triples(min_dirs: int) -> List[Tuple[int, int, int]]:
            triples = []
            for n_radii in range(1, n_plus_1 + 1):
                for n_dirs in range(min_dirs, n_plus_1 // n_radii + 1):
                    if d == 1 and n_dirs % 2:
                        continue
                    n_origin = n_plus_1 - n_radii * n_dirs
                    if max_origin is not None and n_origin > max_origin:
                        continue
                    triples.append((n_radii, n_dirs, n_origin))
            return triples

        if d == 1:
            return enumerate_triples(2)
        return enumerate_triples(d + 1) or enumerate_triples(1)

    # ==================== 그리드 생성 ====================

    def build_grid(self, plan: GridPlan, d: Optional[int] = None) -> SphericalGrid:
        """원점 n_o 개 + 껍질별 (j/n_R)·u_s"""
        dim = plan.dim if d is None else d
        if dim != plan.dim:
            raise ConfigurationError(
                message="Invalid grid plan",
                detail=f"Plan was made for d={plan.dim}, requested d={dim}"
            )
        directions = self._directions(dim, plan.n_dirs, plan.direction_seed)

        radii = np.arange(1, plan.n_radii + 1) / plan.n_radii
        shell_points = (radii[:, None, None] * directions[None, :, :]).reshape(-1, dim)
        points = np.vstack([np.zeros((plan.n_origin, dim)), shell_points])
        norms = np.concatenate([np.zeros(plan.n_origin), np.repeat(radii, plan.n_dirs)])
        shells = np.concatenate([
            np.zeros(plan.n_origin, dtype=np.int64),
            np.repeat(np.arange(1, plan.n_radii + 1), plan.n_dirs),
        ])

        return SphericalGrid(
            dim=dim,
            n_origin=plan.n_origin,
            n_dirs=plan.n_dirs,
            n_radii=plan.n_radii,
            directions=directions,
            points=points,
            norms=norms,
            shells=shells,
            direction_seed=plan.direction_seed,
        )

    def _directions(self, dim: int, n_dirs: int, seed: int) -> np.ndarray:
        if n_dirs == 0:
            return np.zeros((0, dim))
        if dim == 1:
            if n_dirs % 2:
                raise ConfigurationError(
                    message="Invalid grid plan",
                    detail=f"1D grids need an even number of directions, got n_S={n_dirs}"
                )
            return np.tile(np.array([[-1.0], [1.0]]), (n_dirs // 2, 1))
        if dim == 2:
            angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
            return np.column_stack([np.cos(angles), np.sin(angles)])
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((n_dirs, dim))
        return raw / np.linalg.norm(raw, axis=1, keepdims=True)

    # ==================== 샘플러 ====================

    def sample_spherical_uniform(self, d: int, rng, size: Optional[int] = None) -> np.ndarray:
        """R·θ, R ~ U(0,1), θ ~ 구면 균등 (size=None 이면 벡터 하나)"""
        if d < 1:
            raise InputError(
                message="Invalid input",
                detail=f"sample_spherical_uniform requires d >= 1, got {d}"
            )
        count = 1 if size is None else int(size)
        radius = rng.random(count)
        if d == 1:
            theta = np.where(rng.random(count) < 0.5, -1.0, 1.0)[:, None]
        else:
            raw = rng.standard_normal((count, d))
            theta = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        draws = radius[:, None] * theta
        return draws[0] if size is None else draws
