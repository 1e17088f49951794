import logging
import math
from collections import deque
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.config import Settings
from app.exceptions import InputError, ShapeError, IndexOutOfRangeError
from app.models.assignment import Assignment
from app.services.base import TransportBaseService

logger = logging.getLogger(__name__)


class AssignmentSolver(TransportBaseService):
    """선형 할당 문제 정확해 (정사각 / 열 하나 제거)

    scipy 의 최단 증가 경로 해로 최적값을 얻고, 쌍대 퍼텐셜로
    tight edge 그래프를 만든 뒤 사전식 최소 최적 매핑으로 정규화한다.
    """

    def __init__(self, settings: Optional[Settings] = None, canonical: bool = True):
        super().__init__(settings)
        self.canonical = canonical

    # ==================== 공개 연산 ====================

    def solve(self, cost, canonical: Optional[bool] = None) -> Assignment:
        """최소 비용 단사 매핑 (행 -> 열)"""
        matrix = self._validate_cost(cost)
        canonical = self.canonical if canonical is None else canonical
        rows, cols = linear_sum_assignment(matrix)
        mapping = np.empty(matrix.shape[0], dtype=np.int64)
        mapping[rows] = cols
        if canonical:
            mapping = self._canonicalize(matrix, mapping)
        return Assignment(mapping=mapping, total_cost=self._total(matrix, mapping))

    def solve_without_column(self, cost, k: int) -> float:
        """열 k 를 지운 n×n 문제의 최적 비용 C_k"""
        return self.solve_without_column_full(cost, k).total_cost

    def solve_without_column_full(self, cost, k: int) -> Assignment:
        """C_k 와 함께 부분 할당도 반환 (매핑은 원래 열 번호)"""
        matrix = self._validate_cost(cost, allow_empty=True)
        n_rows, n_cols = matrix.shape
        if n_cols != n_rows + 1:
            raise ShapeError(
                message="Invalid cost matrix shape",
                detail=f"solve_without_column expects n_cols = n_rows + 1, got {matrix.shape}"
            )
        if not 0 <= k < n_cols:
            raise IndexOutOfRangeError(
                message="Column index out of range",
                detail=f"Column {k} is outside [0, {n_cols - 1}]"
            )
        if n_rows == 0:
            return Assignment(mapping=np.zeros(0, dtype=np.int64), total_cost=0.0)
        keep = np.delete(np.arange(n_cols), k)
        reduced = self.solve(matrix[:, keep])
        return Assignment(mapping=keep[reduced.mapping], total_cost=reduced.total_cost)

    def leave_one_out(self, cost) -> Tuple[np.ndarray, np.ndarray]:
        """모든 k 에 대한 (C_k, 부분 할당) 표"""
        matrix = self._validate_cost(cost, allow_empty=True)
        n_rows, n_cols = matrix.shape
        costs = np.zeros(n_cols, dtype=float)
        subs = np.zeros((n_cols, n_rows), dtype=np.int64)
        for k in range(n_cols):
            result = self.solve_without_column_full(matrix, k)
            costs[k] = result.total_cost
            subs[k] = result.mapping
        return costs, subs

    # ==================== 내부 ====================

    def _validate_cost(self, cost, allow_empty: bool = False) -> np.ndarray:
        matrix = self._validate_finite(cost, "solve_assignment")
        if matrix.ndim != 2:
            raise InputError(
                message="Invalid input",
                detail=f"Cost matrix must be 2D, got shape {matrix.shape}"
            )
        if matrix.shape[0] < 1 and not allow_empty:
            raise InputError(
                message="Invalid input",
                detail="Cost matrix must have at least one row"
            )
        if matrix.size and np.min(matrix) < 0:
            raise InputError(
                message="Invalid input",
                detail="Cost matrix entries must be non-negative"
            )
        if matrix.shape[0] > matrix.shape[1]:
            raise ShapeError(
                message="Invalid cost matrix shape",
                detail=f"n_rows ({matrix.shape[0]}) exceeds n_cols ({matrix.shape[1]})"
            )
        return matrix

    @staticmethod
    def _total(matrix: np.ndarray, mapping: np.ndarray) -> float:
        return math.fsum(matrix[np.arange(mapping.shape[0]), mapping].tolist())

    def _canonicalize(self, matrix: np.ndarray, mapping: np.ndarray) -> np.ndarray:
        """최적 매핑 중 사전식 최소 매핑"""
        n_rows, n_cols = matrix.shape
        # 직사각 문제는 비용 0 의 더미 행으로 정사각화
        square = np.zeros((n_cols, n_cols), dtype=float)
        square[:n_rows] = matrix
        perm = np.empty(n_cols, dtype=np.int64)
        perm[:n_rows] = mapping
        perm[n_rows:] = np.setdiff1d(np.arange(n_cols), mapping)

        v = self._column_potentials(square, perm)
        u = square[np.arange(n_cols), perm] - v[perm]
        reduced = square - u[:, None] - v[None, :]
        scale = max(1.0, float(np.max(np.abs(square))))
        tight = reduced <= self.settings.tie_tol * 1e-2 * scale
        tight[np.arange(n_cols), perm] = True

        result = self._lexicographic_matching(tight, perm, n_rows)
        candidate = result[:n_rows]

        optimum = self._total(matrix, mapping)
        if self._total(matrix, candidate) > optimum + self.settings.tie_tol * max(1.0, abs(optimum)):
            logger.debug("canonical matching drifted from optimum; keeping solver mapping")
            return mapping
        return candidate

    @staticmethod
    def _column_potentials(square: np.ndarray, perm: np.ndarray) -> np.ndarray:
        """열 퍼텐셜 v: σ(i) -> j 간선 가중치 c_ij − c_iσ(i) 최단거리 (벨만-포드)"""
        n = square.shape[0]
        weights = square - square[np.arange(n), perm][:, None]
        dist = np.zeros(n, dtype=float)
        for _ in range(n):
            candidate = np.min(dist[perm][:, None] + weights, axis=0)
            updated = np.minimum(dist, candidate)
            if np.all(updated >= dist):
                break
            dist = updated
        return dist

    @staticmethod
    def _lexicographic_matching(tight: np.ndarray, perm: np.ndarray, n_fixed_rows: int) -> np.ndarray:
        """tight 그래프의 완전 매칭을 앞쪽 행부터 가장 작은 열로 고정"""
        n = tight.shape[0]
        match = perm.copy()
        owner = np.empty(n, dtype=np.int64)
        owner[match] = np.arange(n)
        adjacency: List[np.ndarray] = [np.flatnonzero(tight[i]) for i in range(n)]
        fixed = np.zeros(n, dtype=bool)

        for i in range(n_fixed_rows):
            for j in adjacency[i]:
                if j >= match[i]:
                    break
                if fixed[owner[j]]:
                    continue
                if AssignmentSolver._reroute(adjacency, match, owner, fixed, i, int(j)):
                    break
            fixed[i] = True
        return match

    @staticmethod
    def _reroute(adjacency, match, owner, fixed, i: int, j: int) -> bool:
        """행 i 를 열 j 로 옮기고 교대 경로로 나머지를 재배치 (실패 시 원상태)"""
        free_col = int(match[i])
        start = int(owner[j])
        parent_row = {start: -1}
        seen_cols = {j, free_col}
        queue = deque([start])
        while queue:
            row = queue.popleft()
            for col in adjacency[row]:
                col = int(col)
                if col == free_col:
                    # 경로 반영: row -> free_col, 이전 행들은 한 칸씩 당겨진다
                    cur_row, cur_col = row, col
                    while True:
                        prev_col = int(match[cur_row])
                        match[cur_row] = cur_col
                        owner[cur_col] = cur_row
                        if cur_row == start:
                            break
                        cur_col = prev_col
                        cur_row = parent_row[cur_row]
                    match[i] = j
                    owner[j] = i
                    return True
                if col in seen_cols:
                    continue
                next_row = int(owner[col])
                if fixed[next_row] or next_row == i:
                    continue
                seen_cols.add(col)
                parent_row[next_row] = row
                queue.append(next_row)
        return False
