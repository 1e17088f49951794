"""
증강 할당 스트림 / 다면체 분할 테스트

테스트 항목:
- 1차원 예시 (Z_1 = 0.5, 그리드 {−1, +1})
- 전체 (n+1) 문제와의 오라클 동치
- 분할 / 단조성 / 1차원 순서 보존 / 전단사
- 유계성 삼상태 판정
"""

import numpy as np

from app.exceptions import InputError, IndexOutOfRangeError
from app.models.partition import Boundedness
from app.services.grid_service import GridService
from app.services.lap import AssignmentSolver
from app.services.partition_service import (
    PartitionService,
    canonical_index,
    positively_spans,
    transport_cost_matrix,
)
from scripts.test.base import BaseTester


def make_grid(triple, d, seed: int = 0):
    service = GridService()
    n_plus_1 = triple[0] * triple[1] + triple[2]
    return service.build_grid(service.make_plan(n_plus_1, d, triple, direction_seed=seed))


class TestPartitionService(BaseTester):
    """PartitionService 테스트"""

    def _random_artifact(self, triple, d):
        grid = make_grid(triple, d, seed=3)
        scores = self.rng.normal(size=(grid.size - 1, d))
        return PartitionService().fit(scores, grid)

    def test_one_dimensional_example(self):
        """C = [0.25, 2.25] (−1, +1 순), 영역 0 은 Z ≤ 0.5"""
        self.print_test("1차원 예시")
        service = PartitionService()
        try:
            artifact = service.fit([[0.5]], make_grid((1, 2, 0), 1))
            self.assert_close(artifact.leave_out_costs, [0.25, 2.25])

            at_zero = service.assign(artifact, [0.0])
            assert at_zero.index == 0 and at_zero.target[0] == -1.0
            self.assert_close(at_zero.cost, 1.25)

            at_one = service.assign(artifact, [1.0])
            assert at_one.index == 1 and at_one.target[0] == 1.0
            self.assert_close(at_one.cost, 2.25)

            region = service.region(artifact, 0)
            self.assert_close(region.normals, [[2.0]])
            self.assert_close(region.offsets, [1.0])
            assert region.contains(np.array([0.5])) and not region.contains(np.array([0.500001]))

            self.print_result(True, "예시 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"예시 불일치: {e}")
            return False

    def test_single_target(self):
        """n=0: C = [0], 영역은 전체 공간"""
        self.print_test("단일 타깃")
        service = PartitionService()
        try:
            grid = make_grid((1, 0, 1), 2)
            artifact = service.fit([], grid)
            self.assert_close(artifact.leave_out_costs, [0.0])
            assert service.assign(artifact, [5.0, -3.0]).index == 0
            region = service.region(artifact, 0)
            assert region.contains(np.array([100.0, 100.0]))
            assert service.check_bounded(region, artifact) == Boundedness.PROVEN_UNBOUNDED
            self.print_result(True, "단일 타깃 처리")
            return True
        except AssertionError as e:
            self.print_result(False, f"단일 타깃 실패: {e}")
            return False

    def test_duplicate_origin_costs(self):
        """원점 복사본의 C_k 와 영역이 같다"""
        self.print_test("원점 복사본")
        service = PartitionService()
        try:
            artifact = self._random_artifact((3, 9, 4), 2)
            origin = np.flatnonzero(artifact.target_norms == 0)
            assert origin.size == 4
            self.assert_close(artifact.leave_out_costs[origin], np.full(4, artifact.leave_out_costs[origin[0]]))
            assert np.all(artifact.canonical_index[origin] == origin[0])
            assert np.all(artifact.multiplicity[origin] == 4)

            first, last = service.region(artifact, origin[0]), service.region(artifact, origin[-1])
            self.assert_close(first.normals, last.normals)
            self.assert_close(first.offsets, last.offsets)
            self.print_result(True, "복사본 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"복사본 불일치: {e}")
            return False

    def test_halfspace_identity(self):
        """f_j − f_k = 2(⟨Z, U_k − U_j⟩ − β[j][k])"""
        self.print_test("반공간 항등식")
        service = PartitionService()
        try:
            artifact = self._random_artifact((3, 5, 1), 2)
            centers = artifact.centers
            for _ in range(20):
                z = self.rng.normal(size=2)
                f = service.stream_costs(artifact, z)
                j, k = self.rng.choice(artifact.size, size=2, replace=False)
                lhs = f[j] - f[k]
                rhs = 2 * (z @ (centers[k] - centers[j]) - artifact.halfspace_offsets[j, k])
                self.assert_close(lhs, rhs)
            assert np.all(artifact.leave_out_costs >= 0)
            self.print_result(True, "항등식 만족")
            return True
        except AssertionError as e:
            self.print_result(False, f"항등식 실패: {e}")
            return False

    def test_oracle_equivalence(self):
        """C_{k*} + ‖Z − U_{k*}‖² == (n+1) 점 전체 최적 비용"""
        self.print_test("오라클 동치")
        service = PartitionService()
        solver = AssignmentSolver()
        try:
            for triple, d in [((2, 4, 1), 1), ((3, 6, 2), 2), ((2, 7, 3), 3), ((5, 8, 9), 2)]:
                artifact = self._random_artifact(triple, d)
                for _ in range(15):
                    z = self.rng.normal(size=d) * 1.5
                    result = service.assign(artifact, z)
                    augmented = np.vstack([artifact.calib_scores, z[None, :]])
                    cost = transport_cost_matrix(augmented, artifact.grid.points, np.sum(artifact.grid.points ** 2, axis=1))
                    full = solver.solve(cost)
                    self.assert_close(result.cost, full.total_cost, tol=1e-9)
                    last = int(full.mapping[-1])
                    if last != result.index:
                        f = service.stream_costs(artifact, z)
                        assert abs(f[last] - f[result.index]) <= 1e-9, "질의 열이 다르고 동률도 아님"
            self.print_result(True, "전체 문제와 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"오라클 불일치: {e}")
            return False

    def test_transport_plan_bijection(self):
        """증강 순열이 모든 타깃을 정확히 한 번"""
        self.print_test("증강 순열 전단사")
        service = PartitionService()
        try:
            artifact = self._random_artifact((3, 6, 2), 2)
            for _ in range(10):
                plan = service.transport_plan(artifact, self.rng.normal(size=2))
                assert sorted(plan.permutation) == list(range(artifact.size))
                assert plan.permutation[-1] == plan.index
            self.print_result(True, "전단사 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"전단사 실패: {e}")
            return False

    def test_partition_membership(self):
        """무작위 Z 는 정확히 한 (대표) 영역에 속하고 assign 과 일치"""
        self.print_test("분할 소속")
        service = PartitionService()
        try:
            artifact = self._random_artifact((3, 6, 2), 2)
            representatives = np.flatnonzero(artifact.canonical_index == np.arange(artifact.size))
            regions = {j: service.region(artifact, int(j)) for j in representatives}
            for _ in range(200):
                z = self.rng.normal(size=2) * 2
                inside = [j for j, region in regions.items() if region.slack(z) < -1e-9]
                assigned = artifact.canonical_index[service.assign(artifact, z).index]
                assert inside == [assigned], (inside, assigned)

            for i, z in enumerate(artifact.calib_scores):
                k = service.assign(artifact, z).index
                assert service.membership_slack(artifact, k, z) <= 1e-9
            self.print_result(True, "소속 일관성")
            return True
        except AssertionError as e:
            self.print_result(False, f"소속 실패: {e}")
            return False

    def test_monotonicity(self):
        """쌍 단조성과 순환 단조성"""
        self.print_test("단조성")
        service = PartitionService()
        try:
            artifact = self._random_artifact((3, 6, 2), 2)
            for _ in range(100):
                m = int(self.rng.integers(2, 6))
                zs = self.rng.normal(size=(m, 2)) * 1.5
                targets = np.array([service.assign(artifact, z).target for z in zs])
                assert (zs[0] - zs[1]) @ (targets[0] - targets[1]) >= -1e-9
                matched = np.sum((zs - targets) ** 2)
                shifted = np.sum((zs - np.roll(targets, -1, axis=0)) ** 2)
                assert matched <= shifted + 1e-9

            line = self._random_artifact((4, 4, 1), 1)
            sweep = np.sort(self.rng.uniform(-4, 4, size=1000))
            images = line.grid.points[service.assign_many(line, sweep[:, None])].ravel()
            assert np.all(np.diff(images) >= 0)
            self.print_result(True, "단조성 만족")
            return True
        except AssertionError as e:
            self.print_result(False, f"단조성 실패: {e}")
            return False

    def test_check_bounded(self):
        """내부 껍질은 유계, 바깥 껍질은 비유계"""
        self.print_test("유계성 판정")
        service = PartitionService()
        try:
            artifact = self._random_artifact((10, 9, 10), 2)
            statuses = {}
            for j in range(artifact.size):
                region = service.region(artifact, j)
                statuses[j] = service.check_bounded(region, artifact)
            for j, status in statuses.items():
                if artifact.target_norms[j] < 1:
                    assert status == Boundedness.PROVEN_BOUNDED, (j, status)
                else:
                    assert status == Boundedness.PROVEN_UNBOUNDED, (j, status)
            assert service.region_with_bounds(artifact, 0).bounded == Boundedness.PROVEN_BOUNDED
            self.print_result(True, "삼상태 판정 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"유계성 실패: {e}")
            return False

    def test_positively_spans(self):
        self.print_test("양의 생성")
        try:
            assert positively_spans(np.array([[1, 0], [0, 1], [-1, 0], [0, -1]]))
            angles = 2 * np.pi * np.arange(3) / 3
            assert positively_spans(np.column_stack([np.cos(angles), np.sin(angles)]))
            assert not positively_spans(np.array([[1, 0], [0, 1]]))
            assert not positively_spans(np.array([[1, 0], [-1, 0]]))
            assert not positively_spans(np.zeros((0, 2)))
            self.print_result(True, "LP 인증 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"LP 인증 실패: {e}")
            return False

    def test_canonical_index(self):
        self.print_test("중복 제거 인덱스")
        try:
            centers = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
            second = np.array([0.0, 0.0, 1.0, 0.5])
            assert canonical_index(centers, second).tolist() == [0, 0, 2, 3]
            self.print_result(True, "대표 인덱스 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"대표 인덱스 실패: {e}")
            return False

    def test_input_errors(self):
        self.print_test("입력 오류")
        service = PartitionService()
        try:
            grid = make_grid((1, 2, 0), 1)
            self.assert_raises(InputError, service.fit, [[0.5], [0.1]], grid,
                               expected_message_contains="Dimension mismatch")
            self.assert_raises(InputError, service.fit, [[0.5, 0.1]], grid)
            artifact = service.fit([[0.5]], grid)
            self.assert_raises(InputError, service.assign, artifact, [float("nan")])
            self.assert_raises(IndexOutOfRangeError, service.region, artifact, 5)
            self.print_result(True, "오류 검출")
            return True
        except AssertionError as e:
            self.print_result(False, f"오류 검출 실패: {e}")
            return False
