"""
등각 반지름 / 분위 영역 / 예측 집합 테스트
"""

import numpy as np

from app.exceptions import ConfigurationError, InputError
from app.services.conformal_service import ConformalService
from app.services.grid_service import GridService
from app.services.partition_service import PartitionService
from scripts.test.base import BaseTester


class TestConformalService(BaseTester):
    """ConformalService 테스트"""

    def setup_method(self, method=None):
        super().setup_method(method)
        self.grid_service = GridService()
        self.partition_service = PartitionService()
        self.service = ConformalService(partition_service=self.partition_service)

    def _grid(self, triple, d=2):
        n_plus_1 = triple[0] * triple[1] + triple[2]
        return self.grid_service.build_grid(self.grid_service.make_plan(n_plus_1, d, triple))

    def _artifact(self, triple=(10, 9, 10), d=2):
        grid = self._grid(triple, d)
        scores = self.rng.normal(size=(grid.size - 1, d))
        return self.partition_service.fit(scores, grid)

    def test_radius_examples(self):
        """(10,9,10) 에서 α=0.1 → r=0.9, α=0.5 → r=0.5"""
        self.print_test("반지름 예시")
        try:
            grid = self._grid((10, 9, 10))
            choice = self.service.conformal_radius(grid, 0.1)
            assert choice.j_alpha == 9
            self.assert_close(choice.radius, 0.9)
            self.assert_close(choice.nominal_mass, 0.91)
            assert not choice.may_be_unbounded

            half = self.service.conformal_radius(grid, 0.5)
            assert half.j_alpha == 5
            self.assert_close(half.radius, 0.5)
            self.assert_close(half.nominal_mass, 0.55)

            self.print_result(True, "반지름 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"반지름 불일치: {e}")
            return False

    def test_radius_outermost_shell(self):
        """(9,11,1) 에서 α=0.1 → j_α = n_R, r = 1, 비유계 경고"""
        self.print_test("바깥 껍질 반지름")
        try:
            choice = self.service.conformal_radius(self._grid((9, 11, 1)), 0.1)
            assert choice.j_alpha == 9
            self.assert_close(choice.radius, 1.0)
            assert choice.may_be_unbounded
            self.print_result(True, "경고 플래그 설정")
            return True
        except AssertionError as e:
            self.print_result(False, f"경고 플래그 없음: {e}")
            return False

    def test_nominal_mass_guarantee(self):
        """명목 질량 ≥ 1 − α (여러 n, α)"""
        self.print_test("명목 질량 하한")
        try:
            for n_plus_1 in (20, 57, 100, 200):
                for alpha in (0.05, 0.1, 0.2, 0.5):
                    plan = self.grid_service.plan_decomposition(n_plus_1, 2, alpha_hint=alpha)
                    grid = self.grid_service.build_grid(plan)
                    choice = self.service.conformal_radius(grid, alpha)
                    assert choice.nominal_mass >= 1 - alpha - 1e-12, (n_plus_1, alpha, choice)
                    assert choice.j_alpha <= grid.n_radii
            self.assert_raises(InputError, self.service.conformal_radius, self._grid((10, 9, 10)), 0.0,
                               expected_exit_code=2)
            self.print_result(True, "하한 만족")
            return True
        except AssertionError as e:
            self.print_result(False, f"하한 위반: {e}")
            return False

    def test_quantile_region_nesting(self):
        """I_r 은 r 에 대해 증가, 명목 질량은 활성 비율"""
        self.print_test("분위 영역 포함 관계")
        try:
            artifact = self._artifact()
            region = self.service.quantile_region(artifact, 0.9)
            assert region.active_indices.size == 91
            self.assert_close(region.nominal_mass, 0.91)

            previous = set()
            for r in np.linspace(0, 1, 11):
                active = set(self.service.quantile_region(artifact, float(r)).active_indices.tolist())
                assert previous <= active
                previous = active
            assert len(previous) == artifact.size
            assert self.service.quantile_region(artifact, 0.0).active_indices.tolist() == list(range(10))

            self.assert_raises(InputError, self.service.quantile_region, artifact, 1.5)
            self.print_result(True, "포함 관계 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"포함 관계 실패: {e}")
            return False

    def test_contains_matches_assignment(self):
        """Z ∈ Ω_r ⇔ ‖ψ(Z)‖ ≤ r"""
        self.print_test("소속 판정")
        try:
            artifact = self._artifact()
            region = self.service.quantile_region(artifact, 0.5)
            points = self.rng.normal(size=(300, 2))
            inside = self.service.contains_many(region, points)
            for z, flag in zip(points, inside):
                target = self.partition_service.assign(artifact, z).target
                assert flag == (np.linalg.norm(target) <= 0.5 + 1e-12)
                assert flag == self.service.contains(region, z)
            self.print_result(True, "할당과 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"소속 불일치: {e}")
            return False

    def test_prediction_translation(self):
        """y ∈ Ω_r(x) ⇔ y − ŷ(x) ∈ Ω_r"""
        self.print_test("예측 집합 평행이동")
        try:
            artifact = self._artifact()
            prediction = np.array([3.0, -2.0])
            prediction_set = self.service.predict_set(artifact, 0.9, prediction)
            base = self.service.quantile_region(artifact, 0.9)
            for z in self.rng.normal(size=(100, 2)):
                assert self.service.predict_contains(prediction_set, prediction + z) == self.service.contains(base, z)
            self.assert_raises(InputError, self.service.predict_set, artifact, 0.9, [1.0, 2.0, 3.0],
                               expected_message_contains="Dimension mismatch")
            self.print_result(True, "평행이동 불변")
            return True
        except AssertionError as e:
            self.print_result(False, f"평행이동 실패: {e}")
            return False

    def test_export_region(self):
        """원점 복사본은 하나로 내보내고 활성 영역은 모두 유계"""
        self.print_test("영역 내보내기")
        try:
            artifact = self._artifact()
            export = self.service.export_region(self.service.quantile_region(artifact, 0.9), include_scores=True)
            assert len(export.regions) == 1 + 9 * 9
            origin = [r for r in export.regions if r.multiplicity > 1]
            assert len(origin) == 1 and origin[0].multiplicity == 10
            assert all(r.bounded == "proven-bounded" for r in export.regions)
            assert len(export.calib_scores) == 99
            assert export.prediction is None

            shifted = self.service.export_region(self.service.quantile_region(artifact, 0.9), prediction=[1.0, 1.0])
            for a, b in zip(export.regions, shifted.regions):
                normals = np.array(a.normals)
                self.assert_close(b.offsets, np.array(a.offsets) + normals @ np.array([1.0, 1.0]))
                self.assert_close(b.target, np.array(a.target) + 1.0)

            outer = self.service.export_region(self.service.quantile_region(artifact, 1.0))
            assert any(r.bounded == "proven-unbounded" for r in outer.regions)
            self.print_result(True, "내보내기 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"내보내기 실패: {e}")
            return False

    def test_cell_contained_needs_semidiscrete(self):
        self.print_test("셀 포함 영역 모드")
        try:
            artifact = self._artifact((2, 4, 1))
            self.assert_raises(ConfigurationError, self.service.cell_contained_region, artifact, 0.5,
                               expected_message_contains="Mode mismatch", expected_exit_code=3)
            self.print_result(True, "모드 불일치 검출")
            return True
        except AssertionError as e:
            self.print_result(False, f"모드 검사 실패: {e}")
            return False

    def test_classical_interval(self):
        """1차원 순서 통계량 구간"""
        self.print_test("고전 구간")
        try:
            scores = np.arange(1.0, 20.0)
            lower, upper, nominal = ConformalService.classical_interval(scores, 0.1)
            assert (lower, upper) == (1.0, 19.0)
            self.assert_close(nominal, 0.9)

            lower, upper, nominal = ConformalService.classical_interval(scores, 0.3)
            assert (lower, upper) == (3.0, 17.0)
            self.assert_close(nominal, 14 / 20)

            lower, upper, nominal = ConformalService.classical_interval(scores, 0.05)
            assert lower == float("-inf") and upper == float("inf") and nominal == 1.0
            self.print_result(True, "구간 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"구간 불일치: {e}")
            return False
