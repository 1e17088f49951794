"""
저장소 테스트

테스트 항목:
- 아티팩트 JSON 저장 -> 로드 비트 동일, 결정적 출력 (이산 / 준이산)
- 잘못된 JSON 의 줄 번호
- 점수 CSV 파싱 (id 열, 잘못된 행의 줄 번호)
"""

import json

import numpy as np

from app.exceptions import DataFormatError
from app.models.partition import TransportMode
from app.repositories.artifact_repository import ArtifactRepository
from app.repositories.score_table_repository import ScoreTableRepository
from app.services.pipeline_service import PipelineService
from scripts.test.base import BaseTester


class TestRepositories(BaseTester):
    """ArtifactRepository / ScoreTableRepository 테스트"""

    def _fitted(self, n: int = 24):
        scores = self.rng.normal(size=(n, 2))
        fitted, _ = PipelineService().fit(scores, 0.2, seed=5)
        return fitted

    # ==================== 아티팩트 ====================

    def test_artifact_round_trip(self):
        """저장 후 로드한 배열이 비트 단위로 같다"""
        self.print_test("아티팩트 왕복")
        repository = ArtifactRepository(include_meta=False)
        try:
            fitted = self._fitted()
            path = self.tmp_path("artifact.json")
            repository.save(path, fitted)
            loaded = repository.load(path)

            original, restored = fitted.artifact, loaded.artifact
            assert restored.mode == TransportMode.DISCRETE
            for name in ("calib_scores", "centers", "second_moments", "leave_out_costs",
                         "halfspace_offsets", "sub_assignments", "target_norms",
                         "multiplicity", "canonical_index"):
                assert np.array_equal(getattr(original, name), getattr(restored, name)), name
            assert np.array_equal(original.grid.points, restored.grid.points)
            assert np.array_equal(original.grid.directions, restored.grid.directions)
            assert restored.seeds == original.seeds
            assert (loaded.alpha, loaded.j_alpha, loaded.radius, loaded.nominal_mass) == (
                fitted.alpha, fitted.j_alpha, fitted.radius, fitted.nominal_mass
            )
            assert repository.dumps(loaded) == path.read_text(encoding="utf-8")
            self.print_result(True, "비트 동일")
            return True
        except AssertionError as e:
            self.print_result(False, f"왕복 실패: {e}")
            return False

    def test_semidiscrete_round_trip(self):
        """라게르 블록과 셀 최대 노름 복원, 로드 후 무작위 predict 동일"""
        self.print_test("준이산 아티팩트 왕복")
        repository = ArtifactRepository(include_meta=False)
        pipeline = PipelineService()
        try:
            fitted, _ = pipeline.fit(self.rng.normal(size=(19, 2)), 0.3, grid=(4, 5, 0),
                                     mode=TransportMode.SEMIDISCRETE, seed=5, M=50_000)
            text = repository.dumps(fitted)
            loaded = repository.loads(text)
            assert loaded.artifact.mode == TransportMode.SEMIDISCRETE
            assert np.array_equal(fitted.artifact.cell_max_norms, loaded.artifact.cell_max_norms)
            assert np.array_equal(fitted.diagram.weights, loaded.diagram.weights)
            assert np.array_equal(fitted.diagram.cell_counts, loaded.diagram.cell_counts)
            assert int(loaded.diagram.cell_counts.sum()) == 50_000
            assert json.loads(text)["laguerre"]["cell_counts"] == fitted.diagram.cell_counts.tolist()
            assert repository.dumps(loaded) == text

            candidates = self.rng.normal(size=(6, 2))
            before = pipeline.predict(fitted, [0.0, 0.0], candidates, randomized=True, seed=8)
            after = pipeline.predict(loaded, [0.0, 0.0], candidates, randomized=True, seed=8)
            assert [line.model_dump() for line in before] == [line.model_dump() for line in after]
            assert all(line.randomized_norm is not None for line in after)
            self.print_result(True, "무작위 예측 동일")
            return True
        except AssertionError as e:
            self.print_result(False, f"준이산 왕복 실패: {e}")
            return False

    def test_artifact_meta(self):
        self.print_test("아티팩트 메타")
        try:
            fitted = self._fitted()
            with_meta = json.loads(ArtifactRepository().dumps(fitted))
            assert with_meta["meta"]["tool_version"]
            without = json.loads(ArtifactRepository(include_meta=False).dumps(fitted))
            assert without["meta"] is None
            assert without["format_version"] == "1"
            assert isinstance(without["leave_out_costs"][0], str)
            self.print_result(True, "메타 처리")
            return True
        except AssertionError as e:
            self.print_result(False, f"메타 실패: {e}")
            return False

    def test_malformed_artifact(self):
        """잘못된 JSON 은 줄 번호, 스키마 위반과 버전 불일치도 DataFormatError"""
        self.print_test("잘못된 아티팩트")
        repository = ArtifactRepository()
        try:
            broken = '{\n  "format_version": "1",\n  oops\n}\n'
            error = self.assert_raises(DataFormatError, repository.loads, broken, expected_exit_code=2)
            assert error.line == 3 and "line 3" in error.detail, error.detail

            self.assert_raises(DataFormatError, repository.loads, '{"format_version": "1"}',
                               expected_message_contains="Malformed artifact")

            doc = json.loads(ArtifactRepository(include_meta=False).dumps(self._fitted()))
            doc["format_version"] = "99"
            self.assert_raises(DataFormatError, repository.loads, json.dumps(doc),
                               expected_message_contains="format_version")

            self.assert_raises(DataFormatError, repository.load, self.tmp_path("missing.json"),
                               expected_message_contains="File not found")
            self.print_result(True, "모든 형식 오류 검출")
            return True
        except AssertionError as e:
            self.print_result(False, f"형식 오류 검출 실패: {e}")
            return False

    # ==================== 점수 CSV ====================

    def test_score_csv_parsing(self):
        self.print_test("점수 CSV 파싱")
        repository = ScoreTableRepository()
        try:
            table = repository.loads("score_1,score_2\n0.12,-0.40\n1.03, 0.25\n")
            self.assert_close(table.scores, [[0.12, -0.40], [1.03, 0.25]])
            assert table.ids is None and table.columns == ("score_1", "score_2")

            with_ids = repository.loads("id,score_1\na,1.0\nb,2.5\n", dim=1)
            assert with_ids.ids == ["a", "b"]
            self.assert_close(with_ids.scores, [[1.0], [2.5]])

            path = self.tmp_path("scores.csv")
            scores = self.rng.normal(size=(5, 3))
            repository.write(path, scores, ids=[f"r{i}" for i in range(5)])
            loaded = repository.read(path)
            assert np.array_equal(loaded.scores, scores)
            assert loaded.ids == [f"r{i}" for i in range(5)]
            self.print_result(True, "파싱 확인")
            return True
        except AssertionError as e:
            self.print_result(False, f"파싱 실패: {e}")
            return False

    def test_score_csv_errors(self):
        """잘못된 행은 파일 줄 번호와 함께 보고"""
        self.print_test("점수 CSV 오류")
        repository = ScoreTableRepository()
        try:
            cases = [
                ("score_1,score_2\n0.1,0.2\n0.3,0.4\nabc,0.5\n", 4, "Not a number"),
                ("score_1,score_2\n0.1,0.2\n0.3\n", 3, "not rectangular"),
                ("score_1,score_2\n0.1,nan\n", 2, "Non-finite"),
                ("score_1,score_2\n0.1,0.2\n0.3,0.4,0.5\n", 3, "not rectangular"),
            ]
            for text, line, fragment in cases:
                error = self.assert_raises(DataFormatError, repository.loads, text,
                                           expected_message_contains=fragment, expected_exit_code=2)
                assert error.message == "Malformed CSV"
                assert error.line == line, (text, error.line, line)

            self.assert_raises(DataFormatError, repository.loads, "", expected_message_contains="Empty")
            self.assert_raises(DataFormatError, repository.loads, "score_1\n0.1\n", dim=2,
                               expected_message_contains="Expected 2")
            self.print_result(True, "줄 번호 일치")
            return True
        except AssertionError as e:
            self.print_result(False, f"오류 보고 실패: {e}")
            return False
