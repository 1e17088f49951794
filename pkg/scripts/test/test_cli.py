"""
명령줄 도구 테스트

click.testing.CliRunner 로 main.cli 를 직접 호출한다.
"""

import json

import numpy as np
from click.testing import CliRunner

from app.exceptions import EXIT_CONFIG, EXIT_INPUT, EXIT_OK
from app.repositories.score_table_repository import ScoreTableRepository
from main import cli
from scripts.test.base import BaseTester


class TestCli(BaseTester):
    """CLI 명령 테스트"""

    def setup_method(self, method=None):
        super().setup_method(method)
        self.runner = CliRunner()

    def _invoke(self, *args):
        return self.runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)

    def _scores_file(self, n: int = 99, d: int = 2):
        path = self.tmp_path("scores.csv")
        ScoreTableRepository().write(path, self.rng.normal(size=(n, d)), ids=[f"c{i}" for i in range(n)])
        return path

    def _error(self, result) -> dict:
        # 에러 JSON 은 stderr 마지막 줄
        stderr = result.stderr if hasattr(result, "stderr") else result.output
        lines = [line for line in stderr.strip().splitlines() if line.startswith("{")]
        return json.loads(lines[-1])

    def test_plan(self):
        self.print_test("plan")
        try:
            result = self._invoke("plan", "--n-plus-1", 100, "--dim", 2, "--alpha", 0.1)
            assert result.exit_code == EXIT_OK, result.output
            assert "grid: n_R=10 n_S=9 n_o=10 (n+1=100, d=2)" in result.output
            assert "j_alpha: 9" in result.output
            assert "r_alpha: 0.9" in result.output
            assert "nominal_mass: 0.91" in result.output

            bad = self._invoke("plan", "--n-plus-1", 100, "--dim", 2, "--grid", "10,9,9")
            assert bad.exit_code == EXIT_CONFIG
            self.print_result(True, "요약 출력")
            return True
        except AssertionError as e:
            self.print_result(False, f"plan 실패: {e}")
            return False

    def test_fit_predict_export(self):
        """fit -> predict -> export-region"""
        self.print_test("fit / predict / export")
        try:
            scores = self._scores_file()
            artifact = self.tmp_path("artifact.json")
            fit = self._invoke("fit", "--scores", scores, "--alpha", 0.1, "--seed", 7, "--out", artifact)
            assert fit.exit_code == EXIT_OK, fit.output
            assert "r_alpha: 0.9" in fit.output and artifact.exists()

            candidates = self.tmp_path("candidates.csv")
            ScoreTableRepository().write(candidates, [[1.0, 2.0], [1.1, 2.1], [40.0, -30.0]])
            predict = self._invoke(
                "predict", "--artifact", artifact, "--prediction", "1,2",
                "--candidates", candidates, "--cpd",
            )
            assert predict.exit_code == EXIT_OK, predict.output
            lines = [json.loads(line) for line in predict.stdout.strip().splitlines()]
            assert len(lines) == 3
            assert lines[0]["candidate"] == [1.0, 2.0]
            assert lines[2]["member"] is False
            for line in lines:
                assert set(line) >= {"candidate", "member", "assigned_index", "norm_rank", "vector_rank"}
                assert line["member"] == (line["norm_rank"] <= 0.9 + 1e-12)
                self.assert_close(np.linalg.norm(line["vector_rank"]), line["norm_rank"], tol=1e-12)

            region = self.tmp_path("region.json")
            export = self._invoke("export-region", "--artifact", artifact, "--r", 0.9,
                                  "--prediction", "1,2", "--out", region)
            assert export.exit_code == EXIT_OK, export.output
            payload = json.loads(region.read_text(encoding="utf-8"))
            assert payload["radius"] == 0.9 and payload["prediction"] == [1.0, 2.0]
            assert len(payload["active_indices"]) == 91
            assert all(r["bounded"] == "proven-bounded" for r in payload["regions"])
            self.print_result(True, "파이프라인 완료")
            return True
        except AssertionError as e:
            self.print_result(False, f"파이프라인 실패: {e}")
            return False

    def test_malformed_csv_exit_code(self):
        self.print_test("잘못된 CSV 종료 코드")
        try:
            path = self.tmp_path("bad.csv")
            path.write_text("score_1,score_2\n0.1,0.2\n0.3,0.4\nabc,0.5\n", encoding="utf-8")
            result = self._invoke("fit", "--scores", path, "--alpha", 0.1, "--out", self.tmp_path("a.json"))
            assert result.exit_code == EXIT_INPUT, result.output
            error = self._error(result)
            assert error["error"] == "DataFormatError" and "line 4" in error["detail"], error
            self.print_result(True, "종료 코드 2")
            return True
        except AssertionError as e:
            self.print_result(False, f"CSV 오류 처리 실패: {e}")
            return False

    def test_randomized_on_discrete(self):
        self.print_test("이산 아티팩트에 --randomized")
        try:
            artifact = self.tmp_path("artifact.json")
            fit = self._invoke("fit", "--scores", self._scores_file(24), "--alpha", 0.2, "--out", artifact)
            assert fit.exit_code == EXIT_OK, fit.output
            candidates = self.tmp_path("candidates.csv")
            ScoreTableRepository().write(candidates, [[0.0, 0.0]])
            result = self._invoke("predict", "--artifact", artifact, "--prediction", "0,0",
                                  "--candidates", candidates, "--randomized")
            assert result.exit_code == EXIT_CONFIG, result.output
            assert "Mode mismatch" in self._error(result)["message"]
            self.print_result(True, "종료 코드 3")
            return True
        except AssertionError as e:
            self.print_result(False, f"모드 검사 실패: {e}")
            return False

    def test_outermost_shell_warning(self):
        """--grid 9,11,1, α=0.1 → r=1 경고"""
        self.print_test("비유계 경고")
        try:
            result = self._invoke("fit", "--scores", self._scores_file(), "--alpha", 0.1,
                                  "--grid", "9,11,1", "--out", self.tmp_path("a.json"))
            assert result.exit_code == EXIT_OK, result.output
            assert "r_alpha: 1.0" in result.output
            assert "warning: region may be unbounded (r=1)" in result.output
            self.print_result(True, "경고 출력")
            return True
        except AssertionError as e:
            self.print_result(False, f"경고 없음: {e}")
            return False

    def test_fit_deterministic(self):
        """--no-meta 이면 같은 입력/시드에서 바이트 동일"""
        self.print_test("fit 결정성")
        try:
            scores = self._scores_file(30)
            first, second = self.tmp_path("first.json"), self.tmp_path("second.json")
            for out in (first, second):
                result = self._invoke("fit", "--scores", scores, "--alpha", 0.1, "--seed", 3,
                                      "--no-meta", "--out", out)
                assert result.exit_code == EXIT_OK, result.output
            assert first.read_bytes() == second.read_bytes()
            self.print_result(True, "바이트 동일")
            return True
        except AssertionError as e:
            self.print_result(False, f"결정성 실패: {e}")
            return False

    def test_figures(self):
        """활성 셀 패널 r = 0.8, 0.999, 1, r_α (격자 10,9,10)"""
        self.print_test("figures")
        try:
            out_dir = self.tmp_path("figures")
            result = self._invoke("figures", "--out-dir", out_dir, "--seed", 4)
            assert result.exit_code == EXIT_OK, result.output
            cells = json.loads((out_dir / "active_cells.json").read_text(encoding="utf-8"))
            radii = [panel["radius"] for panel in cells["panels"]]
            assert radii == [0.8, 0.999, 1.0, 0.9], radii
            assert [len(p["active_indices"]) for p in cells["panels"]] == [82, 91, 100, 91]
            assert all(len(p["calib_scores"]) == 99 for p in cells["panels"])
            for name in ("gaussian", "banana"):
                figure = json.loads((out_dir / f"{name}.json").read_text(encoding="utf-8"))
                assert len(figure["panels"]) == 1 and figure["panels"][0]["radius"] == 0.9
            self.print_result(True, "그림 데이터 생성")
            return True
        except AssertionError as e:
            self.print_result(False, f"figures 실패: {e}")
            return False

    def test_simulate(self):
        self.print_test("simulate")
        try:
            result = self._invoke("simulate", "--scenario", "gaussian", "--n", 19, "--reps", 30, "--seed", 1)
            assert result.exit_code == EXIT_OK, result.output
            header, row = result.stdout.strip().splitlines()[:2]
            assert header.startswith("scenario,n,alpha,trials,hits,empirical_coverage,nominal")
            assert row.startswith("gaussian,19,0.1,30,")

            config = self.tmp_path("scenario.yaml")
            config.write_text("scenario: uniform1d\nn: 4\nreps: 20\nseed: 2\n", encoding="utf-8")
            from_yaml = self._invoke("simulate", "--config", config, "--pit")
            assert from_yaml.exit_code == EXIT_OK, from_yaml.output
            assert "position,count,frequency,expected" in from_yaml.stdout

            unknown = self._invoke("simulate", "--scenario", "cauchy", "--n", 9, "--reps", 5)
            assert unknown.exit_code == EXIT_CONFIG, unknown.output
            self.print_result(True, "CSV 출력과 종료 코드")
            return True
        except AssertionError as e:
            self.print_result(False, f"simulate 실패: {e}")
            return False
