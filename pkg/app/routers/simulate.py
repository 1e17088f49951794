import logging
from pathlib import Path
from typing import Optional

import click
import pandas as pd
import yaml
from pydantic import ValidationError as PydanticValidationError

from app.dependencies.error_handlers import with_error_handlers
from app.dependencies.services import get_cpd_service, get_simulation_service
from app.exceptions import ConfigurationError, DataFormatError
from app.routers.fit import parse_grid
from app.schemas.conformal import (
    CoverageReport,
    PitHistogram,
    ScenarioConfig,
    SimulationMethod,
)

logger = logging.getLogger(__name__)


def load_config(config_path: Optional[str], overrides: dict) -> ScenarioConfig:
    """YAML 설정 위에 명시된 플래그를 덮어쓴다"""
    data = {}
    if config_path is not None:
        try:
            data = yaml.safe_load(Path(config_path).read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise DataFormatError(message="File not found", detail=f"Cannot read {config_path}: {exc}")
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise DataFormatError(
                message="Invalid input",
                detail=f"YAML parse error: {exc}",
                line=None if mark is None else mark.line + 1,
            )
        if not isinstance(data, dict):
            raise ConfigurationError(message="Invalid input", detail="Scenario config must be a mapping")
    data.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return ScenarioConfig.model_validate(data)
    except PydanticValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        raise ConfigurationError(message="Invalid input", detail=f"{field}: {error['msg']}")


def to_csv(rows) -> str:
    return pd.DataFrame(rows).to_csv(index=False, lineterminator="\n")


def coverage_csv(report: CoverageReport) -> str:
    return to_csv([report.model_dump()])


def pit_csv(histogram: PitHistogram) -> str:
    table = to_csv({
        "position": histogram.positions,
        "count": histogram.counts,
        "frequency": histogram.frequencies,
        "expected": histogram.expected,
    })
    summary = to_csv([{
        "trials": histogram.trials,
        "signed": histogram.signed,
        "chi2_statistic": histogram.chi2_statistic,
        "chi2_pvalue": histogram.chi2_pvalue,
    }])
    return table + "\n" + summary


def ks_csv(reports) -> str:
    return to_csv([report.model_dump() for report in reports])


@click.command("simulate")
@click.option("--scenario", default=None, help="gaussian | banana | uniform1d | normal1d | coin1d")
@click.option("--n", "n", type=int, default=None, help="보정 표본 크기")
@click.option("--alpha", type=float, default=None)
@click.option("--reps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--grid", "grid_value", default=None, help="nR,nS,nO")
@click.option("--method", type=click.Choice([m.value for m in SimulationMethod]), default=None)
@click.option("--pit", is_flag=True, default=False, help="‖ψ(Z_{n+1})‖ 껍질 표 추가")
@click.option("--randomized-pit", is_flag=True, default=False, help="준이산 무작위 PIT 의 KS 보고")
@click.option("--dh", is_flag=True, default=False, help="Dempster-Hill PIT 의 KS 보고 (1차원)")
@click.option("--tau", type=float, default=None, help="Dempster-Hill 고정 τ")
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False), help="YAML 시나리오 설정")
@with_error_handlers
def cmd_simulate(scenario, n, alpha, reps, seed, grid_value, method, pit, randomized_pit, dh, tau, config_path):
    """
    커버리지 몬테카를로 (CSV 를 stdout 으로)
    - 명목값과 이항 95% 반폭 포함
    - 같은 시드면 같은 출력
    """
    grid = parse_grid(grid_value)
    config = load_config(config_path, {
        "scenario": scenario,
        "n": n,
        "alpha": alpha,
        "reps": reps,
        "seed": seed,
        "grid": None if grid is None else list(grid),
        "method": method,
        "pit": pit or None,
        "tau": tau,
    })
    logger.info(f"Simulating {config.scenario}: n={config.n}, alpha={config.alpha}, reps={config.reps}")

    if dh:
        click.echo(ks_csv([get_cpd_service().dh_pit_suite(config)]), nl=False)
        return

    service = get_simulation_service()
    if randomized_pit:
        report = service.randomized_pit(config)
        click.echo(ks_csv([report.randomized, report.non_randomized]), nl=False)
        return

    click.echo(coverage_csv(service.simulate_coverage(config)), nl=False)
    if config.pit:
        click.echo("")
        click.echo(pit_csv(service.pit_histogram(config)), nl=False)
