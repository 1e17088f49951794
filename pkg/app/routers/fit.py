import click

from app.dependencies.error_handlers import with_error_handlers
from app.dependencies.services import (
    get_artifact_repository,
    get_pipeline_service,
    get_score_table_repository,
)
from app.exceptions import ConfigurationError
from app.models.partition import TransportMode
from app.schemas.grid import GridSummary


def parse_grid(value):
    """'nR,nS,nO' -> (n_R, n_S, n_o)"""
    if value is None:
        return None
    try:
        triple = tuple(int(part) for part in value.split(","))
    except ValueError:
        triple = ()
    if len(triple) != 3:
        raise ConfigurationError(
            message="Invalid grid plan",
            detail=f"--grid expects nR,nS,nO, got {value!r}"
        )
    return triple


def echo_summary(summary: GridSummary) -> None:
    click.echo(f"grid: n_R={summary.n_radii} n_S={summary.n_dirs} n_o={summary.n_origin} (n+1={summary.n_plus_1}, d={summary.dim})")
    if summary.j_alpha is not None:
        click.echo(f"j_alpha: {summary.j_alpha}")
        click.echo(f"r_alpha: {summary.radius!r}")
        click.echo(f"nominal_mass: {summary.nominal_mass!r}")
    if summary.may_be_unbounded:
        click.echo("warning: region may be unbounded (r=1)", err=True)


@click.command("fit")
@click.option("--scores", "scores_path", required=True, type=click.Path(dir_okay=False), help="보정 점수 CSV")
@click.option("--alpha", required=True, type=float)
@click.option("--grid", "grid_value", default=None, help="nR,nS,nO (생략 시 자동 분해)")
@click.option("--mode", type=click.Choice([m.value for m in TransportMode]), default=TransportMode.DISCRETE.value)
@click.option("--seed", type=int, default=None)
@click.option("--mc-samples", "mc_samples", type=int, default=None, help="준이산 몬테카를로 표본 크기 M")
@click.option("--mass-tol", type=float, default=None, help="준이산 셀 질량 허용 편차")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--no-meta", is_flag=True, default=False, help="타임스탬프/버전 메타데이터 생략")
@with_error_handlers
def cmd_fit(scores_path, alpha, grid_value, mode, seed, mc_samples, mass_tol, out_path, no_meta):
    """
    보정 점수로 분할 아티팩트 생성
    - 그리드 분해, j_α, r_α, 명목 질량 출력
    - r_α = 1 이면 비유계 가능 경고
    """
    grid = parse_grid(grid_value)
    table = get_score_table_repository().read(scores_path)
    fitted, summary = get_pipeline_service().fit(
        table.scores,
        alpha,
        grid=grid,
        mode=TransportMode(mode),
        seed=seed,
        M=mc_samples,
        mass_tol=mass_tol,
    )
    get_artifact_repository(include_meta=not no_meta).save(out_path, fitted)
    echo_summary(summary)


@click.command("plan")
@click.option("--n-plus-1", "n_plus_1", required=True, type=int)
@click.option("--dim", required=True, type=int)
@click.option("--alpha", type=float, default=None)
@click.option("--grid", "grid_value", default=None, help="nR,nS,nO 검증만")
@click.option("--seed", type=int, default=None)
@with_error_handlers
def cmd_plan(n_plus_1, dim, alpha, grid_value, seed):
    """그리드 분해와 (alpha 가 있으면) r_α, 명목 질량 출력"""
    service = get_pipeline_service()
    plan, choice = service.plan(n_plus_1, dim, alpha=alpha, grid=parse_grid(grid_value), seed=seed)
    echo_summary(service.summarize(plan, choice))
