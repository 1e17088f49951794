import json

import click

from app.dependencies.error_handlers import with_error_handlers
from app.dependencies.services import (
    get_artifact_repository,
    get_pipeline_service,
    get_score_table_repository,
)
from app.exceptions import InputError
from app.utils.numbers import parse_vector


def read_prediction(value: str):
    try:
        return parse_vector(value)
    except ValueError:
        raise InputError(message="Invalid input", detail=f"--prediction expects comma-separated reals, got {value!r}")


@click.command("predict")
@click.option("--artifact", "artifact_path", required=True, type=click.Path(dir_okay=False))
@click.option("--prediction", "prediction_value", required=True, help="ŷ(x), 쉼표 구분 실수")
@click.option("--candidates", "candidates_path", required=True, type=click.Path(dir_okay=False))
@click.option("--cpd", is_flag=True, default=False, help="vector_rank 포함")
@click.option("--randomized", is_flag=True, default=False, help="준이산 셀 내부 무작위 수송")
@click.option("--seed", type=int, default=None)
@with_error_handlers
def cmd_predict(artifact_path, prediction_value, candidates_path, cpd, randomized, seed):
    """
    후보별 예측 집합 소속 판정 (JSON lines)
    - member, assigned_index, norm_rank
    - --cpd: vector_rank, monotonicity
    - --randomized: randomized_norm (준이산 아티팩트만)
    """
    fitted = get_artifact_repository().load(artifact_path)
    prediction = read_prediction(prediction_value)
    candidates = get_score_table_repository().read(candidates_path, dim=fitted.artifact.dim)
    lines = get_pipeline_service().predict(
        fitted,
        prediction,
        candidates.scores,
        cpd=cpd,
        randomized=randomized,
        seed=seed,
    )
    for line in lines:
        click.echo(json.dumps(line.model_dump(exclude_none=True)))
