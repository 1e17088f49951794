import json
from pathlib import Path

import click

from app.dependencies.error_handlers import with_error_handlers
from app.dependencies.services import get_artifact_repository, get_pipeline_service
from app.exceptions import DataFormatError
from app.routers.predict import read_prediction
from app.utils.transaction import atomic_write


def write_json(path, payload: dict) -> None:
    try:
        with atomic_write(path) as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise DataFormatError(message="File not found", detail=f"Cannot write {path}: {exc}")


@click.command("export-region")
@click.option("--artifact", "artifact_path", required=True, type=click.Path(dir_okay=False))
@click.option("--r", "radius", required=True, type=float)
@click.option("--prediction", "prediction_value", default=None, help="ŷ(x) 평행이동 (쉼표 구분)")
@click.option("--with-scores", is_flag=True, default=False, help="보정 점수 포함")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@with_error_handlers
def cmd_export_region(artifact_path, radius, prediction_value, with_scores, out_path):
    """
    활성 인덱스 I_r 과 영역별 A_j Z ≤ b_j 내보내기
    - 영역마다 유계성 삼상태 (proven-bounded / proven-unbounded / unknown)
    """
    fitted = get_artifact_repository().load(artifact_path)
    prediction = None if prediction_value is None else read_prediction(prediction_value)
    export = get_pipeline_service().export(fitted, radius, prediction=prediction, include_scores=with_scores)
    write_json(out_path, export.model_dump())
    click.echo(f"exported {len(export.regions)} regions (|I_r|={len(export.active_indices)}) to {out_path}")


@click.command("figures")
@click.option("--out-dir", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=0)
@with_error_handlers
def cmd_figures(out_dir, seed):
    """분위 영역 그림용 데이터 (이미지는 만들지 않는다)"""
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataFormatError(message="File not found", detail=f"Cannot create {out_dir}: {exc}")
    for figure in get_pipeline_service().figures(seed=seed):
        path = directory / f"{figure.name}.json"
        write_json(path, figure.model_dump())
        click.echo(f"{figure.name}: {len(figure.panels)} panels -> {path}")
