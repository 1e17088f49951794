import logging
import sys

import click

from app import __version__
from app.config import load_environment, log_level
from app.routers import COMMANDS


@click.group()
@click.version_option(__version__)
def cli():
    """벡터 점수 등각 예측 (최적 수송 기반) 명령줄 도구"""


# 모든 하위 명령을 메인 그룹에 포함
for command in COMMANDS:
    cli.add_command(command)


def main():
    load_environment()
    logging.basicConfig(
        level=log_level(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    cli()


if __name__ == "__main__":
    main()
