import functools
import sys
from typing import Callable

import click

from app.exceptions import (
    EXIT_OK,
    AppException,
    app_exception_handler,
    general_exception_handler,
)


def with_error_handlers(func: Callable) -> Callable:
    """CLI 명령에 전역 예외 핸들러를 씌운다

    AppException은 JSON 에러 객체 + 고유 종료 코드로,
    그 밖의 예외는 InternalError로 변환된다.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            func(*args, **kwargs)
        except AppException as exc:
            sys.exit(app_exception_handler(exc))
        except (SystemExit, KeyboardInterrupt, click.exceptions.Exit, click.ClickException):
            raise
        except Exception as exc:
            sys.exit(general_exception_handler(exc))
        return EXIT_OK

    return wrapper
