import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Union


@contextmanager
def atomic_write(path: Union[str, Path], mode: str = "w") -> Iterator[IO]:
    """
    파일 쓰기 트랜잭션 컨텍스트 매니저

    사용 예시:
        with atomic_write(out_path) as fh:
            fh.write(payload)
            # 예외 발생 시 임시 파일 삭제, 정상 종료 시 rename

    규칙:
        - 같은 디렉토리의 임시 파일에 쓴 뒤 os.replace로 교체
        - 예외 발생 시 임시 파일 제거 후 예외 재발생
        - 기존 파일은 성공할 때만 덮어쓴다
    """
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=directory)
    try:
        with os.fdopen(fd, mode, encoding=None if "b" in mode else "utf-8", newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp_name, target)
    except Exception:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
