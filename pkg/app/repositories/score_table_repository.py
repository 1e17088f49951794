import io
import logging
import math
import re
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from app.exceptions import DataFormatError
from app.models.score import ScoreTable
from app.utils.numbers import encode_float
from app.utils.transaction import atomic_write

logger = logging.getLogger(__name__)

ID_COLUMN = "id"
# 헤더가 1행이므로 데이터 행 i 는 파일의 i+2 번째 줄
HEADER_LINES = 1

_PARSER_LINE = re.compile(r"line (\d+)")


class ScoreTableRepository:
    """점수/후보 CSV 읽기·쓰기

    형식: 헤더 1행, 선택적 id 열, 나머지 열은 모두 실수 (score_1..score_d).
    """

    def __init__(self, column_prefix: str = "score"):
        self.column_prefix = column_prefix

    # ==================== 읽기 ====================

    def read(self, path: Union[str, Path], dim: Optional[int] = None) -> ScoreTable:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataFormatError(message="File not found", detail=f"Cannot read {path}: {exc}")
        table = self.loads(text, dim=dim)
        logger.info(f"Loaded {table.n} rows x {table.dim} columns from {path}")
        return table

    def loads(self, text: str, dim: Optional[int] = None) -> ScoreTable:
        frame = self._parse(text)
        columns = [str(c).strip() for c in frame.columns]
        has_id = bool(columns) and columns[0].lower() == ID_COLUMN
        value_columns = columns[1:] if has_id else columns
        if not value_columns:
            raise DataFormatError(message="Malformed CSV", detail="No numeric columns in header", line=1)
        if dim is not None and len(value_columns) != dim:
            raise DataFormatError(
                message="Malformed CSV",
                detail=f"Expected {dim} numeric columns, got {len(value_columns)}",
                line=1,
            )

        raw = frame.to_numpy(dtype=object)
        offset = 1 if has_id else 0
        scores = np.empty((raw.shape[0], len(value_columns)), dtype=float)
        ids: List[str] = []
        for i, row in enumerate(raw):
            line = i + HEADER_LINES + 1
            if any(self._missing(v) for v in row):
                raise DataFormatError(message="Malformed CSV", detail="Row is not rectangular", line=line)
            if has_id:
                ids.append(str(row[0]).strip())
            for c, value in enumerate(row[offset:]):
                scores[i, c] = self._to_float(value, line)

        return ScoreTable(
            scores=scores,
            ids=ids if has_id else None,
            columns=tuple(value_columns),
        )

    def _parse(self, text: str) -> pd.DataFrame:
        if not text.strip():
            raise DataFormatError(message="Malformed CSV", detail="Empty file", line=1)
        try:
            return pd.read_csv(
                io.StringIO(text),
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=False,
                skipinitialspace=True,
            )
        except pd.errors.ParserError as exc:
            match = _PARSER_LINE.search(str(exc))
            raise DataFormatError(
                message="Malformed CSV",
                detail="Row is not rectangular",
                line=int(match.group(1)) if match else None,
            )
        except pd.errors.EmptyDataError:
            raise DataFormatError(message="Malformed CSV", detail="Empty file", line=1)

    @staticmethod
    def _missing(value) -> bool:
        return value is None or (isinstance(value, float) and math.isnan(value))

    @staticmethod
    def _to_float(value, line: int) -> float:
        try:
            number = float(str(value).strip())
        except ValueError:
            raise DataFormatError(message="Malformed CSV", detail=f"Not a number: {value!r}", line=line)
        if not math.isfinite(number):
            raise DataFormatError(message="Malformed CSV", detail=f"Non-finite entry: {value!r}", line=line)
        return number

    # ==================== 쓰기 ====================

    def dumps(self, scores, ids: Optional[List[str]] = None) -> str:
        scores = np.atleast_2d(np.asarray(scores, dtype=float))
        columns = [f"{self.column_prefix}_{c + 1}" for c in range(scores.shape[1])]
        frame = pd.DataFrame([[encode_float(v) for v in row] for row in scores], columns=columns)
        if ids is not None:
            frame.insert(0, ID_COLUMN, list(ids))
        return frame.to_csv(index=False, lineterminator="\n")

    def write(self, path: Union[str, Path], scores, ids: Optional[List[str]] = None) -> None:
        payload = self.dumps(scores, ids)
        try:
            with atomic_write(path) as fh:
                fh.write(payload)
        except OSError as exc:
            raise DataFormatError(message="File not found", detail=f"Cannot write {path}: {exc}")
