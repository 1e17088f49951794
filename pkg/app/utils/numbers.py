from typing import Any, List

import numpy as np


def encode_float(value: float) -> str:
    # repr 는 최단 왕복 10진 표현
    return repr(float(value))


def decode_float(text: str) -> float:
    return float(text)


def encode_array(values: Any) -> Any:
    """numpy 배열 -> 중첩 리스트(문자열 숫자)"""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return encode_float(arr)
    return [encode_array(row) for row in arr]


def decode_array(values: Any) -> np.ndarray:
    return np.asarray(_decode_nested(values), dtype=float)


def _decode_nested(values: Any) -> Any:
    if isinstance(values, (list, tuple)):
        return [_decode_nested(v) for v in values]
    return decode_float(values)


def parse_vector(text: str) -> np.ndarray:
    """'0.1,-2,3e-1' 형태의 쉼표 구분 실수 문자열"""
    parts: List[str] = [p.strip() for p in text.split(",") if p.strip()]
    return np.asarray([float(p) for p in parts], dtype=float)
