from typing import Dict, Optional

import numpy as np

# 하나의 --seed 가 나뉘어 들어가는 하위 스트림 이름 (순서 고정)
STREAM_NAMES = ("grid", "scenario", "dual", "tau", "audit", "rays")


def fan_out(seed: Optional[int]) -> Dict[str, np.random.SeedSequence]:
    """마스터 시드를 이름 붙은 하위 SeedSequence로 분기"""
    root = np.random.SeedSequence(seed)
    children = root.spawn(len(STREAM_NAMES))
    return dict(zip(STREAM_NAMES, children))


def stream(seed: Optional[int], name: str) -> np.random.Generator:
    """이름 붙은 하위 스트림의 Generator"""
    return np.random.default_rng(fan_out(seed)[name])


def derive_int(seed: Optional[int], name: str) -> int:
    """하위 스트림에서 정수 시드 하나를 뽑는다 (grid direction_seed 등)"""
    return int(fan_out(seed)[name].generate_state(1)[0])
