import logging
from functools import lru_cache
from os import getenv

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class Settings(BaseModel):
    """수치 기본값 모음

    환경 변수로 바꾸는 것은 ENVIRONMENT / LOG_LEVEL 뿐이고,
    나머지는 호출 시 인자로 덮어쓴다.
    """
    membership_tol: float = Field(1e-9, description="영역 소속 판정의 절대 허용 오차")
    tie_tol: float = Field(1e-9, description="비용 동률 판정 허용 오차")
    ray_samples: int = Field(4096, description="비유계성 반증용 샘플 방향 수")
    ray_seed: int = Field(20240601, description="샘플 방향 시드")
    mc_sample_size: int = Field(200_000, description="라게르 셀 질량 추정용 몬테카를로 표본 크기")
    mass_tol: float = Field(5e-3, description="셀 질량 허용 편차")
    dual_max_iter: int = Field(500, description="쌍대 상승 반복 한도")
    rejection_cap: int = Field(1_000_000, description="기각 샘플링 제안 한도")
    inclusion_margin: float = Field(1e-3, description="A_k ⊆ B(0,r) 인증 여유")
    batch_size: int = Field(500, description="시뮬레이션 배치 크기")


@lru_cache
def get_settings() -> Settings:
    return Settings()


def load_environment() -> None:
    """.env 파일이 있으면 로드"""
    load_dotenv()


def log_level() -> int:
    level = getenv("LOG_LEVEL", "WARNING").upper()
    return getattr(logging, level, logging.WARNING)
