from enum import Enum as PyEnum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class SimulationMethod(PyEnum):
    AUGMENTED = "augmented"
    STREAM = "stream"


# ============================================================================
# Radius / Coverage Schemas
# ============================================================================

class RadiusChoice(BaseModel):
    """conformal_radius 결과"""
    alpha: float
    j_alpha: int
    radius: float
    nominal_mass: float
    may_be_unbounded: bool = False


class CoverageReport(BaseModel):
    """커버리지 시뮬레이션 결과"""
    scenario: str
    n: int
    alpha: float
    trials: int = Field(..., ge=0)
    hits: int = Field(..., ge=0)
    empirical_coverage: float
    nominal: float
    binomial_95_halfwidth: float
    baseline_coverage: Optional[float] = None
    baseline_nominal: Optional[float] = None

    class Config:
        from_attributes = True

    @model_validator(mode='after')
    def check_hits(self):
        if self.hits > self.trials:
            raise ValueError("hits cannot exceed trials")
        return self


class PitHistogram(BaseModel):
    """‖ψ(Z_{n+1})‖ 껍질별 빈도 (signed 이면 1차원 부호 위치)"""
    scenario: str
    trials: int
    signed: bool = False
    positions: List[float]
    counts: List[int]
    frequencies: List[float]
    expected: List[float]
    chi2_statistic: Optional[float] = None
    chi2_pvalue: Optional[float] = None


class KsReport(BaseModel):
    """Uniform(0,1) 대비 KS 검정"""
    label: str
    reps: int
    statistic: float
    pvalue: float
    critical_value: float
    passed: bool


class RandomizedPitReport(BaseModel):
    """무작위 준이산 PIT: 무작위 노름과 비무작위 노름의 KS 비교"""
    scenario: str
    n: int
    reps: int
    max_mass_deviation: float
    randomized: KsReport
    non_randomized: KsReport


# ============================================================================
# Scenario Config
# ============================================================================

class ScenarioConfig(BaseModel):
    """시뮬레이션 시나리오 설정 (CLI 플래그 또는 YAML)"""
    scenario: str = Field(..., description="gaussian | banana | uniform1d | normal1d | coin1d")
    n: int = Field(..., ge=1, description="보정 표본 크기")
    alpha: float = Field(0.1, gt=0, lt=1)
    reps: int = Field(1000, ge=1)
    seed: Optional[int] = None
    grid: Optional[List[int]] = Field(None, description="[n_R, n_S, n_o]")
    method: SimulationMethod = SimulationMethod.AUGMENTED
    pit: bool = False
    tau: Optional[float] = Field(None, ge=0, le=1, description="고정 τ (None 이면 매번 추출)")
    mass_tol: Optional[float] = None
    mc_sample_size: Optional[int] = None

    @model_validator(mode='after')
    def check_grid(self):
        if self.grid is not None and len(self.grid) != 3:
            raise ValueError("grid must be [n_R, n_S, n_o]")
        return self
