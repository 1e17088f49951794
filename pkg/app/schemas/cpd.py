from typing import List, Optional

from pydantic import BaseModel, model_validator


class CpdEvaluation(BaseModel):
    """후보 y 하나에 대한 벡터 CPD 평가"""
    candidate: List[float]
    score: List[float]
    assigned_index: int
    vector_rank: List[float]
    norm_rank: float
    randomized_point: Optional[List[float]] = None
    randomized_norm: Optional[float] = None
    monotonicity: str = "guaranteed"

    class Config:
        from_attributes = True


class DempsterHillInterval(BaseModel):
    """[Q(y,0), Q(y,1)] 과 선택적 Q(y,τ)"""
    lower: float
    upper: float
    randomized_value: Optional[float] = None

    @model_validator(mode='after')
    def check_bounds(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")
        return self


class PredictionLine(BaseModel):
    """predict 명령의 JSON lines 한 줄"""
    candidate: List[float]
    member: bool
    assigned_index: int
    norm_rank: float
    vector_rank: Optional[List[float]] = None
    randomized_norm: Optional[float] = None
    monotonicity: Optional[str] = None
