from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.schemas.grid import GridPlan

# 숫자는 최단 왕복 10진 문자열 (repr) 로 저장
FORMAT_VERSION = "1"


# ============================================================================
# Artifact File Schemas
# ============================================================================

class GridFile(BaseModel):
    """그리드 계획 + 점 (재생성 없이 그대로 복원)"""
    plan: GridPlan
    directions: List[List[str]]
    points: List[List[str]]
    norms: List[str]
    shells: List[int]


class LaguerreFile(BaseModel):
    """준이산 모드의 라게르 다이어그램"""
    weights: List[str]
    mass_estimates: List[str]
    mc_sample_size: int
    seed: int
    deviation: str
    iterations: int = 0
    cell_counts: List[int] = Field(default_factory=list)


class ArtifactMeta(BaseModel):
    created_at: str
    tool_version: str


class ArtifactFile(BaseModel):
    """fit 결과 JSON 문서"""
    format_version: str = FORMAT_VERSION
    mode: str
    grid: GridFile
    calib_scores: List[List[str]]
    leave_out_costs: List[str]
    halfspace_offsets: List[List[str]]
    sub_assignments: List[List[int]]
    centers: List[List[str]]
    second_moments: List[str]
    cell_max_norms: Optional[List[str]] = None
    laguerre: Optional[LaguerreFile] = None
    alpha: Optional[str] = None
    j_alpha: Optional[int] = None
    radius: Optional[str] = None
    nominal_mass: Optional[str] = None
    seeds: Dict[str, int] = Field(default_factory=dict)
    meta: Optional[ArtifactMeta] = None
