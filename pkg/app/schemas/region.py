from typing import List, Optional

from pydantic import BaseModel


class RegionExport(BaseModel):
    """A_j Z ≤ b_j 형태로 쌓은 활성 영역 하나"""
    index: int
    multiplicity: int
    target: List[float]
    normals: List[List[float]]
    offsets: List[float]
    bounded: str

    class Config:
        from_attributes = True


class QuantileRegionExport(BaseModel):
    """Ω_r (선택적으로 ŷ 평행이동) 내보내기"""
    mode: str
    radius: float
    nominal_mass: float
    active_indices: List[int]
    prediction: Optional[List[float]] = None
    regions: List[RegionExport]
    calib_scores: Optional[List[List[float]]] = None


class FigureExport(BaseModel):
    """그림 재현용 데이터 묶음"""
    name: str
    description: str
    panels: List[QuantileRegionExport]
