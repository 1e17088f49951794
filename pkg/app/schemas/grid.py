from pydantic import BaseModel, Field, model_validator


class GridPlan(BaseModel):
    """n+1 = n_R·n_S + n_o 분해"""
    n_plus_1: int = Field(..., ge=1, description="타깃 점 개수 (보정 표본 n + 1)")
    dim: int = Field(1, ge=1)
    n_radii: int = Field(..., ge=1, description="n_R")
    n_dirs: int = Field(..., ge=0, description="n_S")
    n_origin: int = Field(..., ge=0, description="n_o")
    direction_seed: int = 0

    class Config:
        from_attributes = True

    @model_validator(mode='after')
    def check_count_identity(self):
        """개수 항등식 검증"""
        total = self.n_origin + self.n_dirs * self.n_radii
        if total != self.n_plus_1:
            raise ValueError(
                f"n_origin + n_dirs * n_radii = {total} does not equal n_plus_1 = {self.n_plus_1}"
            )
        return self

    @property
    def triple(self) -> tuple:
        return (self.n_radii, self.n_dirs, self.n_origin)


class GridSummary(BaseModel):
    """plan 명령 출력"""
    n_plus_1: int
    dim: int
    n_radii: int
    n_dirs: int
    n_origin: int
    alpha: float | None = None
    j_alpha: int | None = None
    radius: float | None = None
    nominal_mass: float | None = None
    may_be_unbounded: bool = False
