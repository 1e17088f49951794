import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app import __version__
from app.exceptions import DataFormatError
from app.models.grid import SphericalGrid
from app.models.laguerre import LaguerreDiagram
from app.models.partition import FittedArtifact, PartitionArtifact, TransportMode
from app.schemas.artifact import (
    FORMAT_VERSION,
    ArtifactFile,
    ArtifactMeta,
    GridFile,
    LaguerreFile,
)
from app.schemas.grid import GridPlan
from app.services.partition_service import canonical_index
from app.utils.numbers import decode_array, decode_float, encode_array, encode_float
from app.utils.transaction import atomic_write

logger = logging.getLogger(__name__)


class ArtifactRepository:
    """PartitionArtifact JSON 저장/로드 (숫자는 repr 문자열, 왕복 시 비트 동일)"""

    def __init__(self, include_meta: bool = True):
        self.include_meta = include_meta

    # ==================== 직렬화 ====================

    def to_file(self, fitted: FittedArtifact) -> ArtifactFile:
        artifact = fitted.artifact
        grid = artifact.grid
        diagram = fitted.diagram
        laguerre = None
        if diagram is not None:
            laguerre = LaguerreFile(
                weights=encode_array(diagram.weights),
                mass_estimates=encode_array(diagram.mass_estimates),
                mc_sample_size=diagram.mc_sample_size,
                seed=diagram.seed,
                deviation=encode_float(diagram.deviation),
                iterations=diagram.iterations,
                cell_counts=[] if diagram.cell_counts is None else [int(c) for c in diagram.cell_counts],
            )
        meta = None
        if self.include_meta:
            meta = ArtifactMeta(
                created_at=datetime.now(timezone.utc).isoformat(),
                tool_version=__version__,
            )
        return ArtifactFile(
            format_version=FORMAT_VERSION,
            mode=artifact.mode.value,
            grid=GridFile(
                plan=GridPlan(
                    n_plus_1=grid.size,
                    dim=grid.dim,
                    n_radii=grid.n_radii,
                    n_dirs=grid.n_dirs,
                    n_origin=grid.n_origin,
                    direction_seed=grid.direction_seed,
                ),
                directions=encode_array(grid.directions),
                points=encode_array(grid.points),
                norms=encode_array(grid.norms),
                shells=[int(s) for s in grid.shells],
            ),
            calib_scores=encode_array(artifact.calib_scores),
            leave_out_costs=encode_array(artifact.leave_out_costs),
            halfspace_offsets=encode_array(artifact.halfspace_offsets),
            sub_assignments=[[int(c) for c in row] for row in artifact.sub_assignments],
            centers=encode_array(artifact.centers),
            second_moments=encode_array(artifact.second_moments),
            cell_max_norms=None if artifact.cell_max_norms is None else encode_array(artifact.cell_max_norms),
            laguerre=laguerre,
            alpha=None if fitted.alpha is None else encode_float(fitted.alpha),
            j_alpha=fitted.j_alpha,
            radius=None if fitted.radius is None else encode_float(fitted.radius),
            nominal_mass=None if fitted.nominal_mass is None else encode_float(fitted.nominal_mass),
            seeds={k: int(v) for k, v in artifact.seeds.items()},
            meta=meta,
        )

    def from_file(self, doc: ArtifactFile) -> FittedArtifact:
        if doc.format_version != FORMAT_VERSION:
            raise DataFormatError(
                message="Malformed artifact",
                detail=f"Unsupported format_version {doc.format_version} (expected {FORMAT_VERSION})"
            )
        try:
            mode = TransportMode(doc.mode)
        except ValueError:
            raise DataFormatError(message="Malformed artifact", detail=f"Unknown mode {doc.mode}")

        plan = doc.grid.plan
        dim = plan.dim
        grid = SphericalGrid(
            dim=dim,
            n_origin=plan.n_origin,
            n_dirs=plan.n_dirs,
            n_radii=plan.n_radii,
            directions=self._matrix(doc.grid.directions, dim),
            points=self._matrix(doc.grid.points, dim),
            norms=decode_array(doc.grid.norms),
            shells=np.asarray(doc.grid.shells, dtype=np.int64),
            direction_seed=plan.direction_seed,
        )
        centers = self._matrix(doc.centers, dim)
        second = decode_array(doc.second_moments)
        n = len(doc.calib_scores)
        canonical = canonical_index(centers, second)
        artifact = PartitionArtifact(
            mode=mode,
            grid=grid,
            calib_scores=self._matrix(doc.calib_scores, dim),
            centers=centers,
            second_moments=second,
            leave_out_costs=decode_array(doc.leave_out_costs),
            sub_assignments=np.asarray(doc.sub_assignments, dtype=np.int64).reshape(grid.size, n),
            target_norms=grid.norms,
            halfspace_offsets=self._matrix(doc.halfspace_offsets, grid.size),
            multiplicity=np.bincount(canonical, minlength=grid.size)[canonical],
            canonical_index=canonical,
            cell_max_norms=None if doc.cell_max_norms is None else decode_array(doc.cell_max_norms),
            seeds=dict(doc.seeds),
        )

        diagram = None
        if doc.laguerre is not None:
            diagram = LaguerreDiagram(
                sites=grid.points,
                weights=decode_array(doc.laguerre.weights),
                mass_estimates=decode_array(doc.laguerre.mass_estimates),
                mc_sample_size=doc.laguerre.mc_sample_size,
                seed=doc.laguerre.seed,
                deviation=decode_float(doc.laguerre.deviation),
                iterations=doc.laguerre.iterations,
                cell_counts=np.asarray(doc.laguerre.cell_counts, dtype=np.int64) if doc.laguerre.cell_counts else None,
            )
        return FittedArtifact(
            artifact=artifact,
            diagram=diagram,
            alpha=None if doc.alpha is None else decode_float(doc.alpha),
            j_alpha=doc.j_alpha,
            radius=None if doc.radius is None else decode_float(doc.radius),
            nominal_mass=None if doc.nominal_mass is None else decode_float(doc.nominal_mass),
        )

    @staticmethod
    def _matrix(values, width: int) -> np.ndarray:
        if not values:
            return np.zeros((0, width))
        return decode_array(values)

    # ==================== 파일 IO ====================

    def dumps(self, fitted: FittedArtifact) -> str:
        return json.dumps(self.to_file(fitted).model_dump(mode="json"), indent=2) + "\n"

    def save(self, path: Union[str, Path], fitted: FittedArtifact) -> None:
        payload = self.dumps(fitted)
        try:
            with atomic_write(path) as fh:
                fh.write(payload)
        except OSError as exc:
            raise DataFormatError(message="File not found", detail=f"Cannot write {path}: {exc}")
        logger.info(f"Artifact saved: {path}")

    def loads(self, text: str) -> FittedArtifact:
        try:
            doc = ArtifactFile.model_validate(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DataFormatError(message="Malformed artifact", detail=str(exc.msg), line=exc.lineno)
        except PydanticValidationError as exc:
            raise DataFormatError(message="Malformed artifact", detail=str(exc.errors()[0]))
        try:
            return self.from_file(doc)
        except (ValueError, TypeError) as exc:
            raise DataFormatError(message="Malformed artifact", detail=str(exc))

    def load(self, path: Union[str, Path]) -> FittedArtifact:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataFormatError(message="File not found", detail=f"Cannot read {path}: {exc}")
        return self.loads(text)
