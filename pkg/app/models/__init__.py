# Models package
from app.models.assignment import Assignment
from app.models.grid import SphericalGrid
from app.models.partition import (
    PartitionArtifact, Region, AssignResult, TransportMode, Boundedness,
    QuantileRegion, PredictionSet, FittedArtifact,
)
from app.models.laguerre import LaguerreDiagram, CellMoments
from app.models.score import ScoreVector, ScoreKind, ScoreTable

__all__ = [
    # LAP
    "Assignment",
    # Grid
    "SphericalGrid",
    # Partition
    "PartitionArtifact", "Region", "AssignResult", "TransportMode", "Boundedness",
    "QuantileRegion", "PredictionSet", "FittedArtifact",
    # Semi-discrete
    "LaguerreDiagram", "CellMoments",
    # Score
    "ScoreVector", "ScoreKind", "ScoreTable",
]
