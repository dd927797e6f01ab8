"""Numerical study of the generalized Painleve II connecting solution and the
Ginzburg-Landau blow-up that produces it."""

from .errors import BlowUp, NewtonDiverged, NonPhysical, SolverError
from .grids import Field1D, Field2D, Grid1D, Grid2D, SolverConfig

__version__ = "0.1.0"

__all__ = ["BlowUp", "Field1D", "Field2D", "Grid1D", "Grid2D", "NewtonDiverged", "NonPhysical",
           "SolverConfig", "SolverError"]
