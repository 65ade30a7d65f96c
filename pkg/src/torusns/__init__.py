"""Upwind finite volume and MAC schemes for barotropic Navier-Stokes on the periodic torus."""

from .mesh import BidualIndex, FaceIndex, Mesh, build_mesh, dual_neighbors, face_neighbors
from .physics import GasLaw, ViscosityLaw
from .schemes import (FV, MAC, NonlinearDivergence, PositivityLoss, RunReport, SchemeConfig,
                      SchemeError, StepReport, fv_residual, initial_state, mac_residual, run, step)
from .smooth import Trig
from .state import FluidState

__all__ = [
    "BidualIndex", "FaceIndex", "Mesh", "build_mesh", "dual_neighbors", "face_neighbors",
    "GasLaw", "ViscosityLaw", "FV", "MAC", "NonlinearDivergence", "PositivityLoss", "RunReport",
    "SchemeConfig", "SchemeError", "StepReport", "fv_residual", "initial_state", "mac_residual",
    "run", "step", "Trig", "FluidState",
]
