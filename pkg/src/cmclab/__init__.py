"""Constant mean curvature surfaces of revolution in the 3-dimensional space
forms, free boundary pieces in geodesic balls, and pointwise pinching checks."""

from .delaunay import Branch, DelaunayParams, USolution, make_params, u_closed, u_closed_solution, u_numeric
from .errors import CmcError
from .freeboundary import FreeBoundaryPiece, gauss_bonnet_audit, shoot, solve_for_R, spherical_cap
from .pinch import PinchReport, SignPattern, Topology, Verdict, classify, pinch_report, sign_analysis
from .rotation import RotationSurface, mesh, reconstruct_meridian, sample
from .spaceform import SpaceForm, distance, f_eval, grad_r

__version__ = "0.1.0"

__all__ = [
    "Branch", "CmcError", "DelaunayParams", "FreeBoundaryPiece", "PinchReport", "RotationSurface",
    "SignPattern", "SpaceForm", "Topology", "USolution", "Verdict", "classify", "distance", "f_eval",
    "gauss_bonnet_audit", "grad_r", "make_params", "mesh", "pinch_report", "reconstruct_meridian",
    "sample", "shoot", "sign_analysis", "solve_for_R", "spherical_cap", "u_closed", "u_closed_solution",
    "u_numeric",
]
