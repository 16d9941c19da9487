"""Placement algorithms and their building blocks."""

from .bia import bia
from .brute import brute_force
from .density import DensityKind, MassDensity, mass_density
from .geometry import farthest_pair, fermat_weber, min_enclosing_circle
from .pipeline import hda, mrsa, serve_probable_users
from .result import DeploymentResult, Outcome, SearchTrajectory
from .scpa import grid_axis, scpa
from .search import PlaneFrame, plane_search, two_user_search

__all__ = [
    "bia", "brute_force", "DensityKind", "MassDensity", "mass_density", "farthest_pair",
    "fermat_weber", "min_enclosing_circle", "hda", "mrsa", "serve_probable_users",
    "DeploymentResult", "Outcome", "SearchTrajectory", "grid_axis", "scpa",
    "PlaneFrame", "plane_search", "two_user_search",
]
