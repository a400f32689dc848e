"""Frequency-aware placement for superconducting quantum chips."""
from .kernels import BACKEND
from .model import Design, Instance, Placement, PlacerConfig, Resonator, Topology
from .pipeline import run_pipeline

__version__ = "0.1.0"

__all__ = ["BACKEND", "Design", "Instance", "Placement", "PlacerConfig", "Resonator",
           "Topology", "run_pipeline", "__version__"]
