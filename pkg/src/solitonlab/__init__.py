"""solitonlab: a numerical laboratory for rotationally symmetric gradient
Kahler-Ricci solitons on C^n.

The package solves the implicit equation defining the radial soliton profile,
evaluates the metric, curvature and potential it generates, integrates the
Hamiltonian dynamics of the potential (periodic orbits, admissible plateau
Hamiltonians, Hofer-Zehnder style capacity bounds), evolves the radial
reduction of the Ricci flow to exhibit the profile as a unit-speed traveling
wave, and constructs explicit radial symplectic embeddings into flat C^n.
"""

from .profile import SolitonProfile, SolverError, implicit_residual
from .geometry import RadialMetric, CurvatureData
from .dynamics import OrbitResult, AdmissibleHamiltonian
from .ricci_flow import FlowState
from .embedding import SymplecticMap, CapacityBounds

__version__ = "0.1.0"

__all__ = [
    "SolitonProfile",
    "SolverError",
    "implicit_residual",
    "RadialMetric",
    "CurvatureData",
    "OrbitResult",
    "AdmissibleHamiltonian",
    "FlowState",
    "SymplecticMap",
    "CapacityBounds",
    "__version__",
]
