"""
weylspec - spectral analysis of half-line Sturm-Liouville operators
D = -(d/dx) p (d/dx) + q with a Dirichlet condition at 0.

Quick start::

    from weylspec import SturmLiouville, gaussian

    op = SturmLiouville.from_spec({"name": "capped_well", "params": [1.0, 5.0, 0.1]})
    op.density(4.0)                       # Weyl density ρ(λ)
    op.bound_states()                     # eigenvalues -z² with eigenfunctions
    h = gaussian(5.0, 0.7)
    op.weyl_pairing(1.0, 4.0, h, h)       # <h, P_[1,4] h>
"""

from .asymptotics import ScatteringPoint, c_function, s_infinity, spectral_density
from .boundstates import BoundState, find_bound_states, zero_energy_report
from .coeffs import DecayClass, Potential, make_builtin_potential
from .errors import ConfigError, NumericalError, PotentialError
from .green import ProjectionReport, apply_resolvent, green_kernel, kodaira_pairing
from .grids import SampledFunction, gaussian, smooth_bump
from .results import TaskResult
from .settings import NumericConfig, RunConfig, load_config
from .spectral import BumpWindow, projection_kernel, reconstruct, transform, weyl_pairing
from .sturmliouville import SturmLiouville

__all__ = [
    "SturmLiouville",
    "Potential",
    "DecayClass",
    "make_builtin_potential",
    "SampledFunction",
    "gaussian",
    "smooth_bump",
    "s_infinity",
    "c_function",
    "spectral_density",
    "ScatteringPoint",
    "green_kernel",
    "apply_resolvent",
    "kodaira_pairing",
    "ProjectionReport",
    "weyl_pairing",
    "projection_kernel",
    "transform",
    "reconstruct",
    "BumpWindow",
    "find_bound_states",
    "zero_energy_report",
    "BoundState",
    "NumericConfig",
    "RunConfig",
    "load_config",
    "TaskResult",
    "ConfigError",
    "PotentialError",
    "NumericalError",
]
__version__ = "0.1.0"
