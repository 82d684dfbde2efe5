"""Bound states and non-Markovian dynamics of an Aubry-Andre-Harper chain
coupled to a common bosonic bath."""

__version__ = "0.1.0"

from .bath import BathSpec, memory_kernel, self_energy, self_energy_derivative, self_energy_slope, \
    spectral_density
from .dynamics import TimeGrid, Trajectory, estimate_period, evolve, fidelity_series, single_site_state, \
    survival_probability, trajectory_ipr
from .errors import (AahBathError, DegenerateRootError, DomainError, EigensolverError, InstabilityError,
                     NonOscillatoryError, NumericalError, QuadratureError, RootRefinementWarning)
from .lattice import (GOLDEN, Boundary, EigenSystem, LatticeSpec, build_lattice, classify_edge_modes,
                      eigensystem, find_gaps, inverse_participation_ratio)
from .spectral import (BoundState, Kind, SearchOptions, bound_state_weight, dark_levels, find_bound_states,
                       reconstruct_mode, secular_value)
