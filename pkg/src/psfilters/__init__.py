"""Phase-space filtering toolkit for bosonic states.

Regularize singular Glauber-Sudarshan P functions by filtering the
characteristic function, certify which filters correspond to physical
(CPTP) maps, bound the distance between a state and its filtered version,
and use the regularized representation to estimate channel outputs and
measurement statistics.
"""

from ._version import __version__
from .applications import (ChannelOutputEstimate, CoherentResponseChannel,
                           HeterodyneEstimate, HusimiSample, LossChannel,
                           channel_output_distance_bound, channel_output_estimate,
                           heterodyne_estimate, povm_regularized_p,
                           probability_distance_bound, sample_husimi)
from .bounds import (BoundChainReport, FidelityCertificate, PureFidelityReport,
                     WidthSolution, bound_chain_report, entanglement_fidelity,
                     fidelity_bound_check, pure_state_fidelity_exact,
                     solve_width, trace_distance_bound_check)
from .errors import (FilterTooWeakError, PhaseSpaceError, QuadratureError,
                     SearchError, SingularPQDError, TruncationError,
                     UnsamplableFilterError, UnsupportedRouteError,
                     ValidationError)
from .filtering import (FilteredState, apply_filter_charfn, apply_filter_fock,
                        reconstruct_from_p, regularized_p_grid)
from .filters import (Filter, GaussianFilter, KlauderFilter,
                      NarcowichCounterexampleFilter, NonclassicalityFilter,
                      SmoothingKernelFilter, filter_from_config,
                      gaussian_family, nonclassicality_family, parse_filter)
from .fock import (coherent_vector, coherent_vectors, displacement_matrices,
                   displacement_matrix, fidelity, loss_channel, purity,
                   trace_distance, validate_density_matrix)
from .physicality import (ClassificationReport, PhysicalityReport, PointSet,
                          SweepResult, bochner_matrix, certify_cptp,
                          classify_filter, fourier_scan, gaussian_cloud,
                          klauder_translates, lattice_set, min_eigenvalue,
                          nw_spectrum_test, standard_point_sets,
                          state_physicality_check, symmetry_defect)
from .pqd import PQDGrid, spqd_grid
from .states import (Cat, CharFn, Coherent, Fock, NumericState, Squeezed,
                     State, Thermal, Vacuum, parse_state)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
