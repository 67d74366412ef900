"""Nonclassicality of single-mode bosonic states.

Nonclassical depth from the R-function family of phase-space
quasiprobabilities, the distance-type degree ``1 - pi max Q``, and auxiliary
indicators (Mandel q, impurity, quadrature variances).
"""

from ._kernels import BACKEND
from .depth import DepthReport, SearchBox, global_min_r, nonclassical_depth
from .diagnostics import DiagnosticsReport, diagnostics, impurity, mandel_q, quadrature_variances
from .distance import (
    DistanceReport,
    bu_distance_pure,
    d_m_closed_forms,
    gaussian_bijection,
    hs_distance_mixed,
    hs_distance_pure,
    max_q,
    nonclassicality_distance,
)
from .errors import (
    DomainError,
    NonclassError,
    NumericError,
    ResourceError,
    SingularRegimeError,
    UnsupportedStateError,
)
from .phase_space import GridSpec, q_function, r_function, r_grid
from .states import (
    FockDensity,
    coherent,
    coherent_superposition,
    even_cat,
    fock,
    make_cat,
    make_vac_fock_mixture,
    make_vac_fock_superposition,
    mix,
    number_state,
    odd_cat,
    squeezed,
    state_from_dict,
    state_to_dict,
    to_fock_density,
)

__version__ = "0.1.0"
