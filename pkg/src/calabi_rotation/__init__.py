"""Numerical lab for the average rotation number and the Calabi invariant of
Hamiltonian diffeomorphisms of the unit disc.

The pair winding averaged over the configuration space should equal ``-2``
times the Calabi invariant.  Every ingredient of that identity (flows,
windings, the singular Cauchy integrals) is exposed so that it can be
checked on its own.
"""
from .calabi import CalabiResult, calabi
from .cauchy_kernel import (
    CauchyPompeiu,
    Lemma1Check,
    SmoothFunctionSpec,
    antiholomorphic,
    area_term,
    boundary_term,
    cauchy_calabi_identity,
    cauchy_pompeiu,
    disc_cauchy_transform,
    hamiltonian_at,
    holomorphic,
    lemma1_bound_check,
    singular_mass,
)
from .errors import (
    ConfigError,
    DomainError,
    IntegrationDivergedError,
    NearCollisionError,
    SamplingDegeneracyError,
)
from .flow import (
    DEFAULT_TIMES,
    FlowDiagnostics,
    PushforwardCheck,
    StepPolicy,
    Trajectory,
    flow_diagnostics,
    integrate,
    integrate_many,
    jacobian_determinant,
    pushforward_invariance_check,
)
from .geometry import (
    DISC_AREA,
    PairConfiguration,
    check_disc_point,
    disc_quadrature,
    integrate_disc,
    sample_disc_uniform,
    substream,
)
from .hamiltonian import (
    HamiltonianSpec,
    concatenate,
    evaluate,
    moving_bump,
    radial_bump,
    radial_polynomial,
    scaled,
    time_scaled,
    velocity,
    wirtinger_dzbar,
    zero,
)
from .linking import (
    PAIR_MASS,
    PairWinding,
    RotationEstimate,
    SymmetryCheck,
    average_rotation_mc,
    average_rotation_radial,
    pair_winding_arg,
    pair_winding_integrand,
    pair_windings_many,
    symmetry_reduction_check,
)

__version__ = "0.1.0"
