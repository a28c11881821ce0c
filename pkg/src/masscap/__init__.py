"""Mass, capacity and Willmore-energy inequalities on rotationally symmetric 3-manifolds."""

from .capacity import (
    capacity_exterior,
    capacity_monotonicity_check,
    limit_capacity,
    relative_capacity,
    variational_capacity_oracle,
)
from .errors import (
    AsymptoticsError,
    CapacityError,
    DomainError,
    EvaluationError,
    FitWindowError,
    HorizonError,
    MasscapError,
    NoHarmonicFunctionError,
)
from .families import (
    flat,
    gaussian_bump,
    horn,
    isotropic_schwarzschild,
    load_profile,
    neg_schwarzschild,
    plummer,
    profile_from_dict,
    schwarzschild,
    tanh_mass,
    two_ended_plummer,
)
from .geometry import (
    ConformalProfile,
    RadialProfile,
    SurfaceSlice,
    WarpedProfile,
    adm_mass,
    convert,
    curvature_oracle,
    hawking_mass,
    mean_curvature,
    scalar_curvature,
    willmore,
)
from .harmonic import B_of_t, b_curve, exterior_harmonic, gradient_ratio, level_energy_limit, two_ended_harmonic
from .inequalities import (
    InequalityReport,
    certify,
    margin_capacity_radius,
    margin_energy_willmore,
    margin_hawking_chain,
    margin_mass_capacity,
    margin_mass_energy,
    mass_lower_bound_two_ended,
    neg_schwarzschild_willmore,
    pmt_witness,
    slice_reports,
)
from .singularity import HornSpec, criterion_Q, horn_classify, sandwich_check
from .smallsphere import mass_capacity_expansion_check, willmore_expansion_fit

__version__ = "0.1.0"
