"""compoplab: numerics for composition operators on disk and polydisk Hardy spaces.

Truncated-series arithmetic, disk self-maps (lens, cusp, Blaschke squares,
Shapiro-Taylor), boundary pullback measures, operator matrices and their
singular values, tensor s-number calculus, and a walk-on-spheres harmonic
measure lab for the spiral channel region.
"""

__version__ = "0.1.0"

from .series import (
    MAX_ORDER,
    PowerSeries,
    SpaceParam,
    extract_coefficients,
    series_mul,
    series_pow,
    weighted_norm,
)
from .symbols import (
    BlaschkeSquare,
    Compose,
    Cusp,
    ExplicitSeries,
    Identity,
    KernelPoint,
    Lens,
    PolydiskMap,
    Rotation,
    Scalar,
    ShapiroTaylor,
    SingularEvaluationError,
    Symbol,
    blaschke_contraction_ratio,
    boundary_eval,
    lens_semigroup_check,
    shipped_symbols,
    symbol_from_dict,
    symbol_to_dict,
)
from .carleson import (
    CarlesonOrderFit,
    CarlesonProfile,
    carleson_order_fit,
    rho_profile,
    window_measure,
    write_profile_csv,
)
from .operators import (
    OperatorMatrix,
    SizeGuardError,
    build_diagonal_polydisk_matrix,
    build_matrix,
    hs_norm_sq,
    kernel_ratio,
    load_matrix,
    multi_index_oracle,
    save_matrix,
    unboundedness_witness,
)
from .spectra import (
    BetaEstimate,
    DecayFit,
    Schedule,
    SingularSpectrum,
    beta_estimate,
    decay_fit,
    find_M,
    lower_bound_sanity,
    nu_count,
    schatten_membership,
    singular_values,
    tensor_lemma_report,
    tensor_merge,
    upper_bound_plain,
    upper_bound_weighted,
)
from .harmonic import (
    DiskRegion,
    GraphChannel,
    HalfPlaneRegion,
    HarmonicMeasureEstimate,
    covering_count,
    distance_lower_bound,
    level_set_tail,
    wos_harmonic_measure,
    wos_harmonic_measures,
)
