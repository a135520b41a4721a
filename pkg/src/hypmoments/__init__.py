"""Finite-field hypergeometric values, elliptic-curve trace sweeps, and their
limiting moment statistics and densities."""

from .curves import (
    CurveFamily,
    ReductionReport,
    TraceSweep,
    builtin_family,
    classify_reduction,
    custom_family,
    ensure_negated_sweep,
    ensure_sweep,
    load_sweep,
    negated_family,
    negated_sweep,
    save_sweep,
    trace_single,
    trace_sweep,
)
from .ffield import PrimeFieldContext, build_field, char_eval, gauss_sum
from .hypfun import (
    HypDatum,
    clausen_datum,
    datum_modulus,
    hp_direct,
    hp_via_traces,
    hyp_datum,
    length2_datum,
    length4_datum,
)
from .moments import (
    Histogram,
    MomentReport,
    chebyshev_sum,
    histogram_build,
    ks_distance,
    mixed_empirical,
    theorem1_empirical,
    theorem3_empirical,
    theorem4_empirical,
)
from .theory import (
    DensitySpec,
    catalan,
    catalan_gamma_identity,
    chebyshev_u,
    combmom_check,
    meijer_g_t1,
    meijer_transform_checks,
    multiplicity_nm,
    product_semicircle_moment,
    semicircle_cdf,
    semicircle_moment,
    semicircle_pdf,
    sym2_multiplicity,
    theorem1_cdf,
    theorem1_cdf_fn,
    theorem1_limit,
    theorem1_moment,
    theorem1_pdf,
    theorem2_limit,
    theorem3_limit,
    theorem4_limit,
)

__version__ = "0.1.0"
