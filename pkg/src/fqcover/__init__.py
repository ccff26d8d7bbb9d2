"""Covering systems of F_q[x]: exact coverage checks, the distortion method,
and certified reproduction of the second-moment bounds."""

__version__ = "0.1.0"

from .bounds import (
    BoundCertificate,
    BoundParams,
    certify_fqx_distinct,
    certify_gff_theorem,
    optimize_t1,
    prime_power_gap,
    weighted_sum_upper,
)
from .certified import UpperReal, exp_upper, sqrt_upper
from .covering import (
    Congruence,
    CoveringInstance,
    CoverReport,
    check_cover_exhaustive,
    lcm_modulus,
    multiplicity,
    parse_instance,
)
from .distortion import DeltaSchedule, decompose, distortion_verdict
from .finite_field import FieldConfig, FqPoly, factor_monic, field_make, is_irreducible
from .prime_tables import count_irreducibles_exact, pi_upper_bound
from .search import SearchConfig, search_distinct_cover
