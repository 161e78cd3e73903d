"""Left-orderable Dehn-surgery slope certificates for 2-bridge knots.

The pipeline: validate a knot K(p, q) and derive its presentation data
(knotspec); build the matrix word and the Riley polynomial exactly over
Z[t, 1/t][u] (laurent, riley); trace real solution branches of {P = 0} with
a guarded predictor-corrector (continuation); and certify surgery slopes,
intervals, and family transfers with revalidating, self-contained
certificates (certify).
"""

__version__ = "0.1.0"

from .knotspec import (ContinuedFraction, SignData, TwoBridgeKnot,
                       WangFamilySpec, cf_to_pq, double_twist_to_pq,
                       mirror_knot, pq_to_cf, relator_words, same_knot,
                       sign_data, validate_knot, wang_family)
from .laurent import (BivarPoly, Mat2, UPoly, WordEntries, base_matrices,
                      entries, eval_real, eval_unit_circle, word_matrix)
from .riley import (MinusOneReport, MinusOneSystem, RileySystem,
                    elliptic_polynomial, minus_one_system, riley_system,
                    slope_of_point, slope_residual, verify_exact_identities)
from .continuation import (Band, Branch, CurvePoint, TraceConfig,
                           negative_branch_band, positive_branch_band,
                           seed_candidates, seed_psi, slope_span, solve_slope,
                           trace_branch, trace_slope_branches)
from .certify import (ClaimedInterval, IntervalReport, LiftingFlags,
                      SlopeCertificate, TransferCertificate, classify_khoi,
                      interval_report, lifting_flags,
                      longitude_commutator_residual, make_certificate,
                      rational_peripheral_check, revalidate,
                      transfer_interval)

__all__ = [name for name in dir() if not name.startswith("_")]
