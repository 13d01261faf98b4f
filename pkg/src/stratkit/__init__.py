"""Exact combinatorics for the stratifications of moduli of vector bundles on a curve."""
from .beta import (
    BetaData,
    FullGroupLabel,
    IndexedPartition,
    WeightSystem,
    beta_from_partition,
    beta_of_jh_index,
    build_weight_system,
    canonicalize_partition,
    pairing_table,
    partition_from_beta,
    pivot_range,
    verify_beta,
)
from .errors import InputError, InvariantError, ShapeError, StratError, StructureError, ValidationError
from .filtcalc import Atom, DeltaFilt, FiltSpec, balanced_merge, classify, direct_sum, dualize, gr_of
from .hn import HNType, coarse_codim, enumerate_hn_types, hn_codim, hn_compare
from .minnorm import MinNormCertificate, min_norm_point
from .poset import OrderRelation
from .series import TruncatedSeries, poincare_BG, poincare_Css, poincare_M
from .strata_census import (
    JHBlock,
    JHIndex,
    ReductiveClass,
    census,
    enumerate_jh_indices,
    group_data,
    jh_codim,
    jh_compare,
    mumford_census,
    validate_jh_index,
)

enumerate_reductive_classes = census

__version__ = "0.1.0"
