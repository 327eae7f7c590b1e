"""Rate-region bounds for discrete memoryless cognitive interference channels."""
from .bounds import (
    AuxAssignment,
    Binning,
    CornerPair,
    Coupling,
    Factorization,
    capacity_better_cognitive,
    capacity_det,
    capacity_semidet,
    inner_bound_better_cognitive,
    inner_bound_rtd,
    outer_bound_bc,
    outer_bound_marginal,
    outer_bound_strong,
    outer_bound_weak,
    outer_bound_wu,
    rtd_rate_system,
    semidet_sub_regions,
    wu_corner_points,
)
from .channel import (
    CifcChannel,
    asymmetric_clipper,
    builtin,
    channel_from_kernel,
    channel_from_maps,
    is_deterministic,
    is_semideterministic,
    load_channel,
    save_channel,
    symmetric_clipper,
)
from .dominance import Comparison, dominance_check
from .errors import CifcError, EvaluationError, InputError
from .polytope import (
    LinearConstraint,
    RatePolytope2D,
    RateSystem,
    contains,
    fme_eliminate,
    project_to_r1_r2,
    regions_equal,
    remove_redundant,
    vertices_2d,
)
from .prob import JointPMF, RoleTag, compose_with_channel, entropy, marginalize, mutual_information
from .regime import RegimeReport, classify_regime
from .schemes import (
    SchemeTable,
    emit_table,
    scheme_clipper_13,
    scheme_clipper_22,
    scheme_symmetric_12,
    verify_zero_error,
)
from .search import BoundKind, search_frontier

import types as _types

__all__ = [n for n, v in dict(globals()).items()
           if not n.startswith("_") and not isinstance(v, _types.ModuleType)]
