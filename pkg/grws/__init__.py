from __future__ import annotations

from .berger import (
    AtomicMeasure,
    BergerCoefficients,
    atom_count_on_ray,
    berger_coefficients,
    berger_measure,
    measure_moments,
    verify_representation,
)
from .completion import (
    CompletionSolution,
    TwoAtomSpec,
    family_completion,
    family_sector_ranges,
    same_p_completion,
    target_moments,
    three_atom_search,
    zero_atom_completion,
)
from .constants import PACKAGE_VERSION as __version__
from .errors import (
    GrwsError,
    InexactValue,
    InvalidArgument,
    InvariantBreach,
    NegativeCoefficient,
    OutsideSector,
    ParameterOutOfSquare,
    TargetOutsideSquare,
    ValidationError,
)
from .hankel import (
    HankelWindow,
    condensation_check,
    det_closed_form,
    det_exact,
    hankel,
    hyponormality_order,
    sector_iv_predicted_order,
)
from .model import (
    GrwsWeights,
    MomentSequence,
    WeightSequence,
    classify,
    from_scaled_form,
    make_params,
    moment,
    predict_properties,
    weight_sq,
)
from .sequences import (
    ExactSequence,
    LogSequence,
    battery,
    function_alternation_probe,
    is_n_alternating,
    is_n_monotone,
    n_contractive,
    nabla,
)
from .transforms import (
    AffineMap,
    affine_subshift_params,
    aluthge,
    pg_coefficients,
    pg_identity_check,
    quotient_shift,
    reciprocal,
    schur_power,
    viiia_derived_weights,
)
from .types import HypoVerdict, PropertyVerdict, SectorLabel, ShiftParams

__all__ = (
    "__version__",
    # model
    "GrwsWeights",
    "MomentSequence",
    "ShiftParams",
    "SectorLabel",
    "WeightSequence",
    "classify",
    "from_scaled_form",
    "make_params",
    "moment",
    "predict_properties",
    "weight_sq",
    # sequences
    "ExactSequence",
    "LogSequence",
    "PropertyVerdict",
    "battery",
    "function_alternation_probe",
    "is_n_alternating",
    "is_n_monotone",
    "n_contractive",
    "nabla",
    # hankel
    "HankelWindow",
    "HypoVerdict",
    "condensation_check",
    "det_closed_form",
    "det_exact",
    "hankel",
    "hyponormality_order",
    "sector_iv_predicted_order",
    # berger
    "AtomicMeasure",
    "BergerCoefficients",
    "atom_count_on_ray",
    "berger_coefficients",
    "berger_measure",
    "measure_moments",
    "verify_representation",
    # transforms
    "AffineMap",
    "affine_subshift_params",
    "aluthge",
    "pg_coefficients",
    "pg_identity_check",
    "quotient_shift",
    "reciprocal",
    "schur_power",
    "viiia_derived_weights",
    # completion
    "CompletionSolution",
    "TwoAtomSpec",
    "family_completion",
    "family_sector_ranges",
    "same_p_completion",
    "target_moments",
    "three_atom_search",
    "zero_atom_completion",
    # errors
    "GrwsError",
    "InexactValue",
    "InvalidArgument",
    "InvariantBreach",
    "NegativeCoefficient",
    "OutsideSector",
    "ParameterOutOfSquare",
    "TargetOutsideSquare",
    "ValidationError",
)
