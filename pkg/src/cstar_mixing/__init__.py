"""Mixing-hierarchy classification for finite-dimensional C*-dynamical systems.

Represents direct sums of matrix algebras, states, and Markov operators;
decides ergodicity, weak mixing, strict ergodicity, strict weak mixing,
exactness, and the invariant-functional equivalence by exact spectral
criteria cross-validated against definition-based Cesàro estimators.
"""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    Functional,
    functional_norm,
    hermitian_split,
    jordan_decompose,
    operator_norm,
    product_pairing_matrix,
    tensor_elements,
    tensor_functionals,
    tensor_shapes,
)
from .channel import (
    MarkovOperator,
    canonical_invariant_state,
    check_cp,
    check_positive_sampled,
    compose,
    dual,
    from_kraus,
    from_stochastic,
    from_superoperator,
    identity_channel,
    invariant_states,
    power,
    random_unital_cp,
    tensor,
)
from .config import DEFAULT, Config
from .errors import (
    CstarMixingError,
    DefectivePeripheral,
    DisagreementFailure,
    EigensolverFailure,
    EquivalenceViolation,
    HierarchyViolation,
    ImplicationViolation,
    InvalidStochastic,
    InvariantStateMismatch,
    MethodDisagreement,
    NotCompletelyPositive,
    NotCoprime,
    NotHermitian,
    NotHermitianPreserving,
    NotInvariant,
    NotPositive,
    NotStochastic,
    NotUnital,
    NumericalDegeneracy,
    NumericalFailure,
    ParseError,
    RequiresCP,
    ShapeMismatch,
    SingularNormalization,
    UnknownTheorem,
    ValidationError,
    ValidationFailure,
)
from .mixing import (
    CheckResult,
    DynamicalSystem,
    MixingReport,
    PROPERTIES,
    ProbeRecord,
    THEOREM_NAMES,
    Unsupported,
    VerificationRecord,
    check_ergodic,
    check_exact,
    check_peripheral_obstruction,
    check_phi_ergodic_equiv,
    check_strictly_ergodic,
    check_strictly_weak_mixing,
    check_weakly_mixing,
    classify,
    probe_problem1,
    tensor_system,
    verify_theorem,
)
from .models import (
    DistinctStatesReport,
    RotationWitness,
    compatibility_residual,
    example1,
    example2,
    example3_channels,
    example3_distinct_states,
    markov_state,
)
from .sequences import (
    BoundedSequence,
    cesaro_abs,
    cesaro_sq,
    check_kvn_equivalence,
    extract_density_zero,
)
from .serialize import (
    parse_system,
    report_to_dict,
    system_from_dict,
    system_to_dict,
)
from .spectral import (
    SpectralSummary,
    cesaro_projector_iterative,
    cesaro_projector_spectral,
    power_limit,
    range_of_defect,
    spectrum,
)

__all__ = [
    "AlgebraElement",
    "AlgebraShape",
    "BoundedSequence",
    "CheckResult",
    "Config",
    "CstarMixingError",
    "DEFAULT",
    "DefectivePeripheral",
    "DisagreementFailure",
    "DistinctStatesReport",
    "DynamicalSystem",
    "EigensolverFailure",
    "EquivalenceViolation",
    "Functional",
    "HierarchyViolation",
    "ImplicationViolation",
    "InvalidStochastic",
    "InvariantStateMismatch",
    "MarkovOperator",
    "MethodDisagreement",
    "MixingReport",
    "NotCompletelyPositive",
    "NotCoprime",
    "NotHermitian",
    "NotHermitianPreserving",
    "NotInvariant",
    "NotPositive",
    "NotStochastic",
    "NotUnital",
    "NumericalDegeneracy",
    "NumericalFailure",
    "PROPERTIES",
    "ParseError",
    "ProbeRecord",
    "RequiresCP",
    "RotationWitness",
    "ShapeMismatch",
    "SingularNormalization",
    "SpectralSummary",
    "THEOREM_NAMES",
    "UnknownTheorem",
    "Unsupported",
    "ValidationError",
    "ValidationFailure",
    "VerificationRecord",
    "canonical_invariant_state",
    "cesaro_abs",
    "cesaro_projector_iterative",
    "cesaro_projector_spectral",
    "cesaro_sq",
    "check_cp",
    "check_ergodic",
    "check_exact",
    "check_kvn_equivalence",
    "check_peripheral_obstruction",
    "check_phi_ergodic_equiv",
    "check_positive_sampled",
    "check_strictly_ergodic",
    "check_strictly_weak_mixing",
    "check_weakly_mixing",
    "classify",
    "compatibility_residual",
    "compose",
    "dual",
    "example1",
    "example2",
    "example3_channels",
    "example3_distinct_states",
    "extract_density_zero",
    "from_kraus",
    "from_stochastic",
    "from_superoperator",
    "identity_channel",
    "functional_norm",
    "hermitian_split",
    "invariant_states",
    "jordan_decompose",
    "markov_state",
    "operator_norm",
    "parse_system",
    "power",
    "power_limit",
    "probe_problem1",
    "product_pairing_matrix",
    "random_unital_cp",
    "range_of_defect",
    "report_to_dict",
    "spectrum",
    "system_from_dict",
    "system_to_dict",
    "tensor",
    "tensor_elements",
    "tensor_functionals",
    "tensor_shapes",
    "tensor_system",
    "verify_theorem",
]
