"""Certified perturbation of finite Schauder frames on real p-normed spaces."""

from .construction import (
    IndexInterleaving,
    SubspaceSpec,
    build_interleaved,
    choose_scalars,
    construct_targeted_frames,
)
from .dimension import (
    DimensionCertificate,
    dimension_bound_functionals,
    dimension_bound_vectors,
    remark38_minimal_N,
)
from .errors import (
    CriterionNotSatisfied,
    DimensionMismatch,
    EnumerationCapExceeded,
    FrameError,
    NeumannError,
)
from .frames import (
    EquivalenceWitness,
    FramePair,
    abs_bilinear_norm,
    besselian_constant,
    besselian_diagnostic,
    frame_constant_K,
    validate_frame,
)
from .generate import canonical_frame, generate_frame, mercedes_frame
from .perturbation import (
    CriterionReport,
    PerturbationCandidate,
    PerturbedFrames,
    TransferOperator,
    besselian_certificate,
    build_transfer,
    criterion_cor34,
    criterion_cor35,
    criterion_cor36,
    criterion_thm31,
    criterion_thm33,
    emit_perturbed_frames,
    neumann_inverse,
)
from .space import (
    ConstantBound,
    Functional,
    Operator,
    PNormSpace,
    Vector,
    functional_norm,
    operator_norm,
    vector_norm,
)

__version__ = "0.1.0"
