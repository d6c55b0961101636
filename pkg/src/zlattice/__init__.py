"""Numerical toolkit for the multidimensional vector-valued Z-transform.

Lattice sequence storage, forward transforms with convergence regions,
polycircle contour inversion, discrete convolution products, Cesaro/Weyl
fractional difference operators, and Green-function/resolvent solvers for
linear partial and Volterra difference equations over C^m.
"""

from .errors import (
    BoundaryNotFinite,
    CircleOutsideRegion,
    DimensionMismatch,
    DivergentConvolution,
    EvaluatorFailure,
    InitialConditionViolated,
    InsufficientWindow,
    NoEnvelope,
    PointOutsideRegion,
    SchemaError,
    ShiftLeavesDomain,
    SingularSymbol,
    TwoSidedAxisWithoutRingRates,
    UnrepresentableSum,
    ZLatticeError,
    ZeroCoordinate,
)
from .lattice import (
    Box,
    Envelope,
    FiniteSet,
    FullLattice,
    Orthant,
    SequenceTable,
    Shifted,
    beta_shift,
    emit,
    ingest,
    load,
    membership,
    minkowski_sum,
    nonneg_orthant,
    save,
)
from .ztransform import (
    CustomRegion,
    Inside,
    Outside,
    PolyAnnulus,
    Ring,
    TransformEvaluator,
    convergence_region,
    derivative_series,
    eval_forward,
    forward_evaluator,
    invert_contour,
    modulation,
    propose_radii,
    separable_transform,
    shift_identity,
)
from .convolution import conv_axes, conv_general, conv_theorem_check
from .fractional import (
    cesaro,
    cesaro_asymptote,
    forward_difference,
    weyl_am,
    weyl_derivative,
    weyl_fractional,
    weyl_transform_identity_check,
)
from .solver import (
    MixedAxesSymbol,
    MixedAxesTerm,
    MultiTermSymbol,
    OperatorPencil,
    VolterraTerm,
    WeylFractionalSymbol,
    WeylTerm,
    green_function,
    pencil_eval,
    resolvent_kernel,
    residual,
    solve,
    symbol_eval,
    uniqueness_probe,
)

__version__ = "0.1.0"
