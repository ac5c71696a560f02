"""Neutral-signature anti-self-dual conformal structures with null Killing
vectors, built from 2D projective-structure data, with verification tooling."""

from .expr import (
    Assignment,
    EvalError,
    Expr,
    ExprError,
    ParseError,
    SampleConfig,
    Verdict,
    differentiate,
    evaluate,
    is_zero,
    is_zero_all,
    parse,
    symbols,
    to_text,
)
from .tensor import (
    Chart,
    Metric,
    OneForm,
    TensorField,
    ThreeForm,
    TwoForm,
    VectorField,
    christoffels,
    conformal_rescale,
    lie_derivative_metric,
    ricci,
    riemann,
    scalar_curvature,
    twist_three_form,
    weyl,
)
from .spinor import (
    KillingSpinorData,
    NullTetrad,
    PetrovType,
    SpinorField,
    WeylSpinor,
    check_lemma_identities,
    killing_decompose,
    null_killing_factorize,
    petrov_classify,
    principal_direction_check,
    scalar_invariants,
    standard_tetrad,
    szekeres_obstruction,
    type_constraint_check,
    weyl_spinors,
)
from .projective import (
    Connection2D,
    ProjectiveStructure,
    Spray,
    derivative_of_first_order,
    flatness_invariant,
    geodesic_integrate,
    ode_from_connection,
    projective_equivalence_shift,
    spray,
)
from .construct import (
    BuiltGeometry,
    HeavenlyData,
    build_fefferman_like,
    build_flat,
    build_heavenly,
    build_nontwisting,
    build_ppwave,
    build_sparling_tod,
    build_twisting,
    endomorphism_check,
    fefferman_typeN_check,
    g_residual,
    heavenly_two_forms,
    sigma_pullback_residuals,
    sparling_tod_transform,
)
from .twistor import (
    LaxPair,
    LiftedKilling,
    integrability_check,
    lax_pair,
    lift_commutation_check,
    lift_killing,
)

__version__ = "0.1.0"
