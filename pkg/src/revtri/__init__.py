"""revtri: reverse triangle inequalities in finite-dimensional Hilbert
C*-modules -- verification certificates, best-constant extraction, equality
constructions, quadrature checks, and a seeded fuzzing harness."""

from .algebra import (
    AlgebraShape,
    Element,
    Spectrum,
    check_diamond,
    herm_eigvalsh,
    herm_spectrum,
    loewner_leq,
    op_norm,
    psd_sqrt,
    re_im_parts,
    unit,
    zero,
)
from .certificate import Certificate, Check
from .errors import (
    CapabilityError,
    ConsistencyError,
    HypothesisError,
    InputError,
    PositivityError,
    SchemaError,
)
from .hilbert import (
    ModuleSpace,
    ModuleVector,
    OrthoFamily,
    bessel_defect,
    cs_equality_reconstruct,
    cs_gap,
    inner,
    make_ortho_family,
    modulus_and_norm,
    scalar_space,
)
from .quadrature import SampledPath, integrate, verify_integral_corollary
from .reverse import (
    AdditiveBounds,
    FamilyBounds,
    HermitianBounds,
    ScalarBounds,
    build_additive_equality,
    build_equality_instance,
    extract_additive_bounds,
    extract_family_bounds,
    extract_hermitian_bounds,
    extract_scalar_bounds,
    verify_additive,
    verify_family_modulus,
    verify_family_norm,
    verify_multiplicative_hermitian,
    verify_multiplicative_scalar,
)
from .fuzzing import DimCaps, FuzzConfig, fuzz_campaign, gen_instance, sharpness_search

__version__ = "0.1.0"
