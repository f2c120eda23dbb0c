"""cophi: exact computations with finite-dimensional comodules over
path-truncated quiver coalgebras.

The package computes socles, tops, injective envelopes, cosyzygies,
Krull-Schmidt decompositions and the rank-stabilization invariant phi of
the cosyzygy action on the class group of non-injective indecomposables,
together with structural scans (semiperfect / quasi-co-Frobenius checks,
Nakayama tables, simple-injective scans).
"""

__version__ = "0.1.0"

from .exactlin import DenseMatrix, FieldContext, IntegerMatrix, kernel_basis, rank_ff, rank_int
from .coalg import (
    Arrow,
    CoalgebraPresentation,
    InfiniteTemplate,
    QuiverPresentation,
    SimpleLabel,
    WindowUnsaturatedError,
    injective_basis,
    materialize,
    projective_basis,
    saturated,
)
from .comod import (
    Comodule,
    ComoduleError,
    ComoduleMorphism,
    ShortExactData,
    cosyzygy,
    direct_sum,
    hom_basis,
    injective_comodule,
    injective_dimension_probe,
    injective_envelope,
    projective_comodule,
    simple_comodule,
    socle,
    top,
    zero_comodule,
)
from .kschmidt import (
    Decomposition,
    DecompositionStuckError,
    EndoAlgebra,
    FieldTooSmallError,
    IsoRegistry,
    certify_indecomposable,
    decompose,
    endo_algebra,
    fitting_split,
    is_isomorphic,
    iso_witness,
)
from .itfunc import (
    ClassVector,
    OmegaTable,
    PhiDimEstimate,
    PhiReport,
    class_of,
    omega_bar,
    phi,
    phi_dim_estimate,
)
from .checks import (
    NakayamaTable,
    SocleNotSimpleError,
    StructureReport,
    TopNotSimpleError,
    check_qcf,
    check_semiperfect,
    cross_validate_theorem,
    nakayama_nu,
    simple_injectives,
)

__all__ = [name for name in dir() if not name.startswith("_")]
