"""Structure-preserving Pade-type model-order reduction.

Ingests RCL netlists through modified nodal analysis, linearizes special
second-order and general higher-order systems, builds deflated block-Krylov
bases and produces PRIMA, SPRIM and higher-order structure-preserving
reduced models together with moment-matching diagnostics.
"""

__version__ = "0.1.0"

from .errors import (
    ExpansionPointIsPole,
    GridMismatch,
    NonPdInductance,
    ParseError,
    PoleOrSingular,
    ReducedInnerGSingular,
    ReducedPencilSingular,
    RelationViolated,
    SingularInnerG,
    SingularMatrix,
    SpmorError,
    TargetUnreachable,
    ValidationError,
)
from .densela import lu_factor, orthonormalize, solve
from .netlist import (
    MnaData,
    Netlist,
    assemble_mna,
    mna_to_first_order,
    mna_to_second_order,
    parse_netlist,
    serialize_netlist,
)
from .systems import (
    FirstOrderSystem,
    HermitianStructure,
    HigherOrderSystem,
    SpecialSecondOrderSystem,
    eval_transfer,
    hermitian_structure,
    is_hermitian,
    verify_j_relations,
)
from .linearize import (
    LinearizationMap,
    linearize,
    linearize_higher_order,
    linearize_second_order,
)
from .krylov import KrylovBasis, KrylovOperator, build_basis, make_operator
from .reduce import ReducedModel, higher_order_reduce, prima_reduce, sprim_reduce
from .analysis import (
    FrequencyResponse,
    MatchReport,
    MomentTable,
    compute_moments,
    match_report,
    passivity_sample,
    projected_output_identity,
    sweep,
    sweep_error,
)
