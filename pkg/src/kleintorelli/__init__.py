"""Differential method, diagonal symmetries and the Wagstaff-type stabilizer check for Klein hypersurfaces."""

from .diffmethod import (
    AutConstraint,
    Constraint,
    PosetReport,
    Reason,
    classify,
    detect_simple,
    diff_rank,
    diff_rank_directional,
    klein_cubic_direction_scan,
    le_relation,
    sparsity,
    variables,
)
from .forms import (
    Form,
    FormError,
    apply_substitution,
    delsarte,
    directional_derivative,
    fermat,
    klein,
    parse_form,
    partial_derivative,
)
from .numbertheory import Primality, is_prime, wagstaff_p, wagstaff_result, wagstaff_scan
from .symmetry import (
    DiagonalGroup,
    GroupDescriptor,
    InfiniteStabilizer,
    OutOfTableRange,
    PhaseMatrix,
    diagonal_automorphisms,
    family_aut_group,
    klein_m,
    verify_klein_generators,
)
from .torelli import (
    BudgetExceeded,
    NotWagstaffType,
    SpectrumSet,
    appendix_cubic_sets,
    extremality_report,
    spectrum_sets,
    stabilizer,
    torelli_check,
)

__version__ = "0.1.0"
