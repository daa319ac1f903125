"""semiflex: exact computer algebra for graded Lie algebras with
semi-infinite structure — PBW arithmetic, Verma-type and Wakimoto modules,
Chevalley-Eilenberg and semi-infinite cohomology, all over exact rationals.
"""

from .liealg import (
    AlgebraError,
    GradedLieAlgebra,
    SubalgebraSpec,
    WindowError,
    beta_functional,
    bracket,
    build_affine_sl2,
    build_test_algebra,
    check_jacobi,
    dump_algebra,
    load_algebra,
    split_semiinfinite,
    subalgebra,
)
from .pbw import (
    InfiniteEnumerationError,
    canonical_order,
    descending_order,
    dual_pair,
    enumerate_pbw,
    enumerate_pbw_weights,
    multiply,
    normal_order,
)
from .modules import (
    Character,
    CohomologyTable,
    WeightModule,
    ce_cohomology,
    ce_homology,
    character,
    character_module,
    check_commutators,
    coverma,
    direct_sum,
    free_negative_module,
    product_formula_character,
    trivial_module,
    verma,
)
from .forms import (
    AnomalyError,
    contract,
    differential,
    enumerate_forms,
    semiinf_cohomology,
    semiinvariants,
    vacuum,
    wedge,
)
from .induction import (
    SemiregularModel,
    Verdict,
    bimodule_commutes,
    check_prop_iso,
    check_prop_iso1,
    check_shapiro,
    check_universal_property,
    s_ind,
    universal_semijective,
    wakimoto,
)

__version__ = "0.1.0"
