"""Polar codes for multi-user multiple access channels over prime fields.

The library has three layers: exact GF(q) linear algebra and subspace
lattices (`gfq`, `subspace`), explicit channel tables with the two
polarization transforms and their information functionals (`mac`,
`linear_mac`), and the coding stack built on top of them (`polarize`
for branch analysis and code construction, `codec` for encoding,
successive-cancellation decoding and Monte Carlo evaluation).  `cli`
exposes the same functionality as batch subcommands.
"""

from .errors import (
    AmbientMismatchError,
    BadGridError,
    BadIndexSetError,
    BadRowSumError,
    LengthMismatchError,
    MacPolarError,
    NegativeProbabilityError,
    NotFullRankError,
    NotSingleUserError,
    ParseError,
    SingularMatrixError,
    SpecMismatchError,
    TooDeepError,
    TooLargeError,
    TooManyUsersError,
    ZeroInverseError,
)
from .gfq import (
    FieldMatrix,
    basis_extend,
    field_inv,
    is_prime,
    mat_inverse,
    mat_rank,
    null_space,
    rref,
)
from .subspace import (
    Subspace,
    closure,
    consistency_check,
    count_subspaces,
    enumerate_subspaces,
    orthogonal_passage_check,
    span,
)
from .mac import (
    DiscreteMac,
    bhattacharyya,
    merge_outputs,
    mutual_info,
    restrict,
    sum_capacity,
    transform_minus,
    transform_plus,
    validate,
)
from .linear_mac import (
    EvolveReport,
    LinearComboMac,
    RateRegion,
    binary2_combo,
    binary2_evolve,
    binary2_state,
    binary2_step,
    binary2_subspaces,
    rate_region,
    total_loss_predict,
)
from .polarize import (
    BranchCode,
    CodeSpec,
    DirectionStat,
    all_sigs,
    branch_order_cmp,
    build_code,
    detect_linear,
    direction_stats,
    iter_branch_channels,
    martingale_report,
    polarize_branch,
    projective_directions,
    sig_key,
)
from .codec import (
    CodewordBlock,
    DecodeResult,
    MessageAssignment,
    TrialReport,
    encode,
    frozen_from_seed,
    message_from_info,
    random_message,
    run_trials,
    sc_decode,
    simulate_channel,
    wilson_interval,
)

__version__ = "0.1.0"
