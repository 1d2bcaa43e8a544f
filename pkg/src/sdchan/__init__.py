"""sdchan: zero-error and vanishing-error analysis of channels with state.

The package decides positivity of zero-error feedback capacities of
state-dependent discrete memoryless channels under the standard
state-information models and coding-length regimes, computes the matching
vanishing-error capacities numerically, and simulates the zero-error
protocols with hard (count, not tolerance) correctness checks.
"""

__version__ = "0.1.0"

from .channel import (
    ALL_MODELS,
    DECODER_ONLY_CAUSAL,
    Dmc,
    Regime,
    SI_MODELS,
    SdDmc,
    Si,
    SiModel,
    ValidationReport,
    load_channel,
    serialize,
    support,
    validate,
)
from .errors import (
    AlphabetTooLarge,
    BudgetExceeded,
    NoConvergence,
    ParseError,
    PrecondFailed,
    SdchanError,
    SearchSpaceTooLarge,
    UnsupportedModel,
    ValidationError,
)
from .reductions import (
    average_states,
    enumerate_strategy_letters,
    extend_with_termination,
    joint_output_channel,
    joint_output_index,
    shannon_strategy_channel,
)
from .positivity import (
    POSITIVE,
    POSITIVE_SUFFICIENT,
    UNKNOWN,
    ZERO,
    Verdict,
    bl_positivity,
    check_dmc_fl_feedback,
    check_dmc_vl,
    check_nocvlpos,
    partition_exists,
    positivity,
    verify_witness,
    vl_positivity,
)
from .capacity import (
    CapacityResult,
    blahut_arimoto,
    capacity_cond_iid,
    gelfand_pinsker_capacity,
    mutual_information,
    shannon_strategy_capacity,
    shannon_zef_fl_capacity,
    vanishing_capacity,
    zero_error_capacity,
)
from .protocols import (
    HanSatoRun,
    ProtocolStats,
    Trace,
    monte_carlo,
    reduced_dmc,
    run_disprover_bit,
    run_han_sato,
    run_theorem5_bit,
    sample_state,
    step,
)
from .oracles import (
    OracleReport,
    confusable_all_pairs_fl,
    gp_grid_oracle,
    grid_capacity,
)
