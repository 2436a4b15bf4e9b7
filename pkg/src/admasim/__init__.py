"""Link-level simulator and algorithm library for downlink mmWave
massive-MIMO angle division multiple access."""

from .channel import (
    ChannelMatrix,
    PathComponent,
    SimParams,
    UserChannel,
    UserGeometry,
    channel_matrix,
    draw_user_channel,
    path_loss_db,
    place_users,
    steering_vector,
)
from .beams import (
    AngularSpacing,
    GridSpec,
    RadiationMap,
    beam_pattern,
    omega,
    omega_prime,
    omega_second_numeric,
    phi_relative,
    radiation_map,
)
from .exceptions import ConfigError, SingularChannelError
from .grouping import (
    Grouping,
    GroupingOrigin,
    SegaParams,
    aseg,
    greedy,
    proposition_exchange,
    random_grouping,
    sega,
    sus,
    validate,
)
from .harness import (
    CampaignConfig,
    TrialRecord,
    demo_config,
    load_config,
    run_campaign,
    run_trial,
)
from .precoding import (
    PairZfDecomposition,
    PrecoderMethod,
    PrecodingMatrix,
    mmse,
    mrt,
    pair_zf,
    zf,
    zf_neighbor_approx,
)
from .rates import (
    PowerBudget,
    RateReport,
    approx_user_rate,
    beam_gamma,
    dbm_to_watts,
    group_sum_rate,
    p1_objective,
    p2_objective,
    system_sum_rate,
    user_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
