"""nsbandit: a simulation laboratory for nonstationary multi-armed bandits.

Environments driven by latent stochastic processes, Thompson-sampling
variants (exact posterior, Kalman, satisficing), sliding-window baselines,
closed-form information-theoretic regret bounds, and a reproducible
experiment harness.
"""

__version__ = "0.1.0"

from .envs import (
    AR1Env,
    ArticlePoolEnv,
    BernoulliRewards,
    EnvSpec,
    FixedPlusGPEnv,
    GaussianNoise,
    GPTwoType,
    LatentPath,
    MarkovSwitchEnv,
    RenewalLBEnv,
    draw_reward,
    realize,
    regret_of_sequence,
    satisficing_regret_of_sequence,
)
from .gaussian import (
    ConditionalGaussian,
    GaussianBelief,
    NotPositiveDefinite,
    cholesky,
    condition,
    kalman_diffuse,
    kalman_update,
    mvn_sample,
)
from .harness import (
    ExperimentConfig,
    RegretEstimate,
    config_from_dict,
    config_to_dict,
    emit_figure_data,
    estimate_tau_eff,
    run_experiment,
    sweep,
)
from .policies import (
    Policy,
    STSDistortionPolicy,
    STSFixedMeanPolicy,
    STSSwitchDPPolicy,
    SWTSPolicy,
    SWUCBPolicy,
    TSExactGPPolicy,
    TSKalmanPolicy,
    UniformPolicy,
    dp_best_sequence,
    sts_distortion_target,
)
from .processes import (
    ArticlePoolSpec,
    MarkovSwitchSpec,
    RenewalSpec,
    SEKernel,
    sample_gp_path,
    se_cov,
)
