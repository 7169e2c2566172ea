"""Encrypted-control security toolkit.

Multiplicative homomorphic encryption with per-step key rotation and
cross-epoch evaluation, an encrypted linear control loop built on it,
least-squares identification attacks against the loop, and the design of
the security parameter and key length that keep the loop secure against
a given adversary budget.
"""

from .codec import CodecConfig, ZeroEncodingError, decode, encode, sum_rows
from .elgamal import Ciphertext, PublicKey, SecretKey, decrypt, encrypt, keygen, multiply
from .enc_control import (
    ControllerParams,
    LoopTrace,
    PlantModel,
    encrypted_controller,
    plant_step,
    run_encrypted_loop,
    run_plain_loop,
)
from .identification import (
    AttackConfig,
    DataMatrices,
    IdentResult,
    MonteCarloResult,
    RankDeficiencyError,
    collect_data,
    estimation_error,
    identify,
    least_squares_estimate,
    monte_carlo_error,
)
from .modgroup import (
    GroupGenerationError,
    GroupParams,
    generate_group_params,
    is_member,
    nearest_member,
)
from .security_design import (
    DesignResult,
    GramianPair,
    InconclusiveSecurityError,
    SecurityRequirement,
    UnstableSystemError,
    deciphering_time,
    design,
    design_security_parameter,
    gnfs_ln_complexity,
    gramians,
    is_secure,
    min_key_length,
    sic_full,
    sic_large_n,
    sic_upperbound_input,
    sic_upperbound_noise,
    solve_discrete_lyapunov,
    spectral_radius,
)
from .updatable import (
    ExtendedCiphertext,
    KeyEpoch,
    UpdateToken,
    cross_decrypt,
    cross_eval,
    ct_update,
    initial_epoch,
    key_update,
    recover_next_key,
)

__version__ = "0.1.0"
