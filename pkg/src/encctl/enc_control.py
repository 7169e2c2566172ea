"""Linear plant, encrypted linear controller, and closed-loop drivers.

The server-side controller multiplies a once-encrypted gain matrix (epoch
0) with freshly encrypted state vectors (current epoch) via cross-epoch
evaluation.  Keys rotate every step on the plant side, and the rotation
token never appears in the controller interface: ``encrypted_controller``
takes only a public key and ciphertexts.

A plaintext twin (``run_plain_loop``) consumes the identical noise stream
so encrypted-versus-plain deviations isolate quantization effects.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass

import numpy as np

from .codec import CodecConfig, decode, encode, sum_rows
from .elgamal import Ciphertext, PublicKey, SecretKey, encrypt
from .updatable import ExtendedCiphertext, cross_decrypt, cross_eval, initial_epoch, key_update


@dataclass(frozen=True)
class PlantModel:
    """x_{t+1} = A x_t + B u_t + w_t with Gaussian noise and initial state.

    A must be stable (spectral radius < 1).  sigma_w2 = 0 is allowed as a
    noiseless test mode; sigma_x2 is the initial-state variance, kept
    separate from the noise variance.
    """

    A: np.ndarray
    B: np.ndarray
    sigma_w2: float
    sigma_x2: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise ValueError("B must have as many rows as A")
        if float(np.abs(np.linalg.eigvals(A)).max()) >= 1.0:
            raise ValueError("A must be stable (spectral radius < 1)")
        if self.sigma_w2 < 0 or self.sigma_x2 < 0:
            raise ValueError("variances must be nonnegative")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class ControllerParams:
    """Static linear gain u = Phi x (alpha x beta)."""

    Phi: np.ndarray

    def __post_init__(self):
        Phi = np.atleast_2d(np.asarray(self.Phi, dtype=float))
        object.__setattr__(self, "Phi", Phi)

    @property
    def alpha(self) -> int:
        return self.Phi.shape[0]

    @property
    def beta(self) -> int:
        return self.Phi.shape[1]


@dataclass(frozen=True)
class LoopTrace:
    """Per-step record of a closed-loop run.

    states[t], inputs[t] are x_t and the applied u_t; ref_inputs[t] is the
    plaintext reference Phi @ (quantized x_t); errors[t] is the max
    absolute deviation between the two.
    """

    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray
    ref_inputs: np.ndarray
    errors: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    @property
    def max_error(self) -> float:
        return float(self.errors.max())

    def write_csv(self, path) -> None:
        """Columns t, x_1..x_n, u_1..u_m, uref_1..uref_m, err."""
        n = self.states.shape[1]
        m = self.inputs.shape[1]
        header = (
            ["t"]
            + [f"x_{i + 1}" for i in range(n)]
            + [f"u_{i + 1}" for i in range(m)]
            + [f"uref_{i + 1}" for i in range(m)]
            + ["err"]
        )
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for t in range(len(self)):
                writer.writerow(
                    [int(self.times[t])]
                    + [repr(float(v)) for v in self.states[t]]
                    + [repr(float(v)) for v in self.inputs[t]]
                    + [repr(float(v)) for v in self.ref_inputs[t]]
                    + [repr(float(self.errors[t]))]
                )


def plant_step(
    model: PlantModel, x: np.ndarray, u: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One step of the plant dynamics with fresh Gaussian noise."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (model.n,) or u.shape != (model.m,):
        raise ValueError(f"expected x of shape ({model.n},) and u of shape ({model.m},)")
    w = rng.normal(0.0, np.sqrt(model.sigma_w2), model.n)
    return model.A @ x + model.B @ u + w


def _quantize_nonzero(x: float, cfg: CodecConfig) -> float:
    # exact zeros are unencodable in a multiplicative group: offset by one step
    if round(x / cfg.delta) == 0:
        return cfg.delta
    return x


def encrypt_value(pk: PublicKey, x: float, cfg: CodecConfig, rng: random.Random) -> Ciphertext:
    """Encode one real (zero-offset applied) and encrypt it."""
    return encrypt(pk, encode(_quantize_nonzero(x, cfg), cfg), rng)


def encrypt_vector(
    pk: PublicKey, v: np.ndarray, cfg: CodecConfig, rng: random.Random
) -> list[Ciphertext]:
    return [encrypt_value(pk, float(x), cfg, rng) for x in v]


def encrypt_matrix(
    pk: PublicKey, M: np.ndarray, cfg: CodecConfig, rng: random.Random
) -> list[list[Ciphertext]]:
    return [encrypt_vector(pk, row, cfg, rng) for row in np.atleast_2d(M)]


def encrypted_controller(
    pk0: PublicKey,
    ct_phi0: list[list[Ciphertext]],
    ct_xi: list[Ciphertext],
) -> list[list[ExtendedCiphertext]]:
    """Entry-wise encrypted products Phi_ij * xi_j across key epochs.

    ct_phi0 is the gain encrypted at epoch 0; ct_xi the input vector under
    the current epoch.  The signature deliberately admits no update token:
    this is the complete server-side interface.
    """
    beta = len(ct_xi)
    if any(len(row) != beta for row in ct_phi0):
        raise ValueError("gain matrix columns must match input vector length")
    return [[cross_eval(pk0, ct_phi, ct_xi[j]) for j, ct_phi in enumerate(row)] for row in ct_phi0]


def decrypt_controller_output(
    sk0: SecretKey,
    sk_t: SecretKey,
    ect_matrix: list[list[ExtendedCiphertext]],
    cfg: CodecConfig,
) -> np.ndarray:
    """Two-key decrypt each product, decode at delta^2, and sum rows."""
    plain = [
        [decode(cross_decrypt(sk0, sk_t, ect), cfg, power=2) for ect in row]
        for row in ect_matrix
    ]
    return sum_rows(plain)


def _draw_initial_state(model: PlantModel, rng: np.random.Generator, x0) -> np.ndarray:
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (model.n,):
            raise ValueError(f"x0 must have shape ({model.n},)")
        return x0.copy()
    return rng.normal(0.0, np.sqrt(model.sigma_x2), model.n)


def run_encrypted_loop(
    model: PlantModel,
    controller: ControllerParams,
    cfg: CodecConfig,
    T: int,
    noise_rng: np.random.Generator,
    key_rng: random.Random,
    x0: np.ndarray | None = None,
) -> LoopTrace:
    """Drive the plant through the encrypted controller for T steps.

    Each step encrypts the state under the current epoch, evaluates the
    encrypted controller against the epoch-0 gain ciphertexts, recovers
    the input with the two-key decryption, steps the plant, and rotates
    the keys.  The gain is encrypted exactly once; no ciphertext is ever
    re-keyed and no token leaves this function.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if controller.beta != model.n or controller.alpha != model.m:
        raise ValueError("controller shape must be (m, n) for this plant")
    epoch0 = initial_epoch(cfg.params, key_rng)
    ct_phi0 = encrypt_matrix(epoch0.pk, controller.Phi, cfg, key_rng)
    epoch = epoch0

    x = _draw_initial_state(model, noise_rng, x0)
    states = np.empty((T, model.n))
    inputs = np.empty((T, model.m))
    refs = np.empty((T, model.m))
    errors = np.empty(T)
    for t in range(T):
        try:
            x_quant = np.array(
                [decode(encode(_quantize_nonzero(float(v), cfg), cfg), cfg) for v in x]
            )
            ct_xi = encrypt_vector(epoch.pk, x, cfg, key_rng)
        except ValueError as exc:
            raise ValueError(f"encoding failed at step {t}: {exc}") from exc
        ect = encrypted_controller(epoch0.pk, ct_phi0, ct_xi)
        u = decrypt_controller_output(epoch0.sk, epoch.sk, ect, cfg)
        u_ref = controller.Phi @ x_quant
        states[t] = x
        inputs[t] = u
        refs[t] = u_ref
        errors[t] = np.abs(u - u_ref).max()
        x = plant_step(model, x, u, noise_rng)
        epoch, _token = key_update(epoch, key_rng)  # token stays on the plant side
    return LoopTrace(np.arange(T), states, inputs, refs, errors)


def run_plain_loop(
    model: PlantModel,
    controller: ControllerParams,
    T: int,
    noise_rng: np.random.Generator,
    x0: np.ndarray | None = None,
) -> LoopTrace:
    """Reference loop with u = Phi x in the clear.

    Draws noise in the same order as the encrypted loop, so running both
    with generators seeded identically yields identical noise streams.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if controller.beta != model.n or controller.alpha != model.m:
        raise ValueError("controller shape must be (m, n) for this plant")
    x = _draw_initial_state(model, noise_rng, x0)
    states = np.empty((T, model.n))
    inputs = np.empty((T, model.m))
    for t in range(T):
        u = controller.Phi @ x
        states[t] = x
        inputs[t] = u
        x = plant_step(model, x, u, noise_rng)
    return LoopTrace(np.arange(T), states, inputs, inputs.copy(), np.zeros(T))
