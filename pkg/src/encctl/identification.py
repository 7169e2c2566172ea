"""Least-squares identification of the plant from intercepted trajectories.

Models an adversary who injects i.i.d. Gaussian probing inputs, records N
state/input pairs, and estimates (A, B) by solving the linear regression
X_f = [A B] [X_p; U_p] + W_p.  Deciphering is treated as free here; its
cost enters the security analysis through the deciphering-time formula,
not through this simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enc_control import PlantModel


class RankDeficiencyError(RuntimeError):
    """The stacked regressor [X_p; U_p] lost row rank; no unique estimate."""


@dataclass(frozen=True)
class AttackConfig:
    """Probing variance, window length N = t_f - t_s + 1, and start time.

    sigma_u2 = 0 is allowed as a degenerate no-excitation mode; the
    estimator then fails with a rank error rather than here.
    """

    sigma_u2: float
    N: int
    t_s: int = 0

    def __post_init__(self):
        if self.sigma_u2 < 0:
            raise ValueError("sigma_u2 must be nonnegative")
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.t_s < 0:
            raise ValueError("t_s must be nonnegative")


@dataclass(frozen=True)
class DataMatrices:
    """Stacked trajectory windows.

    Columns t of Xf/Xp/Up/Wp are x_{t+1}, x_t, u_t, w_t for t in
    [t_s, t_f - 1].  Wp is retained only so tests can check the exact
    regression identity; a real adversary never sees it.
    """

    Xf: np.ndarray
    Xp: np.ndarray
    Up: np.ndarray
    Wp: np.ndarray


@dataclass(frozen=True)
class IdentResult:
    Ahat: np.ndarray
    Bhat: np.ndarray
    epsilon: float


def collect_data(model: PlantModel, atk: AttackConfig, rng: np.random.Generator) -> DataMatrices:
    """Simulate the plant under Gaussian probing and stack the attack window.

    The trajectory starts at x_0 ~ N(0, sigma_x^2 I) and is driven by
    probing inputs u_t ~ N(0, sigma_u^2 I) from t = 0 on; the window
    [t_s, t_f] is then sliced out.
    """
    n, m = model.n, model.m
    if atk.N < n + m + 1:
        raise ValueError(f"N={atk.N} below the identifiability floor n+m+1={n + m + 1}")
    t_f = atk.t_s + atk.N - 1
    x = np.empty((n, t_f + 1))
    x[:, 0] = rng.normal(0.0, np.sqrt(model.sigma_x2), n)
    u = rng.normal(0.0, np.sqrt(atk.sigma_u2), (m, t_f))
    w = rng.normal(0.0, np.sqrt(model.sigma_w2), (n, t_f))
    for t in range(t_f):
        x[:, t + 1] = model.A @ x[:, t] + model.B @ u[:, t] + w[:, t]
    s = atk.t_s
    return DataMatrices(
        Xf=x[:, s + 1 : t_f + 1].copy(),
        Xp=x[:, s:t_f].copy(),
        Up=u[:, s:t_f].copy(),
        Wp=w[:, s:t_f].copy(),
    )


def least_squares_estimate(
    data: DataMatrices, rcond: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Estimate (A, B) minimizing ||Xf - [A B] [Xp; Up]||_F.

    Solved through an orthogonal-decomposition least-squares routine
    rather than explicit normal equations.  Singular values below
    rcond * (largest singular value) count as zero; if the regressor is
    rank deficient at that tolerance, RankDeficiencyError is raised.
    """
    n = data.Xp.shape[0]
    m = data.Up.shape[0]
    D = np.vstack([data.Xp, data.Up])
    theta_t, _, rank, _ = np.linalg.lstsq(D.T, data.Xf.T, rcond=rcond)
    if rank < n + m:
        raise RankDeficiencyError(
            f"regressor rank {rank} < {n + m}; more or richer excitation needed"
        )
    theta = theta_t.T
    return theta[:, :n], theta[:, n:]


def estimation_error(
    A: np.ndarray, B: np.ndarray, Ahat: np.ndarray, Bhat: np.ndarray
) -> float:
    """Mean square entry-wise error ||[A B] - [Ahat Bhat]||_F^2 / (n(n+m))."""
    truth = np.hstack([np.asarray(A, dtype=float), np.asarray(B, dtype=float)])
    est = np.hstack([np.asarray(Ahat, dtype=float), np.asarray(Bhat, dtype=float)])
    if truth.shape != est.shape:
        raise ValueError(f"shape mismatch {truth.shape} vs {est.shape}")
    n = truth.shape[0]
    c = n * truth.shape[1]
    return float(np.linalg.norm(truth - est, "fro") ** 2) / c


def identify(model: PlantModel, atk: AttackConfig, rng: np.random.Generator) -> IdentResult:
    """One collect-estimate-score pass against a known true plant."""
    data = collect_data(model, atk, rng)
    Ahat, Bhat = least_squares_estimate(data)
    return IdentResult(Ahat, Bhat, estimation_error(model.A, model.B, Ahat, Bhat))


@dataclass(frozen=True)
class MonteCarloResult:
    """Mean error over successful trials plus the raw per-trial values.

    Rank-deficient trials are kept as NaN in ``epsilons`` and counted in
    ``n_failed`` instead of being silently dropped.
    """

    mean_epsilon: float
    epsilons: np.ndarray = field(repr=False)
    n_failed: int = 0


def monte_carlo_error(
    model: PlantModel, atk: AttackConfig, trials: int, seed: int
) -> MonteCarloResult:
    """Repeat the identification attack with independently seeded trials.

    Sub-seeds are spawned deterministically from ``seed``, so results are
    bit-identical across runs and independent of trial ordering.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    eps = np.full(trials, np.nan)
    failed = 0
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        try:
            eps[i] = identify(model, atk, np.random.default_rng(ss)).epsilon
        except RankDeficiencyError:
            failed += 1
    mean = float(np.nanmean(eps)) if failed < trials else float("nan")
    return MonteCarloResult(mean_epsilon=mean, epsilons=eps, n_failed=failed)
