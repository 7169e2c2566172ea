"""Run the least-squares identification attack and compare the measured
error against its analytic lower bound.

Fifty independent attacks per sample size; the mean error must sit above
the bound at every N, and shrink as the adversary collects more data.
"""

import numpy as np

from encctl import AttackConfig, PlantModel, monte_carlo_error, sic_full

model = PlantModel(
    A=np.sqrt(0.5) * np.eye(4),
    B=np.eye(4),
    sigma_w2=0.1,
    sigma_x2=1.0,
)
sigma_u2 = 10.0  # strong probing: variance ratio 100
psi = 2 * np.eye(4)

print("  N     mean error    lower bound   ratio   failures")
for N in (50, 100, 200, 400, 800, 1600):
    result = monte_carlo_error(model, AttackConfig(sigma_u2, N), trials=50, seed=N)
    gamma = sic_full(4, 4, model.sigma_x2, sigma_u2, model.sigma_w2, psi, psi, N)
    print(
        f"{N:>5}   {result.mean_epsilon:.4e}    {gamma:.4e}   "
        f"{result.mean_epsilon / gamma:5.2f}   {result.n_failed}"
    )

print("\nthe bound tracks the attack within a small constant: whoever picks")
print("the defense target gamma_c can read the required sample size off it.")
