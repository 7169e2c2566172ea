"""Design the security parameter for a reference plant, step by step.

Starts from the plant matrices, computes the controllability Gramians,
inspects the identification-error lower bound, and derives the minimum
sample size, security parameter and key length that meet a ten-year
defense target against a top-supercomputer adversary.
"""

import numpy as np

from encctl import (
    SecurityRequirement,
    deciphering_time,
    design,
    gramians,
    is_secure,
    sic_large_n,
    sic_upperbound_input,
)

A = np.sqrt(0.5) * np.eye(4)
B = np.eye(4)
pair = gramians(A, B)
print("plant Gramians (both 2I for this A, B):")
print(f"  tr(Psi_u) = {np.trace(pair.Psi_u):.6f}, tr(Psi_w) = {np.trace(pair.Psi_w):.6f}")

# the design case uses a harder-to-identify input Gramian target
psi_u = 0.5 * np.eye(4)
psi_w = 2.0 * np.eye(4)
r_sigma = 100.0

print("\nerror lower bound vs sample size (variance ratio 100):")
for N in (100, 1000, 10_000, 13_158, 13_159):
    gamma = sic_large_n(4, 4, r_sigma, np.trace(psi_u), np.trace(psi_w), N)
    bound = sic_upperbound_input(4, 4, r_sigma, N)
    print(f"  N = {N:>6}: gamma = {gamma:.4e}   ceiling = {bound:.4e}")

req = SecurityRequirement(
    gamma_c=1e-6,       # adversary must not estimate better than this
    tau_c=31536e4,      # ten years of protection, in seconds
    upsilon=442e15,     # adversary compute rate, FLOPS
)
result = design(4, 4, r_sigma, psi_u, psi_w, req)
print("\n" + result.report())

print("\nwhy these are minimal:")
tau_ok = deciphering_time(result.N_star, result.lambda_star, req.upsilon)
tau_low = deciphering_time(result.N_star, result.lambda_star - 1, req.upsilon)
print(f"  breaking N* ciphertexts at lambda*   : {tau_ok:.3e} s  (> {req.tau_c:.3e})")
print(f"  breaking N* ciphertexts at lambda*-1 : {tau_low:.3e} s  (too fast)")

def gamma_fn(N):
    return sic_large_n(4, 4, r_sigma, np.trace(psi_u), np.trace(psi_w), N)

print(f"  secure at lambda* ?  {is_secure(gamma_fn, result.lambda_star, req, 50_000)}")
print(f"  secure at lambda*-1? {is_secure(gamma_fn, result.lambda_star - 1, req, 50_000)}")
