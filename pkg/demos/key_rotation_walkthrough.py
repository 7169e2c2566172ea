"""Walk through the key-rotating encryption layer on a small group.

Covers the full life of a ciphertext: encryption, key rotation with
ciphertext refresh, the cross-epoch product that needs no refresh at all,
and the reason the update token must never leave the trusted side.
"""

import random

from encctl import (
    cross_decrypt,
    cross_eval,
    ct_update,
    decrypt,
    encrypt,
    generate_group_params,
    initial_epoch,
    key_update,
    recover_next_key,
)

rng = random.Random(7)

params = generate_group_params(64, rng)
print(f"group: p has {params.p.bit_length()} bits, subgroup order q = p >> 1")

epoch = initial_epoch(params, rng)
m = pow(params.g, 123456, params.p)
ct = encrypt(epoch.pk, m, rng)
print(f"\nencrypted m = {m}")
print(f"epoch 0 decryption: {decrypt(epoch.sk, ct)}")

# --- rotate keys five times, refreshing the ciphertext with each token
print("\nrotating keys with ciphertext refresh:")
ct_t = ct
epoch_t = epoch
for _ in range(5):
    epoch_t, token = key_update(epoch_t, rng)
    ct_t = ct_update(params, ct_t, token, rng)
    print(f"  epoch {epoch_t.t}: decrypts to {decrypt(epoch_t.sk, ct_t)}")

# --- the refresh needed the token; the cross-epoch product does not
print("\ncross-epoch product without any refresh:")
m2 = pow(params.g, 654321, params.p)
ct2 = encrypt(epoch_t.pk, m2, rng)  # fresh ciphertext, five epochs later
ect = cross_eval(epoch.pk, ct, ct2)
product = cross_decrypt(epoch.sk, epoch_t.sk, ect)
print(f"  decrypted product: {product}")
print(f"  m * m2 mod p:      {m * m2 % params.p}")

# --- why the token is dangerous in the wrong hands
print("\nwhat a token leak would cost:")
nxt, token = key_update(epoch_t, rng)
guess = recover_next_key(epoch_t.sk, token)
print(f"  token holder's guess of the next secret: {guess.s}")
print(f"  actual next secret:                      {nxt.sk.s}")
print("  -> with the token, yesterday's key breaks tomorrow's; the")
print("     cross-epoch product above is what lets us never send it.")
