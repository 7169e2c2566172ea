"""Key rotation for the multiplicative scheme, with cross-epoch evaluation.

A key epoch is rotated by drawing a fresh secret s' and publishing
h' = h*g^d with d = s' - s mod q.  The pair (h, d) is the update token;
whoever holds it can refresh old ciphertexts to the new key, but can also
recover the next secret key from the current one (``recover_next_key``),
which is exactly why the token must never reach an untrusted host.

``cross_eval``/``cross_decrypt`` remove the need to send the token out at
all: the product of two ciphertexts from *different* epochs is kept as a
three-component ciphertext and decrypted with both epoch secrets, so a
remote evaluator only ever sees public keys and ciphertexts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple

from .elgamal import Ciphertext, PublicKey, SecretKey, decrypt, keygen, multiply
from .modgroup import GroupParams, powmod


class UpdateToken(NamedTuple):
    h_old: int  # public component before the rotation
    d: int      # secret-key difference, reduced mod q


class ExtendedCiphertext(NamedTuple):
    c1: int
    c2: int
    c3: int


@dataclass(frozen=True)
class KeyEpoch:
    t: int
    pk: PublicKey
    sk: SecretKey

    def __post_init__(self):
        params = self.pk.params
        if self.t < 0:
            raise ValueError("epoch index must be nonnegative")
        if powmod(params.g, self.sk.s, params.p) != self.pk.h:
            raise ValueError("public and secret keys do not match")


def initial_epoch(params: GroupParams, rng: random.Random) -> KeyEpoch:
    """Generate the epoch-0 key pair."""
    pk, sk = keygen(params, rng)
    return KeyEpoch(0, pk, sk)


def key_update(epoch: KeyEpoch, rng: random.Random) -> tuple[KeyEpoch, UpdateToken]:
    """Rotate to a fresh secret; returns the next epoch and its token.

    The difference d = s' - s is reduced mod q, not mod p: exponents live
    in the order-q group, and reducing mod p would make h*g^d miss g^{s'}
    whenever s' < s.
    """
    params = epoch.pk.params
    s_new = rng.randrange(params.q)
    d = (s_new - epoch.sk.s) % params.q
    h_new = epoch.pk.h * powmod(params.g, d, params.p) % params.p
    token = UpdateToken(epoch.pk.h, d)
    new_epoch = KeyEpoch(epoch.t + 1, PublicKey(params, h_new), SecretKey(params, s_new))
    return new_epoch, token


def ct_update(
    params: GroupParams,
    ct: Ciphertext,
    token: UpdateToken,
    rng: random.Random | None = None,
    r: int | None = None,
) -> Ciphertext:
    """Re-key a ciphertext to the epoch after ``token``'s rotation.

    Output is (c1*g^r, (c1*g^r)^d * c2 * h^r) with fresh r, so the result
    is also re-randomized.  Decrypting under the post-rotation secret key
    yields the original plaintext.
    """
    if r is None:
        if rng is None:
            raise ValueError("ct_update needs an rng when r is not given")
        r = rng.randrange(1, params.q)
    elif not 0 <= r < params.q:
        raise ValueError("r outside [0, q)")
    p = params.p
    c1_new = ct.c1 * powmod(params.g, r, p) % p
    c2_new = powmod(c1_new, token.d, p) * ct.c2 % p * powmod(token.h_old, r, p) % p
    return Ciphertext(c1_new, c2_new)


def cross_eval(pk: PublicKey, ct1: Ciphertext, ct2: Ciphertext) -> ExtendedCiphertext:
    """Multiply two ciphertexts that may come from different key epochs.

    Keeps both first components so each epoch's mask can be stripped
    separately at decryption time.  Needs no secret material and no
    token; epoch bookkeeping is the caller's job.
    """
    ct = multiply(pk, ct1, ct2)
    return ExtendedCiphertext(ct1.c1, ct2.c1, ct.c2)


def cross_decrypt(sk1: SecretKey, sk2: SecretKey, ect: ExtendedCiphertext) -> int:
    """Decrypt a cross-epoch product with the two operand epochs' secrets.

    sk1/sk2 must be the epochs of the first/second operand of
    ``cross_eval``.  Wrong keys produce a uniformly random-looking group
    element rather than an error.
    """
    c_tilde = decrypt(sk2, Ciphertext(ect.c2, ect.c3))
    return decrypt(sk1, Ciphertext(ect.c1, c_tilde))


def recover_next_key(sk: SecretKey, token: UpdateToken) -> SecretKey:
    """Next epoch's secret key from the current one plus the update token.

    s' = s + d mod q, always.  This is the attack the token-free data
    flow is designed to rule out; it exists so tests and demos can show
    the vulnerability concretely.
    """
    return SecretKey(sk.params, (sk.s + token.d) % sk.params.q)


def format_extended(ect: ExtendedCiphertext) -> str:
    """Decimal `c1,c2,c3` triple, CSV-compatible."""
    return f"{ect.c1},{ect.c2},{ect.c3}"


def parse_extended(text: str) -> ExtendedCiphertext:
    c1, c2, c3 = text.strip().split(",")
    return ExtendedCiphertext(int(c1), int(c2), int(c3))
