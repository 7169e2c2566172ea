"""Textbook multiplicative ElGamal over a prime-order subgroup.

Ciphertexts are pairs (g^r, m*h^r) mod p.  The scheme is multiplicatively
homomorphic: the component-wise product of two ciphertexts under the same
key decrypts to the product of the plaintexts mod p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple

from .modgroup import GroupParams, is_member, powmod


@dataclass(frozen=True)
class SecretKey:
    params: GroupParams
    s: int

    def __post_init__(self):
        if not 0 <= self.s < self.params.q:
            raise ValueError("secret exponent outside [0, q)")


@dataclass(frozen=True)
class PublicKey:
    params: GroupParams
    h: int

    def __post_init__(self):
        if not is_member(self.params, self.h):
            raise ValueError("public component outside the subgroup")


class Ciphertext(NamedTuple):
    c1: int
    c2: int


def keygen(params: GroupParams, rng: random.Random) -> tuple[PublicKey, SecretKey]:
    """Draw s uniform over Z_q and return ((params, g^s mod p), s)."""
    s = rng.randrange(params.q)
    h = powmod(params.g, s, params.p)
    return PublicKey(params, h), SecretKey(params, s)


def encrypt(pk: PublicKey, m: int, rng: random.Random | None = None, r: int | None = None) -> Ciphertext:
    """Encrypt a subgroup member m as (g^r, m*h^r) mod p.

    r is drawn fresh from (0, q) unless given explicitly; passing r
    (including 0) makes the ciphertext deterministic for testing.  r = 0
    is never drawn because it would reveal m in the second component.
    """
    p = pk.params.p
    if not is_member(pk.params, m):
        raise ValueError(f"plaintext {m} is not a subgroup member")
    if r is None:
        if rng is None:
            raise ValueError("encrypt needs an rng when r is not given")
        r = rng.randrange(1, pk.params.q)
    elif not 0 <= r < pk.params.q:
        raise ValueError("r outside [0, q)")
    return Ciphertext(powmod(pk.params.g, r, p), m * powmod(pk.h, r, p) % p)


def decrypt(sk: SecretKey, ct: Ciphertext) -> int:
    """Recover m = c1^{-s} * c2 mod p.

    The inverse is computed as c1^{q-s}; every subgroup element has order
    dividing q, so no extended-gcd path is needed.
    """
    p, q = sk.params.p, sk.params.q
    return powmod(ct.c1, (q - sk.s) % q, p) * ct.c2 % p


def multiply(pk: PublicKey, ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    """Homomorphic product of two ciphertexts under the same key epoch."""
    p = pk.params.p
    return Ciphertext(ct1.c1 * ct2.c1 % p, ct1.c2 * ct2.c2 % p)


def format_ciphertext(ct: Ciphertext) -> str:
    """Decimal `c1,c2` pair, CSV-compatible."""
    return f"{ct.c1},{ct.c2}"


def parse_ciphertext(text: str) -> Ciphertext:
    c1, c2 = text.strip().split(",")
    return Ciphertext(int(c1), int(c2))
