"""Prime-order subgroup arithmetic over a safe-prime modulus.

Plaintexts for the multiplicative scheme live in the order-q subgroup of
Z_p^*, with p = 2q + 1 a safe prime (the quadratic residues).  This module
generates such groups, tests membership, and finds the subgroup member
closest to a target integer, which the fixed-point codec relies on.

Not hardened against side channels; intended for simulation and analysis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

try:
    from gmpy2 import powmod as _gmp_powmod

    def powmod(base: int, exp: int, mod: int) -> int:
        """Modular exponentiation, GMP-backed when gmpy2 is installed."""
        return int(_gmp_powmod(base, exp, mod))

except ImportError:
    powmod = pow

MILLER_RABIN_ROUNDS = 40  # error probability < 4^-40 < 2^-80

_SIEVE_BOUND = 2000


def _small_primes(bound: int) -> list[int]:
    flags = bytearray([1]) * bound
    flags[0] = flags[1] = 0
    for i in range(2, int(bound**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i in range(bound) if flags[i]]


_SMALL_PRIMES = _small_primes(_SIEVE_BOUND)


class GroupGenerationError(RuntimeError):
    """No safe prime found within the attempt budget."""


@dataclass(frozen=True)
class GroupParams:
    """Public parameters (p, q, g) of an order-q subgroup of Z_p^*.

    p = cofactor * q + 1 with p, q prime and g a generator of the
    subgroup (g^q = 1 mod p, g != 1).  Immutable and safe to share.
    """

    p: int
    q: int
    g: int
    cofactor: int = 2

    def __post_init__(self):
        if self.p != self.cofactor * self.q + 1:
            raise ValueError("p must equal cofactor*q + 1")
        if self.g <= 1 or self.g >= self.p:
            raise ValueError("generator out of range")
        if powmod(self.g, self.q, self.p) != 1:
            raise ValueError("generator does not have order dividing q")


def is_probable_prime(n: int, rng: random.Random, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin primality test with random bases from ``rng``."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    # write n-1 = 2^r * d with d odd
    r, d = 0, n - 1
    while d % 2 == 0:
        r += 1
        d //= 2
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_group_params(
    bit_length: int, rng: random.Random, max_attempts: int | None = None
) -> GroupParams:
    """Generate a fresh safe-prime group with p of exactly ``bit_length`` bits.

    Draws random odd q of bit_length-1 bits until both q and p = 2q + 1
    pass primality testing, then picks g = a^2 mod p for random a, which
    generates the quadratic residues.  Raises GroupGenerationError if the
    attempt budget runs out.
    """
    if bit_length < 3:
        raise ValueError("bit_length must be at least 3")
    if max_attempts is None:
        max_attempts = 2000 * bit_length
    for _ in range(max_attempts):
        q = rng.getrandbits(bit_length - 1)
        q |= (1 << (bit_length - 2)) | 1  # exact bit length, odd
        p = 2 * q + 1
        if any(q % sp == 0 or p % sp == 0 for sp in _SMALL_PRIMES if sp < q):
            continue
        # one cheap round on each before spending the full budget
        if not is_probable_prime(q, rng, rounds=1):
            continue
        if not is_probable_prime(p, rng, rounds=1):
            continue
        if is_probable_prime(q, rng) and is_probable_prime(p, rng):
            break
    else:
        raise GroupGenerationError(
            f"no {bit_length}-bit safe prime found in {max_attempts} attempts"
        )
    while True:
        a = rng.randrange(2, p - 1)
        g = a * a % p
        if g != 1:
            return GroupParams(p=p, q=q, g=g, cofactor=2)


def is_member(params: GroupParams, a: int) -> bool:
    """True iff ``a`` lies in the order-q subgroup (a^q = 1 mod p)."""
    if a <= 0 or a >= params.p:
        raise ValueError(f"value {a} outside (0, p)")
    return powmod(a, params.q, params.p) == 1


def nearest_member(params: GroupParams, target: int) -> int:
    """Subgroup member closest to ``target``; ties go to the smaller value.

    Searches target, target-1, target+1, target-2, ... so the first hit
    at any distance is the smaller candidate.  With cofactor 2 half of
    all residues are members, so the search terminates after a handful
    of steps in practice.
    """
    if target <= 0 or target >= params.p:
        raise ValueError(f"target {target} outside (0, p)")
    for offset in range(params.p):
        lo = target - offset
        if lo >= 1 and is_member(params, lo):
            return lo
        hi = target + offset
        if offset > 0 and hi < params.p and is_member(params, hi):
            return hi
    raise AssertionError("unreachable: subgroup is nonempty")


def format_keyfile(params: GroupParams) -> str:
    """Serialize group parameters as decimal `p=`, `q=`, `g=` lines."""
    return f"p={params.p}\nq={params.q}\ng={params.g}\n"


def parse_keyfile(text: str) -> GroupParams:
    """Parse the text produced by :func:`format_keyfile`.

    Recomputes the cofactor from p and q; structural invariants are
    checked by the GroupParams constructor.  Primality is not re-verified
    here (use :func:`is_probable_prime` when loading untrusted files).
    """
    fields: dict[str, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = int(value)
    missing = {"p", "q", "g"} - fields.keys()
    if missing:
        raise ValueError(f"key file missing fields: {sorted(missing)}")
    p, q, g = fields["p"], fields["q"], fields["g"]
    if q == 0 or (p - 1) % q != 0:
        raise ValueError("q does not divide p - 1")
    return GroupParams(p=p, q=q, g=g, cofactor=(p - 1) // q)
