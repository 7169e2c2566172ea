"""Fixed-point codec between bounded reals and subgroup plaintexts.

A real x is quantized to z = round(x / delta), mapped to its residue
mod p (negative z wraps to p + z, so sign survives multiplication), and
projected to the nearest subgroup member.  Products of two encodings
decode with delta^2.  Quantization error is bounded in tests rather than
tracked per sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modgroup import GroupParams, nearest_member


class ZeroEncodingError(ValueError):
    """round(x/delta) = 0: a multiplicative group has no encoding of zero.

    Callers must offset exact zeros by a quantization step or shrink
    delta.
    """


@dataclass(frozen=True)
class CodecConfig:
    """Group, quantization step and magnitude bound for the codec.

    The bound (value_bound/delta)^2 < p/2 guarantees that the product of
    two encoded magnitudes stays inside the symmetric range of Z_p, so
    products never wrap.
    """

    params: GroupParams
    delta: float
    value_bound: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.value_bound <= 0:
            raise ValueError("value_bound must be positive")
        if (self.value_bound / self.delta) ** 2 >= self.params.p / 2:
            raise ValueError(
                "(value_bound/delta)^2 must stay below p/2; "
                "use a larger group or coarser delta"
            )


def encode(x: float, cfg: CodecConfig) -> int:
    """Quantize x and return the nearest subgroup member of its residue."""
    if abs(x) > cfg.value_bound:
        raise ValueError(f"|{x}| exceeds value_bound {cfg.value_bound}")
    z = round(x / cfg.delta)
    if z == 0:
        raise ZeroEncodingError(f"{x} quantizes to zero at delta={cfg.delta}")
    return nearest_member(cfg.params, z % cfg.params.p)


def decode(m: int, cfg: CodecConfig, power: int = 1) -> float:
    """Map a plaintext back to a real via its symmetric representative.

    power=1 decodes a fresh encoding, power=2 the product of two
    encodings (scaling delta^power).
    """
    if power not in (1, 2):
        raise ValueError("power must be 1 (fresh encoding) or 2 (product)")
    p = cfg.params.p
    z = m if m <= (p - 1) // 2 else m - p
    return z * cfg.delta**power


def sum_rows(matrix) -> np.ndarray:
    """Row sums of a real matrix: the post-decryption aggregation step."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return arr.sum(axis=1)
