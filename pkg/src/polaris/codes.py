"""Polar code construction and CRC handling.

Frozen sets come from the Bhattacharyya-parameter recursion in natural
(non-bit-reversed) index order.  CRC configs cover the usual 8/16/32-bit
generators; checksums are computed over bit sequences so they can be
scattered straight into the unfrozen positions of a polar code.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CrcConfig",
    "CRC8",
    "CRC16",
    "CRC32",
    "crc_compute",
    "crc_checksum_bits",
    "crc_check",
    "construct_frozen_set",
    "CodeSpec",
]


@dataclass(frozen=True)
class CrcConfig:
    """CRC generator description.

    Parameters
    ----------
    width : int
        Checksum width in bits, one of 8, 16, 32.
    polynomial : int
        Generator polynomial in normal form (implicit leading term).
    init : int
        Initial shift-register value.
    reflect : bool
        If True the register runs LSB-first with the reversed polynomial
        (the convention of the IEEE CRC-32).
    xor_out : int
        Value XORed onto the register to produce the checksum.
    """

    width: int
    polynomial: int
    init: int = 0
    reflect: bool = False
    xor_out: int = 0

    def __post_init__(self):
        if self.width not in (8, 16, 32):
            raise ValueError(f"unsupported CRC width {self.width}")
        limit = 1 << self.width
        for name in ("polynomial", "init", "xor_out"):
            value = getattr(self, name)
            if not 0 <= value < limit:
                raise ValueError(f"{name} {value:#x} does not fit in {self.width} bits")


CRC8 = CrcConfig(width=8, polynomial=0x07)
CRC16 = CrcConfig(width=16, polynomial=0x1021)
CRC32 = CrcConfig(
    width=32, polynomial=0x04C11DB7, init=0xFFFFFFFF, reflect=True, xor_out=0xFFFFFFFF
)


def _bit_reverse(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def crc_compute(bits, cfg: CrcConfig) -> int:
    """Run the CRC register over a bit sequence and return the checksum.

    Bits are consumed in sequence order.  For byte-oriented test vectors
    that means MSB-first per byte for normal configs and LSB-first per
    byte for reflected ones.

    Parameters
    ----------
    bits : array_like
        Sequence of 0/1 values.  May be empty.
    cfg : CrcConfig
        Generator description.

    Returns
    -------
    int
        Checksum value (``width`` bits).
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size and bits.max() > 1:
        raise ValueError("CRC input must contain only 0/1 values")
    w = cfg.width
    if cfg.reflect:
        reg = _bit_reverse(cfg.init, w)
        rpoly = _bit_reverse(cfg.polynomial, w)
        for b in bits.tolist():
            if (reg ^ b) & 1:
                reg = (reg >> 1) ^ rpoly
            else:
                reg >>= 1
    else:
        mask = (1 << w) - 1
        reg = cfg.init
        for b in bits.tolist():
            top = (reg >> (w - 1)) & 1
            reg = (reg << 1) & mask
            if top ^ b:
                reg ^= cfg.polynomial
    return reg ^ cfg.xor_out


def _checksum_to_bits(value: int, cfg: CrcConfig) -> np.ndarray:
    # append order: MSB-first for normal configs, LSB-first for reflected
    seq = range(cfg.width - 1, -1, -1) if not cfg.reflect else range(cfg.width)
    return np.array([(value >> i) & 1 for i in seq], dtype=np.uint8)


@functools.lru_cache(maxsize=32)
def _crc_affine(cfg: CrcConfig, nbits: int):
    # CRC is affine in the message over GF(2): checksum(x) = x @ M + c.
    # Built once per (config, length); used by crc_checksum_bits / crc_check
    # so per-frame checks cost a small matmul instead of a bit loop.
    const = _checksum_to_bits(crc_compute(np.zeros(nbits, dtype=np.uint8), cfg), cfg)
    matrix = np.zeros((nbits, cfg.width), dtype=np.uint8)
    unit = np.zeros(nbits, dtype=np.uint8)
    for j in range(nbits):
        unit[j] = 1
        row = _checksum_to_bits(crc_compute(unit, cfg), cfg)
        matrix[j] = row ^ const
        unit[j] = 0
    return matrix, const


def crc_checksum_bits(bits, cfg: CrcConfig) -> np.ndarray:
    """Checksum of ``bits`` as a bit array in append order."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    matrix, const = _crc_affine(cfg, bits.size)
    return (bits.astype(np.uint32) @ matrix & 1).astype(np.uint8) ^ const


def crc_check(bits, cfg: CrcConfig) -> bool:
    """True iff the trailing ``cfg.width`` bits checksum the prefix."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size < cfg.width:
        raise ValueError(f"frame of {bits.size} bits is shorter than the CRC width")
    payload, tail = bits[: -cfg.width], bits[-cfg.width :]
    return bool(np.array_equal(crc_checksum_bits(payload, cfg), tail))


def construct_frozen_set(block_length: int, k_total: int, eps: float = 0.5) -> np.ndarray:
    """Frozen index set from the Bhattacharyya-parameter recursion.

    Starting from a single erasure parameter ``eps``, each doubling maps a
    channel with parameter z to the pair (2z - z^2, z^2) in natural index
    order.  The ``block_length - k_total`` least reliable indices (largest
    parameter) are frozen; ties freeze the lower index first, so the result
    is platform independent.

    Parameters
    ----------
    block_length : int
        Code length N, a power of two.
    k_total : int
        Number of unfrozen positions (information + CRC bits).
    eps : float
        Design erasure probability in [0, 1].

    Returns
    -------
    numpy.ndarray
        Sorted frozen indices, exactly ``block_length - k_total`` of them.
    """
    n = block_length
    if n < 2 or n & (n - 1):
        raise ValueError(f"block length {n} is not a power of two >= 2")
    if not 0 <= k_total <= n:
        raise ValueError(f"k_total {k_total} outside [0, {n}]")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"design erasure probability {eps} outside [0, 1]")
    z = np.array([eps], dtype=np.float64)
    while z.size < n:
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    # stable sort on -z: equal parameters keep index order, so the lower
    # index is frozen first
    order = np.argsort(-z, kind="stable")
    return np.sort(order[: n - k_total])


@dataclass(eq=False)
class CodeSpec:
    """A concrete polar code: length, payload size, CRC and frozen mask.

    ``k`` counts payload bits only; the CRC (when present) occupies
    ``crc.width`` additional unfrozen positions.
    """

    N: int
    k: int
    crc: CrcConfig | None
    frozen_mask: np.ndarray
    design_param: float = 0.5

    def __post_init__(self):
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"block length {self.N} is not a power of two >= 2")
        if self.k < 1:
            raise ValueError(f"payload size {self.k} must be positive")
        if self.k_total > self.N:
            raise ValueError(
                f"payload {self.k} + CRC {self.crc_width} exceeds block length {self.N}"
            )
        mask = np.asarray(self.frozen_mask, dtype=np.uint8).ravel()
        if mask.size != self.N:
            raise ValueError(f"frozen mask has {mask.size} entries, expected {self.N}")
        if mask.max(initial=0) > 1:
            raise ValueError("frozen mask must contain only 0/1 values")
        if int(mask.sum()) != self.N - self.k_total:
            raise ValueError(
                f"frozen mask freezes {int(mask.sum())} positions, "
                f"expected {self.N - self.k_total}"
            )
        self.frozen_mask = mask

    @classmethod
    def construct(cls, N: int, k: int, crc: CrcConfig | None = None,
                  design_param: float = 0.5) -> "CodeSpec":
        """Build a spec by freezing the least reliable indices."""
        crc_width = crc.width if crc is not None else 0
        frozen = construct_frozen_set(N, k + crc_width, design_param)
        mask = np.zeros(N, dtype=np.uint8)
        mask[frozen] = 1
        return cls(N=N, k=k, crc=crc, frozen_mask=mask, design_param=design_param)

    @property
    def crc_width(self) -> int:
        return self.crc.width if self.crc is not None else 0

    @property
    def k_total(self) -> int:
        return self.k + self.crc_width

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.k / self.N

    @functools.cached_property
    def info_positions(self) -> np.ndarray:
        """Unfrozen indices in ascending order (payload then CRC bits)."""
        return np.flatnonzero(self.frozen_mask == 0)

    def save(self, path) -> None:
        """Write the spec in the mask file format (N=, k=, crc=, mask line)."""
        crc_field = str(self.crc.width) if self.crc is not None else "none"
        mask_line = "".join("1" if b else "0" for b in self.frozen_mask)
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"N={self.N}\nk={self.k}\ncrc={crc_field}\n{mask_line}\n")

    @classmethod
    def load(cls, path) -> "CodeSpec":
        """Read a spec written by :meth:`save`.

        The crc field stores only the width; it maps back to the preset
        generator of that width (CRC8 / CRC16 / CRC32).
        """
        with open(path, "r", encoding="ascii") as fh:
            lines = [line.strip() for line in fh if line.strip()]
        if len(lines) != 4:
            raise ValueError(f"mask file {path}: expected 4 lines, found {len(lines)}")
        fields = {}
        for key, line in zip(("N", "k", "crc"), lines[:3]):
            tag, sep, value = line.partition("=")
            if tag != key or not sep:
                raise ValueError(f"mask file {path}: expected '{key}=...', found '{line}'")
            fields[key] = value
        if fields["crc"] == "none":
            crc = None
        else:
            presets = {8: CRC8, 16: CRC16, 32: CRC32}
            try:
                crc = presets[int(fields["crc"])]
            except (KeyError, ValueError):
                raise ValueError(
                    f"mask file {path}: unsupported crc field '{fields['crc']}'"
                ) from None
        if set(lines[3]) - {"0", "1"}:
            raise ValueError(f"mask file {path}: mask line has characters outside 0/1")
        mask = np.frombuffer(lines[3].encode("ascii"), dtype=np.uint8) - ord("0")
        return cls(
            N=int(fields["N"]), k=int(fields["k"]), crc=crc, frozen_mask=mask
        )
