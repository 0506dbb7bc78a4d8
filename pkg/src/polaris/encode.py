"""Polar transform and frame assembly.

The encoder applies the n-fold Kronecker power of [[1, 0], [1, 1]] in
natural index order (no bit-reversal permutation).  The transform is its
own inverse over GF(2), which the decoders use to recover u-domain
estimates from codeword estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec, crc_check, crc_checksum_bits

__all__ = ["polar_encode", "attach_and_encode", "extract_payload", "MessageFrame"]


@dataclass(eq=False)
class MessageFrame:
    """Payload bits together with the assembled u vector and codeword."""

    payload: np.ndarray
    u: np.ndarray
    codeword: np.ndarray


def polar_encode(u) -> np.ndarray:
    """Apply the polar transform along the last axis.

    Parameters
    ----------
    u : array_like
        Bit array whose last axis length is a power of two.  Leading axes
        are treated as independent frames.

    Returns
    -------
    numpy.ndarray
        ``u @ F^{(x) n}`` over GF(2), same shape, dtype uint8.
    """
    x = np.array(u, dtype=np.uint8)
    n = x.shape[-1]
    if n == 0 or n & (n - 1):
        raise ValueError(f"transform length {n} is not a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        view = x.reshape(*lead, n // (2 * h), 2, h)
        view[..., 0, :] ^= view[..., 1, :]
        h *= 2
    return x


def attach_and_encode(payload, spec: CodeSpec) -> MessageFrame:
    """Assemble a frame: checksum the payload, scatter, and encode.

    The payload followed by its CRC bits (when the spec has one) fills the
    unfrozen positions in ascending index order; frozen positions are zero.
    """
    payload = np.asarray(payload, dtype=np.uint8).ravel()
    if payload.size != spec.k:
        raise ValueError(f"payload has {payload.size} bits, spec wants {spec.k}")
    if payload.max(initial=0) > 1:
        raise ValueError("payload must contain only 0/1 values")
    if spec.crc is not None:
        frame_bits = np.concatenate([payload, crc_checksum_bits(payload, spec.crc)])
    else:
        frame_bits = payload
    u = np.zeros(spec.N, dtype=np.uint8)
    u[spec.info_positions] = frame_bits
    return MessageFrame(payload=payload, u=u, codeword=polar_encode(u))


def extract_payload(u, spec: CodeSpec) -> tuple[np.ndarray, bool]:
    """Recover (payload, crc_ok) from a u-domain estimate.

    ``crc_ok`` is False when the spec carries no CRC.
    """
    u = np.asarray(u, dtype=np.uint8).ravel()
    if u.size != spec.N:
        raise ValueError(f"u vector has {u.size} bits, spec wants {spec.N}")
    frame_bits = u[spec.info_positions]
    if spec.crc is None:
        return frame_bits, False
    return frame_bits[: spec.k], crc_check(frame_bits, spec.crc)
