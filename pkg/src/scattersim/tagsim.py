"""Backscatter tag modulation and an abstract noisy channel.

The tag conveys each bit by 0/180-degree phase rotation of one PHY symbol,
which at the bit level is XOR of the symbol's bits: backscattered = ambient
XOR tag. Checksum trailers and everything outside the chosen symbols pass
through untouched. The channel is a binary symmetric abstraction; AWGN/BPSK
maps SNR to a flip probability once and then behaves like a BSC.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crc import CrcSpec
from .frames import Ampdu, ModulationWindow, ampdu_layout, serialize_bits
from .gf2 import BitVector

CHANNEL_MODES = ("noiseless", "bsc", "awgn")


@dataclass(frozen=True)
class TagPayload:
    """Tag data scheduled across an aggregate, one bit per window."""

    bits: BitVector
    bits_per_mpdu: int = 1

    def __post_init__(self):
        if self.bits_per_mpdu != 1:
            raise ValueError(
                "only one tag bit per MPDU is supported: each MPDU carries a "
                f"single checksum, got bits_per_mpdu={self.bits_per_mpdu}"
            )


@dataclass(frozen=True)
class ChannelConfig:
    """Channel abstraction: noiseless, bsc(p), or awgn_bpsk(snr_db)."""

    mode: str = "noiseless"
    ber: float = 0.0
    snr_db: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in CHANNEL_MODES:
            raise ValueError(f"unknown channel mode {self.mode!r}; use {CHANNEL_MODES}")
        if self.mode == "bsc" and not 0.0 <= self.ber <= 0.5:
            raise ValueError(f"bsc flip probability must be in [0, 0.5], got {self.ber}")
        if self.mode == "awgn" and not math.isfinite(self.snr_db):
            raise ValueError(f"snr_db must be finite, got {self.snr_db}")

    def flip_probability(self) -> float:
        if self.mode == "noiseless":
            return 0.0
        if self.mode == "bsc":
            return self.ber
        return snr_to_ber(self.snr_db)


def snr_to_ber(snr_db: float) -> float:
    """BPSK-over-AWGN bit error rate: 0.5 * erfc(sqrt(snr_linear))."""
    return 0.5 * math.erfc(math.sqrt(10.0 ** (snr_db / 10.0)))


def modulate(
    clean: Ampdu,
    tag: TagPayload,
    windows: list[ModulationWindow],
    spec: CrcSpec,
) -> BitVector:
    """Serialized aggregate with each tag-1 window's symbol bits inverted.

    A tag bit of 0 leaves its symbol untouched; 1 flips all of it. Windows
    must be one-per-MPDU and pairwise disjoint.
    """
    if len(windows) != len(tag.bits):
        raise ValueError(
            f"{len(tag.bits)} tag bits scheduled over {len(windows)} windows"
        )
    seen = set()
    for w in windows:
        if w.mpdu_index in seen:
            raise ValueError(
                f"mpdu {w.mpdu_index} carries more than one window; one "
                "checksum per MPDU supports a single tag bit"
            )
        seen.add(w.mpdu_index)
    bits = serialize_bits(clean, spec)
    layout = ampdu_layout(clean, spec)
    for bit, w in zip(tag.bits, windows):
        if bit:
            start = layout[w.mpdu_index].mpdu_start + w.mod_start
            bits = bits.flip_range(start, start + w.mod_len)
    return bits


def apply_channel(bits: BitVector, cfg: ChannelConfig) -> BitVector:
    """Flip each bit independently with the configured probability."""
    p = cfg.flip_probability()
    if p == 0.0 or len(bits) == 0:
        return bits
    rng = np.random.default_rng(cfg.seed)
    flips = rng.random(len(bits)) < p
    mask = int.from_bytes(np.packbits(flips).tobytes(), "big")
    # packbits pads the tail to a byte boundary; drop the pad bits.
    pad = -len(bits) % 8
    return bits ^ BitVector(mask >> pad, len(bits))
