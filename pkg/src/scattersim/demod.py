"""Single-receiver demodulation of ambient and tag data from one bitstream.

Per MPDU: step the register forward over the bits before the recovery
window, rewind it from the checksum trailer over the bits after, and solve
the bracketed window exactly with the inverse generator matrix. XOR of the
recovered block with the received window isolates the tag's flip pattern,
and a majority vote over the window decides the tag bit.

A brute-force demodulator (enumerate every tag candidate, un-flip, verify
each MPDU's checksum) serves as the independent cross-check; it is
exponential in the tag bit count where the bracketing path is linear.
"""
from __future__ import annotations

from dataclasses import dataclass

from .crc import (
    CrcSpec,
    _forward_int,
    crc_forward,
    generator_matrix,
    recover_block,
    state_transition,
    state_transition_inverse,
)
from .frames import (
    DEFAULT_HEADER_LEN,
    ModulationWindow,
    SubframeLayout,
    SymbolMap,
    WindowPolicy,
    ampdu_layout,
    bits_to_bytes,
    locate_windows,
    parse_ampdu,
)
from .gf2 import BitVector

DEFAULT_BRUTE_CAP = 20


class UndecodableError(ValueError):
    """Brute-force search found no tag candidate passing every checksum."""


class CrcCollisionError(ValueError):
    """Brute-force search found multiple candidates passing every checksum."""


@dataclass(frozen=True)
class WindowRecord:
    """Decoding outcome for one modulation window."""

    mpdu_index: int
    recovered_ambient: BitVector
    tag_pattern: BitVector
    ones_count: int
    tag_bit: int
    margin: int
    ambient_ok: bool


@dataclass(frozen=True)
class DemodResult:
    records: tuple[WindowRecord, ...]
    tag_bits: BitVector


def bracket_registers(
    spec: CrcSpec,
    mpdu_bits: BitVector,
    fcs_bits: BitVector,
    window: ModulationWindow,
) -> tuple[BitVector, BitVector]:
    """Register states immediately before and after the recovery window.

    The front register is the prefix's forward evolution from the init
    state; the back register rewinds over the suffix from the raw final
    register, which is the received trailer stripped of its final XOR.
    Both are evaluated through the affine split (cached zero-input power
    matrices plus prefix/suffix times their generator matrices), which is
    exactly equivalent to bit-serial stepping and much faster per MPDU.
    """
    rec = window.recovery_range
    prefix = mpdu_bits[: rec.start]
    suffix = mpdu_bits[rec.stop :]
    front = state_transition(spec, spec.init_state(), len(prefix))
    if len(prefix):
        front = front ^ (prefix @ generator_matrix(spec, len(prefix)))
    back = fcs_bits ^ spec.final_vector()
    if len(suffix):
        back = state_transition_inverse(
            spec, back ^ (suffix @ generator_matrix(spec, len(suffix))), len(suffix)
        )
    return front, back


def _vote(spec: CrcSpec, pattern: BitVector) -> tuple[int, int, int]:
    ones = pattern.popcount()
    half = spec.width // 2
    tag_bit = 1 if ones > half else 0
    return ones, tag_bit, abs(ones - half)


def demodulate_mpdu(
    spec: CrcSpec, received_mpdu_bits: BitVector, window: ModulationWindow
) -> WindowRecord:
    """Decode one MPDU's window from its full received bits (trailer included).

    Noisy input yields a low-margin record, never an exception; the
    ambient_ok flag reports whether un-flipping the decoded tag bit makes
    the received frame's checksum verify.
    """
    width = spec.width
    content = received_mpdu_bits[: len(received_mpdu_bits) - width]
    fcs_field = received_mpdu_bits[len(received_mpdu_bits) - width :]
    front, back = bracket_registers(spec, content, fcs_field, window)
    recovered = recover_block(spec, front, back)
    rec = window.recovery_range
    received_window = content[rec.start : rec.stop]
    pattern = recovered ^ received_window
    ones, tag_bit, margin = _vote(spec, pattern)
    # Un-flipping the decoded tag bit must make the frame checksum verify;
    # prefix and suffix contributions are already folded into the brackets,
    # so only the window span needs stepping.
    candidate = (
        received_window.flip_range(0, window.mod_len) if tag_bit else received_window
    )
    ambient_ok = crc_forward(spec, front, candidate) == back
    return WindowRecord(
        mpdu_index=window.mpdu_index,
        recovered_ambient=recovered,
        tag_pattern=pattern,
        ones_count=ones,
        tag_bit=tag_bit,
        margin=margin,
        ambient_ok=ambient_ok,
    )


def _resolve_layout(
    spec: CrcSpec,
    received: BitVector,
    layout: list[SubframeLayout] | None,
    header_len: int,
) -> list[SubframeLayout]:
    if layout is not None:
        return layout
    parsed = parse_ampdu(bits_to_bytes(received, spec), spec, header_len)
    return ampdu_layout(parsed, spec)


def demodulate_ampdu(
    spec: CrcSpec,
    received: BitVector,
    windows: list[ModulationWindow],
    layout: list[SubframeLayout] | None = None,
    header_len: int = DEFAULT_HEADER_LEN,
) -> DemodResult:
    """Decode every window independently using its MPDU's own checksum.

    ``layout`` is the receiver's known frame schedule; without it the
    framing is parsed from the received bytes, which a corrupted delimiter
    can break (FrameParseError names the subframe).
    """
    layout = _resolve_layout(spec, received, layout, header_len)
    records = []
    tag_value = 0
    for w in windows:
        sf = layout[w.mpdu_index]
        record = demodulate_mpdu(spec, received[sf.mpdu_start : sf.mpdu_end], w)
        records.append(record)
        tag_value = (tag_value << 1) | record.tag_bit
    return DemodResult(tuple(records), BitVector(tag_value, len(windows)))


def demodulate_blind(
    spec: CrcSpec,
    received: BitVector,
    symbol_map: SymbolMap = SymbolMap(),
    policy: WindowPolicy = WindowPolicy(),
    header_len: int = DEFAULT_HEADER_LEN,
) -> DemodResult:
    """Parse framing from the received bytes and decode one window per MPDU."""
    parsed = parse_ampdu(bits_to_bytes(received, spec), spec, header_len)
    windows = locate_windows(parsed, spec, symbol_map, policy)
    return demodulate_ampdu(spec, received, windows, ampdu_layout(parsed, spec))


def _candidate_passes(
    spec: CrcSpec,
    front: int,
    window_bits: int,
    n_bits: int,
    back: int,
) -> bool:
    """Checksum verdict for one MPDU under one candidate window content.

    Equivalent to recomputing the frame's checksum with the candidate
    window spliced in: prefix and suffix contributions are candidate
    independent, so only the window span needs bit-serial stepping.
    """
    return _forward_int(spec.width, spec.poly, front, window_bits, n_bits) == back


def brute_force_demodulate(
    spec: CrcSpec,
    received: BitVector,
    windows: list[ModulationWindow],
    layout: list[SubframeLayout] | None = None,
    header_len: int = DEFAULT_HEADER_LEN,
    cap: int = DEFAULT_BRUTE_CAP,
) -> DemodResult:
    """Try all 2^n tag candidates; keep the one passing every checksum.

    Raises UndecodableError when nothing passes and CrcCollisionError when
    several candidates do (surfaced, never silently picked).
    """
    n = len(windows)
    if n > cap:
        raise ValueError(f"{n} tag bits exceeds brute-force cap {cap}")
    layout = _resolve_layout(spec, received, layout, header_len)
    width = spec.width

    brackets = []
    for w in windows:
        sf = layout[w.mpdu_index]
        mpdu_bits = received[sf.mpdu_start : sf.mpdu_end]
        content = mpdu_bits[: len(mpdu_bits) - width]
        fcs_field = mpdu_bits[len(mpdu_bits) - width :]
        front, back = bracket_registers(spec, content, fcs_field, w)
        rec = w.recovery_range
        window_bits = content[rec.start : rec.stop]
        flipped = window_bits.flip_range(0, w.mod_len)
        brackets.append((front, back, (window_bits, flipped)))
    packed = [
        (front.value, back.value, (variants[0].value, variants[1].value), width)
        for front, back, variants in brackets
    ]

    survivors = []
    for candidate in range(1 << n):
        ok = True
        for k in range(n):
            front, back, variants, nb = packed[k]
            bit = (candidate >> (n - 1 - k)) & 1
            if not _candidate_passes(spec, front, variants[bit], nb, back):
                ok = False
                break
        if ok:
            survivors.append(candidate)
    if not survivors:
        raise UndecodableError(
            f"no tag candidate among 2^{n} passes all checksums"
        )
    if len(survivors) > 1:
        raise CrcCollisionError(
            f"{len(survivors)} tag candidates pass all checksums"
        )
    winner = survivors[0]
    records = []
    for k, w in enumerate(windows):
        front, back, variants = brackets[k]
        bit = (winner >> (n - 1 - k)) & 1
        ambient = variants[bit]
        pattern = ambient ^ variants[0]
        ones, tag_bit, margin = _vote(spec, pattern)
        records.append(
            WindowRecord(
                mpdu_index=w.mpdu_index,
                recovered_ambient=ambient,
                tag_pattern=pattern,
                ones_count=ones,
                tag_bit=tag_bit,
                margin=margin,
                ambient_ok=True,
            )
        )
    return DemodResult(tuple(records), BitVector(winner, n))
