"""System power accounting for backscatter link architectures.

Profiles bundle rated device powers for the three roles (excitor, tag,
receiver). The defaults ship as an editable JSON resource using measured
commercial-device figures; substitute your own hardware numbers via
load_profiles().
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

# Active WiFi radio chip power in transmit mode, for tag comparisons.
ACTIVE_RADIO_W = 108e-3


@dataclass(frozen=True)
class PowerProfile:
    name: str
    excitor_w: float
    tag_w: float
    receiver_w: float

    def __post_init__(self):
        for field in ("excitor_w", "tag_w", "receiver_w"):
            if getattr(self, field) < 0:
                raise ValueError(f"{field} must be >= 0, got {getattr(self, field)}")


def total_power(profile: PowerProfile) -> float:
    """Whole-system draw: excitor + tag + receiver."""
    return profile.excitor_w + profile.tag_w + profile.receiver_w


def tag_power_ratio(active_w: float, tag_w: float) -> float:
    """How many times more power an active radio draws than a tag."""
    if tag_w <= 0:
        raise ValueError(f"tag power must be > 0, got {tag_w}")
    return active_w / tag_w


def transceiver_energy(
    n_bytes: int, rate_bps: float, profile: PowerProfile
) -> dict[str, float]:
    """Per-role energy in joules to move n_bytes at rate_bps.

    Energy = rated power x transmission time, with time = 8 * bytes / rate;
    roles are compared at equal rate and data volume.
    """
    if rate_bps <= 0:
        raise ValueError(f"rate must be > 0 bps, got {rate_bps}")
    if n_bytes < 0:
        raise ValueError(f"byte count must be >= 0, got {n_bytes}")
    seconds = 8 * n_bytes / rate_bps
    return {
        "excitor": profile.excitor_w * seconds,
        "tag": profile.tag_w * seconds,
        "receiver": profile.receiver_w * seconds,
    }


def _profiles_from_mapping(raw: dict) -> dict[str, PowerProfile]:
    out = {}
    for name, fields in raw.items():
        out[name] = PowerProfile(
            name=name,
            excitor_w=float(fields["excitor_w"]),
            tag_w=float(fields["tag_w"]),
            receiver_w=float(fields["receiver_w"]),
        )
    return out


def load_profiles(path: str | None = None) -> dict[str, PowerProfile]:
    """Load power profiles from a JSON file, or the bundled defaults."""
    if path is None:
        raw = json.loads(
            resources.files("scattersim.data")
            .joinpath("power_profiles.json")
            .read_text()
        )
    else:
        with open(path) as fh:
            raw = json.load(fh)
    return _profiles_from_mapping(raw)


DEFAULT_PROFILES = load_profiles()
