import pytest

from scattersim.power import (
    ACTIVE_RADIO_W,
    DEFAULT_PROFILES,
    PowerProfile,
    load_profiles,
    tag_power_ratio,
    total_power,
    transceiver_energy,
)


def sig3(x: float) -> float:
    from math import floor, log10

    return round(x, -int(floor(log10(abs(x)))) + 2)


class TestTotalPower:
    def test_bundled_totals(self):
        assert sig3(total_power(DEFAULT_PROFILES["helper-excitor"])) == 15.4
        assert sig3(total_power(DEFAULT_PROFILES["dual-receiver"])) == 10.8
        assert sig3(total_power(DEFAULT_PROFILES["single-receiver"])) == 5.40

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            PowerProfile("x", -1.0, 0.0, 0.0)


class TestTagPowerRatio:
    def test_active_vs_single_receiver_tag(self):
        ratio = tag_power_ratio(ACTIVE_RADIO_W, DEFAULT_PROFILES["single-receiver"].tag_w)
        assert ratio == pytest.approx(398.5, rel=1e-3)

    def test_active_vs_helper_tag(self):
        ratio = tag_power_ratio(ACTIVE_RADIO_W, DEFAULT_PROFILES["helper-excitor"].tag_w)
        assert ratio == pytest.approx(7448.3, rel=1e-3)

    def test_equal_inputs(self):
        assert tag_power_ratio(0.5, 0.5) == 1.0

    def test_zero_tag_power_rejected(self):
        with pytest.raises(ValueError, match="> 0"):
            tag_power_ratio(1.0, 0.0)


class TestTransceiverEnergy:
    def test_zero_bytes_zero_energy(self):
        out = transceiver_energy(0, 6.5e6, DEFAULT_PROFILES["single-receiver"])
        assert out == {"excitor": 0.0, "tag": 0.0, "receiver": 0.0}

    def test_ambient_excitor_costs_nothing(self):
        out = transceiver_energy(10_000, 6.5e6, DEFAULT_PROFILES["single-receiver"])
        assert out["excitor"] == 0.0
        assert out["receiver"] > 0

    def test_dual_receiver_double_overhead(self):
        single = transceiver_energy(4096, 6.5e6, DEFAULT_PROFILES["single-receiver"])
        dual = transceiver_energy(4096, 6.5e6, DEFAULT_PROFILES["dual-receiver"])
        assert dual["receiver"] == pytest.approx(2 * single["receiver"])

    def test_monotone_in_volume(self):
        p = DEFAULT_PROFILES["helper-excitor"]
        e1 = transceiver_energy(100, 1e6, p)
        e2 = transceiver_energy(200, 1e6, p)
        assert all(e2[k] >= e1[k] for k in e1)

    def test_bad_rate_rejected(self):
        with pytest.raises(ValueError, match="rate"):
            transceiver_energy(10, 0, DEFAULT_PROFILES["single-receiver"])


class TestLoadProfiles:
    def test_custom_file(self, tmp_path):
        path = tmp_path / "profiles.json"
        path.write_text(
            '{"lab": {"excitor_w": 1.0, "tag_w": 2e-6, "receiver_w": 3.0}}'
        )
        profiles = load_profiles(str(path))
        assert total_power(profiles["lab"]) == pytest.approx(4.000002)
