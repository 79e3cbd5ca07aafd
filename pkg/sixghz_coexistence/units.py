"""
Unit conversions.

Scenario files speak engineering units (dBm, MHz, per-km², dB); everything past
``scenario_io`` is SI-linear.
"""

import math

M2_PER_KM2 = 1e6
HZ_PER_MHZ = 1e6
BPS_PER_MBPS = 1e6

THERMAL_NOISE_DBM_PER_HZ = -174.0


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError(f"Cannot express non-positive value {value} in dB")
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def watts_to_dbm(value_w: float) -> float:
    if value_w <= 0:
        raise ValueError(f"Cannot express non-positive power {value_w} W in dBm")
    return 10.0 * math.log10(value_w) + 30.0


def per_km2_to_per_m2(value: float) -> float:
    return value / M2_PER_KM2


def per_m2_to_per_km2(value: float) -> float:
    return value * M2_PER_KM2


def mhz_to_hz(value: float) -> float:
    return value * HZ_PER_MHZ


def mbps_to_bps(value: float) -> float:
    return value * BPS_PER_MBPS


def bps_to_mbps(value: float) -> float:
    return value / BPS_PER_MBPS


def thermal_noise(bandwidth_hz: float, noise_figure_db: float = 10.0) -> float:
    """
    Receiver noise power over a bandwidth.

    Args:
        bandwidth_hz: Operating bandwidth in Hz
        noise_figure_db: Receiver noise figure in dB

    Returns:
        float: Noise power in W (-174 dBm/Hz + 10 log10(B) + NF)
    """
    if bandwidth_hz <= 0:
        raise ValueError(f"Bandwidth must be positive, got {bandwidth_hz}")
    noise_dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return dbm_to_watts(noise_dbm)


def parse_db_range(text: str):
    """
    Parse a ``start:stop:step`` range in dB, stop inclusive.

    ``"-10:20:1"`` gives the 31 values -10, -9, ..., 20.
    """
    parts = text.split(":")
    if len(parts) not in (1, 3):
        raise ValueError(f"Range must look like start:stop:step, got '{text}'")
    if len(parts) == 1:
        return [float(parts[0])]
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"Range step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"Range stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]
