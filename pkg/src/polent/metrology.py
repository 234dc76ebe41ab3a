"""dB / dBm arithmetic linking spectrum-analyzer traces to shot-noise-normalised variances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CorrectionUndefinedError, DomainError, InvalidArgumentError


def lin_to_db(v):
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise DomainError("dB conversion needs a positive ratio")
    out = 10.0 * np.log10(v)
    return float(out) if out.ndim == 0 else out


def db_to_lin(d):
    out = 10.0 ** (np.asarray(d, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def dbm_to_mw(p_dbm: float) -> float:
    return 0.0 if p_dbm == -np.inf else float(10.0 ** (p_dbm / 10.0))


@dataclass(frozen=True)
class PowerReading:
    """Spectrum-analyzer reading. Bandwidths and frequency are metadata only."""

    value: float  # dBm
    rbw: float = 300e3
    vbw: float = 30.0
    frequency: float = 17.5e6

    def __post_init__(self):
        if not (self.rbw > 0 and self.vbw > 0):
            raise InvalidArgumentError("RBW and VBW must be positive")

    @property
    def mw(self) -> float:
        return dbm_to_mw(self.value)


@dataclass(frozen=True)
class CalibratedTrace:
    signal: PowerReading
    shot_reference: PowerReading
    electronic_floor: PowerReading


def subtract_electronic_noise(trace: CalibratedTrace, correct_shot: bool = True) -> float:
    """(P_sig - P_el) / (P_shot - P_el) in linear power.

    With ``correct_shot=False`` only the signal is floor-corrected. A floor of
    -inf dBm disables the correction.
    """
    floor = trace.electronic_floor.value
    for name, reading in (("signal", trace.signal), ("shot reference", trace.shot_reference)):
        if reading.value <= floor:
            raise CorrectionUndefinedError(
                f"{name} at {reading.value:.2f} dBm is not above the electronic floor {floor:.2f} dBm")
    p_el = trace.electronic_floor.mw
    sig = trace.signal.mw - p_el
    shot = trace.shot_reference.mw - (p_el if correct_shot else 0.0)
    return sig / shot


def error_bar_propagation(v: float, sigma_db: float) -> tuple[float, float]:
    """Linear interval for a value quoted with a symmetric dB uncertainty."""
    if sigma_db < 0:
        raise InvalidArgumentError("dB uncertainty must be non-negative")
    return v * 10 ** (-sigma_db / 10), v * 10 ** (sigma_db / 10)


def format_dbm(p_dbm: float) -> str:
    return f"{p_dbm:.2f}"
