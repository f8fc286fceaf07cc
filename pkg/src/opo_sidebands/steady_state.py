"""Operating point to intracavity mean fields.

All amplitudes are carried as products ``chi * alpha`` and are scaled to the
oscillation threshold, so the nonlinearity itself never has to be known.
"""

from dataclasses import dataclass

import numpy as np

from .sideband import N_OPTICAL, MeanFields


class DegenerateCavityError(ValueError):
    """A downconverted mode has zero total loss (infinite finesse)."""


def _triple(values, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (N_OPTICAL,):
        raise ValueError(f"{name} needs {N_OPTICAL} entries, got {arr.shape[0]}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class CavityLosses:
    """Amplitude loss parameters of the coupling mirror (``gamma``) and end mirror.

    The mirror amplitude reflectivities are ``exp(-gamma)`` and
    ``exp(-gamma_prime)``.
    """

    gamma: tuple
    gamma_prime: tuple

    def __post_init__(self):
        g = _triple(self.gamma, "gamma")
        gp = _triple(self.gamma_prime, "gamma_prime")
        if min(g) < 0 or min(gp) < 0:
            raise ValueError("loss parameters must be non-negative")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "gamma_prime", gp)

    @classmethod
    def from_reflectivities(cls, coupler, end_mirror):
        """Build from intensity reflectivities via ``gamma = -ln sqrt(R)``."""
        coupler = np.asarray(coupler, dtype=float)
        end_mirror = np.asarray(end_mirror, dtype=float)
        for arr in (coupler, end_mirror):
            if np.any(arr <= 0) or np.any(arr > 1):
                raise ValueError("intensity reflectivities must lie in (0, 1]")
        return cls(tuple(-0.5 * np.log(coupler)), tuple(-0.5 * np.log(end_mirror)))

    @property
    def total(self):
        return tuple(g + gp for g, gp in zip(self.gamma, self.gamma_prime))


@dataclass(frozen=True)
class OperatingPoint:
    """Pump ratio, analysis frequency and per-mode detunings / free spectral ranges.

    ``analysis_frequency_hz`` is Omega/2pi, ``detuning`` is in rad/s and
    ``fsr_hz`` in Hz.
    """

    sigma: float
    analysis_frequency_hz: float
    detuning: tuple = (0.0, 0.0, 0.0)
    fsr_hz: tuple = (4.3e9, 4.3e9, 4.3e9)

    def __post_init__(self):
        fsr = _triple(self.fsr_hz, "fsr_hz")
        object.__setattr__(self, "detuning", _triple(self.detuning, "detuning"))
        object.__setattr__(self, "fsr_hz", fsr)
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")
        if min(fsr) <= 0:
            raise ValueError("free spectral ranges must be positive")
        if abs(self.analysis_frequency_hz) >= min(fsr):
            raise ValueError("analysis frequency must stay below one free spectral range")


def threshold_strength(losses: CavityLosses) -> float:
    """Input pump intensity at threshold, ``chi**2 |alpha_in|**2_th``."""
    g0 = losses.gamma[0]
    gt0, gt1, gt2 = losses.total
    if gt1 == 0 or gt2 == 0:
        raise DegenerateCavityError("signal and idler need non-zero total loss")
    if g0 == 0:
        raise DegenerateCavityError("pump coupling mirror must transmit (gamma_0 > 0)")
    return (
        (1 - np.exp(-gt0)) ** 2
        * np.expm1(gt1)
        * np.expm1(gt2)
        / (4 * (1 - np.exp(-2 * g0)))
    )


def clamped_pump_intensity(losses: CavityLosses) -> float:
    """``chi**2 |alpha_0|**2`` at and above threshold."""
    g0 = losses.gamma[0]
    gt0 = losses.total[0]
    return (1 - np.exp(-2 * g0)) / (1 - np.exp(-gt0)) ** 2 * threshold_strength(losses)


def downconverted_intensity(losses: CavityLosses, sigma: float, j: int) -> float:
    """``chi**2 |alpha_j|**2`` for signal (j=1) or idler (j=2); zero at and below threshold."""
    if j not in (1, 2):
        raise ValueError("j must be 1 (signal) or 2 (idler)")
    if sigma <= 1:
        return 0.0
    g0 = losses.gamma[0]
    gt0 = losses.total[0]
    gtj = losses.total[j]
    return (
        np.exp(2 * gt0)
        * (1 - np.exp(-2 * g0))
        * (np.sqrt(sigma) - 1)
        / (np.expm1(gt0) * np.expm1(gtj))
        * threshold_strength(losses)
    )


def mean_fields(op: OperatingPoint, losses: CavityLosses) -> MeanFields:
    """Real, non-negative mean fields at exact resonance.

    Above threshold the pump is clamped and signal/idler grow as
    ``sqrt(sigma) - 1``. Below threshold signal and idler vanish and the pump
    intensity is the clamped value scaled by ``sigma``.
    """
    pump = clamped_pump_intensity(losses)
    if op.sigma < 1:
        return MeanFields(np.sqrt(op.sigma * pump), 0.0, 0.0)
    return MeanFields(
        np.sqrt(pump),
        np.sqrt(downconverted_intensity(losses, op.sigma, 1)),
        np.sqrt(downconverted_intensity(losses, op.sigma, 2)),
    )
