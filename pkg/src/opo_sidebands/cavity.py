"""Open linear cavity around the crystal.

A coupling mirror ``(r, t)`` faces the input/output port and an end mirror
``(r', t')`` couples the intracavity fields to vacuum through spurious losses.
The crystal is crossed once per direction, so a round trip applies
``exp(-i phi) G`` twice. Summing all round trips gives the loop resolvent

    D = (1 - R E R' E)^-1,  E = exp(-i phi) G

and the reflected output ``A_R = R_chi A_in + T'_chi A_nu`` with

    R_chi  = R - T E R' E D T
    T'_chi = T E [1 + R' E D R E] T'.

Every function here works for any slot count, so the phonon-extended
matrices go through the same code.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .numerics import SingularMatrixError, as_matrix, condition_number, solve
from .steady_state import CavityLosses, OperatingPoint

logger = logging.getLogger(__name__)


class OscillationBoundaryError(ArithmeticError):
    """The linearized loop gain reached unity; no steady state exists."""

    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(
            f"cavity loop matrix is singular (relative pivot {pivot:.3e}): "
            "operating point is at or beyond the oscillation boundary"
        )


@dataclass(frozen=True)
class MirrorSet:
    """Diagonal mirror matrices in the 12-slot frequency layout."""

    R: np.ndarray
    T: np.ndarray
    R_prime: np.ndarray
    T_prime: np.ndarray

    @property
    def size(self) -> int:
        return self.R.shape[0]

    def unitarity_defect(self) -> float:
        """Largest ``|r**2 + t**2 - 1|`` over both mirrors and all slots."""
        r, t = np.diag(self.R).real, np.diag(self.T).real
        rp, tp = np.diag(self.R_prime).real, np.diag(self.T_prime).real
        return float(max(np.max(np.abs(r**2 + t**2 - 1)), np.max(np.abs(rp**2 + tp**2 - 1))))

    def lifted(self, n_extra: int) -> "MirrorSet":
        """Append ``n_extra`` slots that no mirror reflects and every mirror transmits."""
        zeros, ones = np.zeros(n_extra), np.ones(n_extra)

        def ext(m, tail):
            return np.diag(np.concatenate([np.diag(m), tail])).astype(complex)

        return MirrorSet(ext(self.R, zeros), ext(self.T, ones), ext(self.R_prime, zeros), ext(self.T_prime, ones))


def _slot_diag(per_mode):
    # per-mode value repeated on (a, a^dag) and on both sidebands
    vals = np.repeat(np.asarray(per_mode, dtype=float), 2)
    return np.diag(np.concatenate([vals, vals])).astype(complex)


def mirror_set(losses: CavityLosses, transmission_scale: float = 1.0) -> MirrorSet:
    """Mirror matrices with ``r = exp(-gamma)`` and ``t = sqrt(1 - r**2)``.

    ``transmission_scale`` multiplies every ``t`` and exists only as a fault
    injection hook for validating the checks; leave it at 1.
    """
    r = np.exp(-np.asarray(losses.gamma))
    rp = np.exp(-np.asarray(losses.gamma_prime))
    t = np.sqrt(1 - r**2) * transmission_scale
    tp = np.sqrt(1 - rp**2) * transmission_scale
    return MirrorSet(_slot_diag(r), _slot_diag(t), _slot_diag(rp), _slot_diag(tp))


def sideband_phases(op: OperatingPoint, sign: int) -> np.ndarray:
    """One-way phases ``(Delta_n + sign * Omega) / (2 FSR_n)`` for the three carriers."""
    omega = 2 * np.pi * op.analysis_frequency_hz
    return (np.asarray(op.detuning) + sign * omega) / (2 * np.asarray(op.fsr_hz))


def phase_matrix(op: OperatingPoint, symmetric_sidebands: bool = False) -> np.ndarray:
    """12x12 real diagonal of one-way propagation phases.

    Creation slots carry the negated phase of their annihilation slot. With
    ``symmetric_sidebands`` the lower sideband is given the upper sideband's
    phase, which removes the only source of S/A mixing.
    """
    upper = sideband_phases(op, +1)
    lower = upper if symmetric_sidebands else sideband_phases(op, -1)

    def block(ph):
        return np.column_stack([ph, -ph]).reshape(-1)

    return np.diag(np.concatenate([block(upper), block(lower)]))


def propagator(phase) -> np.ndarray:
    """``exp(-i phi)`` of a diagonal phase matrix."""
    return np.diag(np.exp(-1j * np.diag(np.asarray(phase)))).astype(complex)


def _pass(phase, gain):
    return propagator(phase) @ as_matrix(gain)


def loop_matrix(mirrors: MirrorSet, phase, gain) -> np.ndarray:
    """``1 - R E R' E``, the inverse of the loop resolvent."""
    return _loop(mirrors, _pass(phase, gain))


def _loop(mirrors, e):
    return np.eye(mirrors.size, dtype=complex) - mirrors.R @ e @ mirrors.R_prime @ e


def _resolve(mirrors, e, rhs):
    loop = _loop(mirrors, e)
    try:
        x = solve(loop, rhs)
    except SingularMatrixError as exc:
        raise OscillationBoundaryError(exc.pivot) from exc
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("cavity loop condition number %.3e", condition_number(loop))
    return x


def cavity_loop(mirrors: MirrorSet, phase, gain) -> np.ndarray:
    """Loop resolvent ``D``, obtained by solving against the identity."""
    return _resolve(mirrors, _pass(phase, gain), np.eye(mirrors.size, dtype=complex))


def scattering_from_pass(mirrors: MirrorSet, e) -> tuple:
    """``(R_chi, T'_chi)`` for a general one-way pass matrix ``e``.

    ``D`` only ever appears multiplied from the right by ``T`` or by
    ``R e``, so both products come from a single two-block solve.
    """
    e = as_matrix(e)
    n = mirrors.size
    x = _resolve(mirrors, e, np.hstack([mirrors.T, mirrors.R @ e]))
    d_t, d_re = x[:, :n], x[:, n:]
    refl = mirrors.R - mirrors.T @ e @ mirrors.R_prime @ e @ d_t
    trans = mirrors.T @ e @ (np.eye(n) + mirrors.R_prime @ e @ d_re) @ mirrors.T_prime
    return refl, trans


def scattering(mirrors: MirrorSet, phase, gain):
    """Return ``(R_chi, T'_chi)`` for a diagonal phase matrix and a gain matrix."""
    return scattering_from_pass(mirrors, _pass(phase, gain))


def reflection_matrix(mirrors: MirrorSet, phase, gain) -> np.ndarray:
    return scattering(mirrors, phase, gain)[0]


def transmission_matrix(mirrors: MirrorSet, phase, gain) -> np.ndarray:
    return scattering(mirrors, phase, gain)[1]
