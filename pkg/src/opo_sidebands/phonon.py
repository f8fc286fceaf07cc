"""Phonon reservoirs of the crystal.

Three mechanical modes ``d1, d2, d3`` are appended after the twelve optical
slots as ``(d1, d1+, d2, d2+, d3, d3+)``. Each carrier ``n`` couples to each
mechanical mode ``j`` through its linearized radiation-pressure term: the
upper sideband exchanges a quantum with ``d_j`` and the lower sideband is
created together with a phonon.

Couplings are dimensionless. Under the default ``"effective"`` convention a
quoted ``g[n][j]`` is the whole product of bare coupling and carrier amplitude
at the operating point, so the drift uses ``g[n][j] * exp(i arg alpha_n)``
(a vanishing carrier keeps phase 0). This is how fitted coupling values are
meant to be used. The ``"chi_scaled"`` convention instead reads ``g`` as the
bare coupling divided by chi and uses ``g[n][j] * (chi * alpha_n)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .cavity import MirrorSet, scattering
from .numerics import as_matrix, direct_sum, expm
from .sideband import N_OPTICAL, MeanFields, ModeLayout, drift_matrix_full

N_MECHANICAL = 3
N_PHONON_SLOTS = 2 * N_MECHANICAL
N_EXTENDED_SLOTS = 4 * N_OPTICAL + N_PHONON_SLOTS
CONVENTIONS = ("effective", "chi_scaled")


@dataclass(frozen=True)
class PhononParams:
    """Coupling table ``g[n][j]`` (carrier n, mechanical mode j) and thermal occupation."""

    g: np.ndarray = field(default_factory=lambda: np.zeros((N_OPTICAL, N_MECHANICAL)))
    n_th: float = 0.0
    convention: str = "effective"

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.shape != (N_OPTICAL, N_MECHANICAL):
            raise ValueError(f"g must be {N_OPTICAL}x{N_MECHANICAL}, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("couplings must be finite")
        if not self.n_th >= 0:
            raise ValueError("n_th must be >= 0")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def reference(cls, n_th=100.0, convention="effective"):
        """Two-reservoir fit: pump and idler share reservoir 1, signal also sees reservoir 2."""
        g = np.zeros((N_OPTICAL, N_MECHANICAL))
        g[0, 0] = 8.0e-3
        g[2, 0] = 3.6e-3
        g[1, 0] = 1.9e-3
        g[1, 1] = 2.7e-3
        return cls(g, n_th, convention)

    @property
    def enabled(self) -> bool:
        return bool(np.any(self.g != 0))

    def carrier_factors(self, mf: MeanFields):
        """Per-carrier factor multiplying ``g[n][j]`` in the drift."""
        if self.convention == "chi_scaled":
            return mf.as_tuple()
        return tuple(a / abs(a) if a != 0 else 1.0 + 0j for a in mf.as_tuple())


def extended_labels():
    phonons = []
    for j in range(1, N_MECHANICAL + 1):
        phonons += [f"d{j}", f"d{j}^dag"]
    return ModeLayout().labels() + phonons


def optomech_blocks(pp: PhononParams, mf: MeanFields):
    """Return ``(J_g, K_g)``, the 12x6 and 6x12 light-phonon coupling blocks."""
    L = np.zeros((2 * N_OPTICAL, N_PHONON_SLOTS), dtype=complex)
    Lp = np.zeros_like(L)
    for n, alpha in enumerate(pp.carrier_factors(mf)):
        for j in range(N_MECHANICAL):
            g = pp.g[n, j]
            rows, cols = slice(2 * n, 2 * n + 2), slice(2 * j, 2 * j + 2)
            L[rows, cols] = g * np.array([[alpha, 0], [0, -np.conj(alpha)]])
            Lp[rows, cols] = g * np.array([[0, alpha], [-np.conj(alpha), 0]])
    J = np.vstack([L, Lp])
    K = np.hstack([L.conj().T, -Lp.conj().T])
    return J, K


def extended_drift(mf: MeanFields, pp: PhononParams) -> np.ndarray:
    """18x18 drift ``[[M_chi, i J_g], [i K_g, 0]]``."""
    J, K = optomech_blocks(pp, mf)
    return np.block([[drift_matrix_full(mf), 1j * J], [1j * K, np.zeros((N_PHONON_SLOTS, N_PHONON_SLOTS))]])


def extended_gain(mf: MeanFields, pp: PhononParams) -> np.ndarray:
    return expm(extended_drift(mf, pp))


def lift_phase(phase) -> np.ndarray:
    """Phase matrix with zero phase on the phonon slots."""
    return direct_sum(as_matrix(phase), np.zeros((N_PHONON_SLOTS, N_PHONON_SLOTS))).real


def extended_scattering(mirrors: MirrorSet, phase, egain):
    """``(R_chi_g, T'_chi_g)`` for the 18-slot vector.

    ``mirrors`` and ``phase`` may be given in the 12-slot optical layout; they
    are lifted so that phonon slots see no reflection and unit transmission.
    """
    egain = as_matrix(egain)
    if mirrors.size != egain.shape[0]:
        mirrors = mirrors.lifted(egain.shape[0] - mirrors.size)
    phase = np.asarray(phase)
    if phase.shape[0] != egain.shape[0]:
        phase = lift_phase(phase)
    return scattering(mirrors, phase, egain)


def thermal_input_covariance(pp: PhononParams) -> np.ndarray:
    """36x36 quadrature covariance of the (input, loss) port pair.

    Optical quadratures are in vacuum and phonon quadratures thermal with
    variance ``1 + 2 n_th``.
    """
    port = np.diag(np.concatenate([np.ones(4 * N_OPTICAL), np.full(N_PHONON_SLOTS, 1 + 2 * pp.n_th)]))
    return direct_sum(port, port).real
