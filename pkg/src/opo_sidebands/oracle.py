"""Independent cross-checks of the main pipeline.

None of these reuse the code path they check: gains are integrated with a
fixed-step Runge-Kutta scheme instead of exponentiated, the empty cavity is
compared against the closed-form Fabry-Perot reflection, and the covariance
is recomputed entirely in the symmetric/antisymmetric basis.
"""

from dataclasses import dataclass

import numpy as np

from .cavity import mirror_set, phase_matrix, propagator, scattering_from_pass
from .covariance import N_OPTICAL_QUADRATURES, output_covariance, propagate, sa_rotation, to_quadratures
from .numerics import as_matrix, direct_sum, expm
from .phonon import N_PHONON_SLOTS, optomech_blocks, thermal_input_covariance
from .sideband import SA, drift_matrix_sa, lambda_transform
from .steady_state import mean_fields


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_abs_error: float
    tolerance: float
    detail: str = ""
    gating: bool = True

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_error <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "max_abs_error": float(self.max_abs_error),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
            "gating": self.gating,
            "detail": self.detail,
        }


def rk4_gain(m, steps: int = 10_000) -> np.ndarray:
    """Propagate ``dA/dxi = M A`` from ``A(0) = 1`` to ``xi = 1`` with classical RK4."""
    if steps < 1000:
        raise ValueError("rk4_gain needs at least 1000 steps")
    return _rk4(as_matrix(m), steps)


def _rk4(m, steps):
    h = 1.0 / steps
    a = np.eye(m.shape[0], dtype=complex)
    for _ in range(steps):
        k1 = m @ a
        k2 = m @ (a + 0.5 * h * k1)
        k3 = m @ (a + 0.5 * h * k2)
        k4 = m @ (a + h * k3)
        a = a + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return a


def scalar_fabry_perot(gamma, gamma_prime, phi_oneway):
    """Amplitude reflection of an empty two-mirror cavity seen from the coupling mirror.

    ``r - t**2 r' exp(-2i phi) / (1 - r r' exp(-2i phi))``, written with
    ``expm1`` so that high-finesse cavities keep full precision.
    """
    gamma = np.asarray(gamma, dtype=float)
    gamma_prime = np.asarray(gamma_prime, dtype=float)
    phi = np.asarray(phi_oneway, dtype=float)
    r = np.exp(-gamma)
    t2 = -np.expm1(-2 * gamma)
    loop = -(gamma + gamma_prime) - 2j * phi
    return r - t2 * np.exp(loop + gamma) / -np.expm1(loop)


def rk4_check(m, steps=10_000, tol=1e-8, name="rk4-vs-expm") -> OracleReport:
    err = np.max(np.abs(rk4_gain(m, steps) - expm(m)))
    return OracleReport(name, float(err), tol, f"{as_matrix(m).shape[0]}x{as_matrix(m).shape[0]} drift, {steps} steps")


def fabry_perot_check(cfg, tol=1e-12) -> OracleReport:
    """Diagonal of the empty-cavity reflection matrix versus the scalar formula."""
    losses = cfg.losses()
    op = cfg.operating_point()
    phase = phase_matrix(op)
    mirrors = mirror_set(losses, cfg.mirror_transmission_scale)
    refl, _ = scattering_from_pass(mirrors, propagator(phase))
    g = np.tile(np.repeat(losses.gamma, 2), 2)
    gp = np.tile(np.repeat(losses.gamma_prime, 2), 2)
    expected = scalar_fabry_perot(g, gp, np.diag(phase))
    off = refl - np.diag(np.diag(refl))
    err = max(np.max(np.abs(np.diag(refl) - expected)), np.max(np.abs(off)))
    return OracleReport("scalar-fabry-perot", float(err), tol, "chi = 0, per slot")


def sa_route_covariance(cfg, phonons=None, symmetric_sidebands=False) -> np.ndarray:
    """Output covariance in the S/A basis, computed without leaving that basis.

    The gain is the direct sum of the S and A gains (extended by the rotated
    phonon couplings) and the sideband phases enter as the non-diagonal
    matrix ``Lambda exp(-i phi) Lambda``.
    """
    phonons = cfg.phonons_enabled if phonons is None else phonons
    losses = cfg.losses()
    op = cfg.operating_point()
    mf = mean_fields(op, losses)
    mirrors = mirror_set(losses, cfg.mirror_transmission_scale)
    lam = lambda_transform()
    drift = direct_sum(drift_matrix_sa(SA.S, mf), drift_matrix_sa(SA.A, mf))
    rotated_phase = lam @ propagator(phase_matrix(op, symmetric_sidebands)) @ lam
    if phonons:
        pp = cfg.phonon_params()
        J, K = optomech_blocks(pp, mf)
        zero = np.zeros((N_PHONON_SLOTS, N_PHONON_SLOTS))
        drift = np.block([[drift, 1j * lam @ J], [1j * K @ lam, zero]])
        rotated_phase = direct_sum(rotated_phase, np.eye(N_PHONON_SLOTS))
        mirrors = mirrors.lifted(N_PHONON_SLOTS)
        port = thermal_input_covariance(pp)
        v_port = port[: port.shape[0] // 2, : port.shape[0] // 2]
    else:
        v_port = np.eye(N_OPTICAL_QUADRATURES)
    refl, trans = scattering_from_pass(mirrors, rotated_phase @ expm(drift))
    v = propagate(to_quadratures(refl), to_quadratures(trans), v_port, v_port)
    v = v[:N_OPTICAL_QUADRATURES, :N_OPTICAL_QUADRATURES]
    return 0.5 * (v + v.T)


def dual_basis_check(cfg, phonons=None, tol=1e-10) -> OracleReport:
    phonons = cfg.phonons_enabled if phonons is None else phonons
    lam = sa_rotation()
    freq = lam @ output_covariance(cfg, phonons=phonons, detection=False).matrix @ lam
    sa = sa_route_covariance(cfg, phonons=phonons)
    err = np.max(np.abs(freq - sa))
    return OracleReport(f"dual-basis ({'phonons' if phonons else 'no phonons'})", float(err), tol)
