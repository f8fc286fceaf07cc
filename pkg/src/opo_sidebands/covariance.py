"""Quadrature covariance of the reflected sidebands.

Quadratures follow ``a = (p + i q) / 2`` so that ``[p, q] = 2i`` and the
vacuum has unit variance (shot-noise units). The quadrature vector
``X = N A`` keeps the slot order of the operator vector, with ``p`` on even
and ``q`` on odd indices.
"""

from dataclasses import dataclass

import numpy as np

from .cavity import mirror_set, phase_matrix, scattering
from .phonon import extended_gain, extended_scattering, thermal_input_covariance
from .sideband import N_OPTICAL, gain_matrix_full, lambda_transform
from .steady_state import mean_fields

N_OPTICAL_QUADRATURES = 4 * N_OPTICAL
SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-8
REALNESS_TOL = 1e-9

_PAIR = np.array([[1, 1], [-1j, 1j]])


class PhysicalityError(ArithmeticError):
    """A computed covariance violates the uncertainty principle beyond tolerance."""


def quadrature_map(n_slots: int = N_OPTICAL_QUADRATURES) -> np.ndarray:
    """Block-diagonal ``N`` sending each ``(a, a+)`` pair to ``(p, q)``."""
    if n_slots % 2:
        raise ValueError("slot count must be even")
    return np.kron(np.eye(n_slots // 2), _PAIR)


def to_quadratures(m) -> np.ndarray:
    """Real quadrature image ``N m N^-1`` of an operator-space map."""
    m = np.asarray(m)
    n_rows, n_cols = m.shape
    nq = quadrature_map(n_rows) @ m @ np.linalg.inv(quadrature_map(n_cols))
    imag = np.max(np.abs(nq.imag)) if nq.size else 0.0
    if imag > REALNESS_TOL * max(1.0, np.max(np.abs(nq.real))):
        raise PhysicalityError(f"quadrature map is not real (max |imag| = {imag:.2e})")
    return nq.real


def symplectic_form(n_quadratures: int) -> np.ndarray:
    return np.kron(np.eye(n_quadratures // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_labels(n_slots=N_OPTICAL_QUADRATURES, basis="frequency"):
    labels = []
    for k in range(n_slots // 2):
        if k < 2 * N_OPTICAL:
            block, mode = divmod(k, N_OPTICAL)
            if basis == "frequency":
                tag = "+" if block == 0 else "-"
            else:
                tag = "s" if block == 0 else "a"
            labels += [f"p{mode}{tag}", f"q{mode}{tag}"]
        else:
            j = k - 2 * N_OPTICAL + 1
            labels += [f"x_d{j}", f"y_d{j}"]
    return tuple(labels)


@dataclass(frozen=True)
class PhysicalityReport:
    min_eigenvalue: float
    symplectic_eigenvalues: np.ndarray
    purity: float

    def passed(self, tol=PHYSICALITY_TOL) -> bool:
        return self.min_eigenvalue >= -tol

    def to_dict(self):
        return {
            "min_eigenvalue": float(self.min_eigenvalue),
            "symplectic_eigenvalues": [float(x) for x in self.symplectic_eigenvalues],
            "purity": float(self.purity),
            "physical": self.passed(),
        }


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric quadrature covariance in shot-noise units."""

    matrix: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        v = np.asarray(self.matrix, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
            raise ValueError(f"covariance must be square with even dimension, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance has non-finite entries")
        scale = max(1.0, np.max(np.abs(v)))
        if np.max(np.abs(v - v.T)) > SYMMETRY_TOL * scale:
            raise ValueError("covariance is not symmetric")
        object.__setattr__(self, "matrix", 0.5 * (v + v.T))
        if self.labels is None:
            object.__setattr__(self, "labels", quadrature_labels(v.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def physicality(self) -> PhysicalityReport:
        return physicality_report(self.matrix)


@dataclass(frozen=True)
class SABlocks:
    """Covariance in the S/A basis: ``[[V_s, C_sa], [C_sa^T, V_a]]``."""

    V_s: np.ndarray
    V_a: np.ndarray
    C_sa: np.ndarray

    def assemble(self) -> np.ndarray:
        return np.block([[self.V_s, self.C_sa], [self.C_sa.T, self.V_a]])


def physicality_report(v) -> PhysicalityReport:
    """Uncertainty-principle diagnostics of a quadrature covariance.

    Returns the smallest eigenvalue of ``V + i Omega`` (non-negative for a
    physical state), the symplectic eigenvalues (all 1 for a pure state) and
    the purity ``1 / sqrt(det V)``.
    """
    v = np.asarray(v.matrix if isinstance(v, CovarianceMatrix) else v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise ValueError(f"expected a square even-dimensional matrix, got {v.shape}")
    if np.max(np.abs(v - v.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(v))):
        raise ValueError("covariance is not symmetric")
    omega = symplectic_form(v.shape[0])
    min_eig = np.linalg.eigvalsh(v + 1j * omega).min()
    nu = np.sort(np.abs(np.linalg.eigvals(1j * omega @ v)))[::2]
    sign, logdet = np.linalg.slogdet(v)
    purity = float(np.clip(np.exp(-0.5 * logdet), 0.0, 1.0)) if sign > 0 else 0.0
    return PhysicalityReport(float(min_eig), nu, purity)


def sa_rotation(n_quadratures: int = N_OPTICAL_QUADRATURES) -> np.ndarray:
    """Quadrature-space image of the S/A transform (real, self-inverse)."""
    return lambda_transform(n_quadratures // 2).real


def to_sa_blocks(v) -> SABlocks:
    """Split a 12x12 frequency-basis covariance into S, A and S/A-cross blocks."""
    v = np.asarray(v.matrix if isinstance(v, CovarianceMatrix) else v, dtype=float)
    if v.shape != (N_OPTICAL_QUADRATURES, N_OPTICAL_QUADRATURES):
        raise ValueError(f"expected a 12x12 covariance, got {v.shape}")
    lam = sa_rotation()
    w = lam @ v @ lam
    h = 2 * N_OPTICAL
    return SABlocks(w[:h, :h], w[h:, h:], w[:h, h:])


def apply_detection(v, eta):
    """Model detection efficiency ``eta[n]`` of each carrier as a beam splitter with vacuum.

    ``V -> S V S + (1 - S**2)`` with ``S`` the diagonal of ``sqrt(eta)`` over
    every quadrature of the carrier (both sidebands, or both S and A).
    """
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (N_OPTICAL,) or np.any(eta <= 0) or np.any(eta > 1):
        raise ValueError("detection efficiencies must be three values in (0, 1]")
    is_cov = isinstance(v, CovarianceMatrix)
    m = np.asarray(v.matrix if is_cov else v, dtype=float)
    if m.shape != (N_OPTICAL_QUADRATURES, N_OPTICAL_QUADRATURES):
        raise ValueError(f"expected a 12x12 covariance, got {m.shape}")
    s = np.tile(np.repeat(np.sqrt(eta), 2), 2)
    out = s[:, None] * m * s[None, :] + np.diag(1 - s**2)
    return CovarianceMatrix(out, v.labels) if is_cov else out


def output_maps(cfg, phonons=None, symmetric_sidebands=False):
    """Quadrature-space input-output maps of the configured OPO.

    Returns ``(R, T, V_port)`` such that ``V_R = R V_port R^T + T V_port T^T``.
    With phonons the maps are 18-slot (36x36 would be the two ports together).
    """
    phonons = cfg.phonons_enabled if phonons is None else phonons
    losses = cfg.losses()
    op = cfg.operating_point()
    mf = mean_fields(op, losses)
    mirrors = mirror_set(losses, cfg.mirror_transmission_scale)
    phase = phase_matrix(op, symmetric_sidebands)
    if phonons:
        pp = cfg.phonon_params()
        refl, trans = extended_scattering(mirrors, phase, extended_gain(mf, pp))
        port = thermal_input_covariance(pp)
        n = port.shape[0] // 2
        v_port = port[:n, :n]
    else:
        refl, trans = scattering(mirrors, phase, gain_matrix_full(mf))
        v_port = np.eye(N_OPTICAL_QUADRATURES)
    return to_quadratures(refl), to_quadratures(trans), v_port


def propagate(refl, trans, v_in, v_nu) -> np.ndarray:
    return refl @ v_in @ refl.T + trans @ v_nu @ trans.T


def output_covariance(cfg, phonons=None, detection=None, symmetric_sidebands=False) -> CovarianceMatrix:
    """12x12 frequency-basis covariance of the reflected sidebands.

    With phonons the full 18-slot state is propagated and the phonon
    quadratures are dropped. Detection losses are applied last.

    Raises
    ------
    OscillationBoundaryError
        If the cavity loop is singular at this operating point.
    PhysicalityError
        If the result violates the uncertainty principle beyond tolerance.
    """
    detection = cfg.detection_enabled if detection is None else detection
    refl, trans, v_port = output_maps(cfg, phonons, symmetric_sidebands)
    v = propagate(refl, trans, v_port, v_port)[:N_OPTICAL_QUADRATURES, :N_OPTICAL_QUADRATURES]
    v = 0.5 * (v + v.T)
    if detection:
        v = apply_detection(v, cfg.detection_efficiency)
    report = physicality_report(v)
    if not report.passed():
        raise PhysicalityError(f"output covariance is unphysical (min eigenvalue {report.min_eigenvalue:.3e})")
    return CovarianceMatrix(v)


def sa_labels():
    return quadrature_labels(N_OPTICAL_QUADRATURES, basis="sa")
