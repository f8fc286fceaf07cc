"""Crystal interaction for the six sideband modes.

Operator vectors are ordered by :class:`ModeLayout`. In the frequency basis
the twelve slots are the upper-sideband block followed by the lower-sideband
block, each holding ``(a0, a0+, a1, a1+, a2, a2+)`` for pump (0), signal (1)
and idler (2). In the symmetric/antisymmetric basis the six S operators come
first, then the six A operators, with the same inner order.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .numerics import direct_sum, expm

N_OPTICAL = 3
MODE_NAMES = ("pump", "signal", "idler")


class Basis(enum.Enum):
    FREQUENCY = "frequency"
    SYMMETRIC_ANTISYMMETRIC = "sa"


class SA(enum.Enum):
    S = +1
    A = -1


@dataclass(frozen=True)
class ModeLayout:
    """Index map of the 12 optical operator slots."""

    basis: Basis = Basis.FREQUENCY
    n_optical_modes: int = N_OPTICAL

    @property
    def size(self) -> int:
        return 4 * self.n_optical_modes

    def slot(self, mode: int, block: int, creation: bool = False) -> int:
        """Slot of ``mode`` in ``block``.

        ``block`` is 0 for the upper sideband (or S) and 1 for the lower
        sideband (or A). Annihilation operators sit on even slots.
        """
        if not 0 <= mode < self.n_optical_modes or block not in (0, 1):
            raise IndexError(f"no slot for mode={mode}, block={block}")
        return block * 2 * self.n_optical_modes + 2 * mode + int(creation)

    def label(self, index: int) -> str:
        half = 2 * self.n_optical_modes
        block, rem = divmod(index, half)
        mode, creation = divmod(rem, 2)
        if self.basis is Basis.FREQUENCY:
            tag = "+" if block == 0 else "-"
        else:
            tag = "s" if block == 0 else "a"
        return f"a{mode}{tag}" + ("^dag" if creation else "")

    def labels(self):
        return [self.label(i) for i in range(self.size)]


@dataclass(frozen=True)
class MeanFields:
    """Intracavity carrier amplitudes, each multiplied by the nonlinearity chi."""

    chi_alpha0: complex = 0.0
    chi_alpha1: complex = 0.0
    chi_alpha2: complex = 0.0

    def __post_init__(self):
        for name in ("chi_alpha0", "chi_alpha1", "chi_alpha2"):
            value = complex(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    def as_tuple(self):
        return (self.chi_alpha0, self.chi_alpha1, self.chi_alpha2)


def _as_sa(basis_sign) -> SA:
    if isinstance(basis_sign, str):
        return SA[basis_sign.upper()]
    return SA(basis_sign)


def drift_matrix_sa(basis_sign, mf: MeanFields) -> np.ndarray:
    """6x6 drift of ``(a0, a0+, a1, a1+, a2, a2+)`` for the S or A subspace.

    The pump is coupled to signal and idler by beam-splitter terms weighted
    by the complementary downconverted field; signal and idler are coupled to
    each other's creation operators by ``+chi*alpha0`` (S) or ``-chi*alpha0`` (A).
    """
    sign = _as_sa(basis_sign).value
    a0, a1, a2 = mf.as_tuple()
    c = np.conj
    return np.array(
        [
            [0, 0, -a2, 0, -a1, 0],
            [0, 0, 0, -c(a2), 0, -c(a1)],
            [c(a2), 0, 0, 0, 0, sign * a0],
            [0, a2, 0, 0, sign * c(a0), 0],
            [c(a1), 0, 0, sign * a0, 0, 0],
            [0, a1, sign * c(a0), 0, 0, 0],
        ],
        dtype=complex,
    )


def gain_matrix_sa(basis_sign, mf: MeanFields) -> np.ndarray:
    # mean fields are constant along the crystal, so the xi-integral of the drift is the drift
    return expm(drift_matrix_sa(basis_sign, mf))


def lambda_transform(n: int = 2 * N_OPTICAL) -> np.ndarray:
    """Real symmetric orthogonal map from (S block, A block) to (+, -) sidebands.

    It is its own inverse.
    """
    eye = np.eye(n)
    return np.block([[eye, eye], [eye, -eye]]).astype(complex) / np.sqrt(2.0)


def drift_matrix_full(mf: MeanFields) -> np.ndarray:
    """12x12 frequency-basis drift ``Lambda (M_s + M_a) Lambda``."""
    lam = lambda_transform()
    return lam @ direct_sum(drift_matrix_sa(SA.S, mf), drift_matrix_sa(SA.A, mf)) @ lam


def gain_matrix_full(mf: MeanFields) -> np.ndarray:
    """12x12 frequency-basis gain ``Lambda (G_s + G_a) Lambda``."""
    lam = lambda_transform()
    return lam @ direct_sum(gain_matrix_sa(SA.S, mf), gain_matrix_sa(SA.A, mf)) @ lam
