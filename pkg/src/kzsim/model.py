"""Two-qubit Ising model in a swept longitudinal field with a small
transverse field.

The Hamiltonian (coupling set to 1, energies in units of the coupling) is

    H = bx (sx1 + sx2) + bz (sz1 + sz2) + sz1 sz2.

At bx = 0 the triplet levels are 1 + 2 bz, -1 and 1 - 2 bz for |00>, the
symmetric Bell state |phi+> = (|01> + |10>)/sqrt(2) and |11>, so the ground
state changes character at bz = -1 and bz = +1.  A small bx opens avoided
crossings there.  H commutes with the qubit swap, so a state started in the
triplet sector never leaks into the singlet (|01> - |10>)/sqrt(2) and the
dynamics lives in the 3x3 triplet block.

Near bz = -1 the relevant physics reduces to a two-level system,
H_eff = (bz + 1) sz + sqrt(2) bx sx, whose gap 2 sqrt(2) bx at the crossing
sets the maximal relaxation time tau0 = 1/(2 sqrt(2) bx).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGround, GapClosed, InvalidParam
from .smallmat import SpectralData, hermitian_eig

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENT2 = np.eye(2, dtype=complex)

# computational basis order |00>, |01>, |10>, |11>, qubit 1 on the left
KET_00 = np.array([1, 0, 0, 0], dtype=complex)
KET_11 = np.array([0, 0, 0, 1], dtype=complex)
PHI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
PHI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

X1X2 = np.kron(SIGMA_X, IDENT2) + np.kron(IDENT2, SIGMA_X)
Z1Z2_SUM = np.kron(SIGMA_Z, IDENT2) + np.kron(IDENT2, SIGMA_Z)
ZZ = np.kron(SIGMA_Z, SIGMA_Z)

_PHASE_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Transverse field bx >= 0 and control field bz, both in coupling units."""

    bx: float
    bz: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bx) and math.isfinite(self.bz)):
            raise InvalidParam("fields must be finite")
        if self.bx < 0:
            raise InvalidParam(f"transverse field must be >= 0, got {self.bx}")


@dataclass(frozen=True)
class GroundState:
    """Instantaneous ground state over {|00>, |phi+>, |11>}.

    The amplitudes are real by the phase convention: c0 >= 0 whenever
    |c0| > 1e-12, otherwise cplus >= 0.
    """

    c0: float
    cplus: float
    c1: float
    energy: float

    def vector(self) -> np.ndarray:
        """Embedding into the 4-dimensional computational basis."""
        return self.c0 * KET_00 + self.cplus * PHI_PLUS + self.c1 * KET_11


def ising_hamiltonian(bz: float) -> np.ndarray:
    """Bare Ising Hamiltonian (bx = 0), a 4x4 diagonal matrix."""
    return driven_hamiltonian(ModelParams(bx=0.0, bz=bz))


def driven_hamiltonian(p: ModelParams) -> np.ndarray:
    """Full 4x4 Hamiltonian including the transverse field."""
    return p.bx * X1X2 + p.bz * Z1Z2_SUM + ZZ


def triplet_block(p: ModelParams) -> np.ndarray:
    """3x3 restriction to the swap-symmetric basis {|00>, |phi+>, |11>}."""
    s = math.sqrt(2) * p.bx
    return np.array(
        [
            [1 + 2 * p.bz, s, 0],
            [s, -1, s],
            [0, s, 1 - 2 * p.bz],
        ],
        dtype=complex,
    )


def effective_hamiltonian(p: ModelParams) -> np.ndarray:
    """Two-level reduction around the bz = -1 crossing."""
    return (p.bz + 1.0) * SIGMA_Z + math.sqrt(2) * p.bx * SIGMA_X


def triplet_spectrum(p: ModelParams, prev: np.ndarray | None = None) -> SpectralData:
    """Spectral data of the triplet block (ascending, orthonormal columns)."""
    return hermitian_eig(triplet_block(p), prev=prev)


def ground_state(p: ModelParams) -> GroundState:
    """Lowest triplet eigenstate with the fixed real phase convention."""
    sd = triplet_spectrum(p)
    if sd.gap < 1e-12:
        raise DegenerateGround(
            f"ground state degenerate at bx={p.bx}, bz={p.bz} (gap {sd.gap:.2e})"
        )
    vec = sd.eigenvectors[:, 0]
    ref = vec[0] if abs(vec[0]) > _PHASE_TOL else vec[1]
    vec = vec * (ref.conjugate() / abs(ref))
    c0, cplus, c1 = (float(x.real) for x in vec)
    return GroundState(c0=c0, cplus=cplus, c1=c1, energy=float(sd.eigenvalues[0]))


def ground_vector(p: ModelParams) -> np.ndarray:
    """Ground state as a normalized 4-component state vector."""
    return ground_state(p).vector()


def relaxation_time(p: ModelParams) -> float:
    """Inverse gap between the two lowest triplet levels."""
    sd = triplet_spectrum(p)
    if sd.gap <= 1e-14:
        raise GapClosed(f"gap closed at bx={p.bx}, bz={p.bz}")
    return 1.0 / sd.gap


def effective_relaxation_time(bx: float, bz: float) -> float:
    """Relaxation time of the two-level reduction, tau0 / sqrt(1 + eps^2)
    with eps = |bz + 1| / (sqrt(2) bx) and tau0 = 1 / (2 sqrt(2) bx)."""
    if bx <= 0:
        raise GapClosed("effective model needs bx > 0")
    eps = abs(bz + 1.0) / (math.sqrt(2) * bx)
    tau0 = 1.0 / (2.0 * math.sqrt(2) * bx)
    return tau0 / math.sqrt(1.0 + eps * eps)
