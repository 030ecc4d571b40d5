"""Time evolution of the swept two-qubit system.

A scan drives bz(t) = b0 + k t across the bz = -1 critical point and records
observables at every segment boundary.  Two backends share the segment grid:

* ``reference`` integrates the continuously swept Hamiltonian by splitting
  every segment into substeps of at most 0.01 time units and applying the
  exact exponential of the Hamiltonian evaluated at the substep midpoint.
  Halving the substep moves final defect densities by well under 1e-4, which
  is how convergence to the continuous limit is demonstrated.
* ``trotter`` emulates the discretized experimental protocol: one split step
  per segment, with the field sampled at the segment's end point (segment m
  runs at bz_m = b0 + m * delta_b, matching the pulse-sequence offsets).

The trotter split applies the transverse rotation first and the longitudinal
plus coupling phases second within each segment, the same order in which the
pulse block and the free-evolution delay occur in the sequence.

Observables: defect density D = 1 - |<psi_g|psi>|^2, instantaneous
eigenpopulations, and two-qubit concurrence.  Transverse relaxation is
modelled as a per-qubit phase damping channel applied after each segment,
with decay exp(-dt/T2) over the physical segment duration dt = 2*delta/(pi*J).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .errors import ConfigInconsistent, InvalidT2
from .model import ModelParams, SIGMA_Y
from .smallmat import hermitian_eig, unitary_step

REFERENCE_SUBSTEP = 0.01
BACKENDS = ("reference", "trotter")

_RAMP_TOL = 1e-12
_YY = np.kron(SIGMA_Y, SIGMA_Y)
# qubit bit patterns of the computational basis |q1 q2>
_BITS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one scan.

    ``k`` is the scan rate, ``delta`` the segment duration and ``steps`` the
    number of segments, tied together by k * delta * steps = bz_end - b0.
    ``t2`` optionally holds the two transverse relaxation times in seconds,
    converted to per-segment decay using the coupling ``j_hz`` in Hz.
    """

    bx: float
    k: float
    delta: float
    steps: int
    b0: float = -1.5
    bz_end: float = -0.2
    backend: str = "reference"
    t2: tuple[float, float] | None = None
    j_hz: float = 215.0

    def __post_init__(self) -> None:
        if self.k <= 0 or not math.isfinite(self.k):
            raise ConfigInconsistent(f"scan rate must be positive, got {self.k}")
        if self.delta <= 0 or not math.isfinite(self.delta):
            raise ConfigInconsistent(f"segment duration must be positive, got {self.delta}")
        if self.steps < 0:
            raise ConfigInconsistent(f"segment count must be >= 0, got {self.steps}")
        if self.backend not in BACKENDS:
            raise ConfigInconsistent(f"unknown backend {self.backend!r}")
        span = self.bz_end - self.b0
        if abs(self.k * self.delta * self.steps - span) > _RAMP_TOL:
            raise ConfigInconsistent(
                f"ramp inconsistent: k*delta*steps = {self.k * self.delta * self.steps}"
                f" but bz_end - b0 = {span}"
            )
        if self.j_hz <= 0:
            raise ConfigInconsistent(f"coupling must be positive, got {self.j_hz} Hz")

    @property
    def delta_b(self) -> float:
        """Field increment per segment."""
        return self.k * self.delta

    @classmethod
    def from_rate(
        cls,
        bx: float,
        k: float,
        b0: float = -1.5,
        bz_end: float = -0.2,
        delta_b: float = 0.1,
        backend: str = "reference",
        t2: tuple[float, float] | None = None,
        j_hz: float = 215.0,
    ) -> "SweepConfig":
        """Build a config from the field step delta_b; delta = delta_b / k."""
        steps = int(round((bz_end - b0) / delta_b))
        if steps <= 0 or abs(steps * delta_b - (bz_end - b0)) > 1e-9:
            raise ConfigInconsistent(
                f"scan window [{b0}, {bz_end}] is not a whole number of"
                f" delta_b = {delta_b} segments"
            )
        # delta_b/k then k*delta*steps may be off by float rounding; rescale
        # bz_end onto the realized grid so the stored config is exact.
        delta = delta_b / k
        end = b0 + k * delta * steps
        return cls(
            bx=bx, k=k, delta=delta, steps=steps, b0=b0, bz_end=end,
            backend=backend, t2=t2, j_hz=j_hz,
        )

    def segment_field(self, m: int) -> float:
        """Field held during segment m (1-based), sampled at its end point."""
        return self.b0 + m * self.delta_b

    def boundary_field(self, j: int) -> float:
        """Field label of the j-th recorded boundary (j = 0..steps)."""
        return self.b0 + j * self.delta_b


@dataclass(frozen=True)
class ScanTrace:
    """Per-boundary time series of one scan."""

    t: np.ndarray
    bz: np.ndarray
    defect: np.ndarray
    overlap: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    concurrence: np.ndarray

    CSV_HEADER = "t,bz,defect,overlap,a0,a1,a2,concurrence"

    def __len__(self) -> int:
        return len(self.t)

    @property
    def final_defect(self) -> float:
        return float(self.defect[-1])

    def to_csv(self) -> str:
        """Render as CSV with 12-significant-digit decimals."""
        lines = [self.CSV_HEADER]
        cols = (self.t, self.bz, self.defect, self.overlap,
                self.a0, self.a1, self.a2, self.concurrence)
        for i in range(len(self.t)):
            lines.append(",".join(format(float(c[i]), ".12g") for c in cols))
        return "\n".join(lines) + "\n"


def ramp(b0: float, k: float, t: float) -> float:
    """Linear control field bz(t) = b0 + k t."""
    return b0 + k * t


def trotter_step(p: ModelParams, delta: float) -> np.ndarray:
    """One split segment propagator.

    The transverse rotation exp(-i delta bx (sx1+sx2)) acts first, then the
    diagonal part exp(-i delta [bz (sz1+sz2) + sz1 sz2]), mirroring the
    pulse-then-delay layout of one experimental segment.  Both factors are
    exact exponentials of commuting one- and two-qubit terms.
    """
    a = delta * p.bx
    rx = np.array([[math.cos(a), -1j * math.sin(a)],
                   [-1j * math.sin(a), math.cos(a)]], dtype=complex)
    ux = np.kron(rx, rx)
    zdiag = np.array([2 * p.bz + 1.0, -1.0, -1.0, -2 * p.bz + 1.0])
    uz = np.diag(np.exp(-1j * delta * zdiag))
    return uz @ ux


def _segment_unitaries_reference(cfg: SweepConfig, m: int) -> list[np.ndarray]:
    """Substep exponentials making up segment m of the reference backend."""
    nsub = max(1, math.ceil(cfg.delta / REFERENCE_SUBSTEP))
    h = cfg.delta / nsub
    t0 = (m - 1) * cfg.delta
    out = []
    for i in range(nsub):
        bz = ramp(cfg.b0, cfg.k, t0 + (i + 0.5) * h)
        ham = model.driven_hamiltonian(ModelParams(bx=cfg.bx, bz=bz))
        out.append(unitary_step(ham, h))
    return out


def segment_unitary(cfg: SweepConfig, m: int) -> np.ndarray:
    """Full propagator of segment m (1-based) for the configured backend."""
    if cfg.backend == "trotter":
        return trotter_step(ModelParams(bx=cfg.bx, bz=cfg.segment_field(m)), cfg.delta)
    u = np.eye(4, dtype=complex)
    for sub in _segment_unitaries_reference(cfg, m):
        u = sub @ u
    return u


def _triplet_coords(psi: np.ndarray) -> np.ndarray:
    """Components of a 4-vector along {|00>, |phi+>, |11>}."""
    return np.array(
        [psi[0], (psi[1] + psi[2]) / math.sqrt(2), psi[3]], dtype=complex
    )


def eigenpopulations(psi: np.ndarray, p: ModelParams) -> tuple[float, float, float]:
    """Squared overlaps with the instantaneous triplet eigenstates."""
    sd = model.triplet_spectrum(p)
    coords = _triplet_coords(psi)
    pops = np.abs(sd.eigenvectors.conj().T @ coords) ** 2
    return float(pops[0]), float(pops[1]), float(pops[2])


def defect_density(psi: np.ndarray, p: ModelParams) -> float:
    """Total population outside the instantaneous ground state."""
    g = model.ground_vector(p)
    f = abs(np.vdot(g, psi)) ** 2
    return min(1.0, max(0.0, 1.0 - float(f)))


def concurrence(psi: np.ndarray) -> float:
    """Concurrence 2|ad - bc| of a pure two-qubit state (a,b,c,d)."""
    c = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    return min(1.0, float(c))


def concurrence_mixed(rho: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix (spin-flip construction)."""
    rho_t = _YY @ rho.conj() @ _YY
    sd = hermitian_eig(rho)
    sqrt_rho = (sd.eigenvectors * np.sqrt(np.clip(sd.eigenvalues, 0.0, None))) \
        @ sd.eigenvectors.conj().T
    m = sqrt_rho @ rho_t @ sqrt_rho
    lam = hermitian_eig((m + m.conj().T) / 2).eigenvalues
    roots = np.sqrt(np.clip(lam, 0.0, None))
    c = 2.0 * roots[-1] - float(np.sum(roots))
    return min(1.0, max(0.0, float(c)))


def _observe(psi: np.ndarray, p: ModelParams, prev: np.ndarray | None):
    sd = model.triplet_spectrum(p, prev=prev)
    coords = _triplet_coords(psi)
    pops = np.abs(sd.eigenvectors.conj().T @ coords) ** 2
    overlap = float(pops[0])
    return sd, overlap, pops


def propagate(cfg: SweepConfig, initial: np.ndarray) -> ScanTrace:
    """Evolve ``initial`` through the scan, recording each segment boundary.

    The initial state must be normalized; pure runs are meant to start in
    the triplet sector, where the swap symmetry keeps them.
    """
    psi = np.asarray(initial, dtype=complex).copy()
    if psi.shape != (4,):
        raise ValueError(f"initial state must have 4 components, got {psi.shape}")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-8:
        raise ValueError("initial state is not normalized")

    n = cfg.steps + 1
    t = np.empty(n)
    bz = np.empty(n)
    defect = np.empty(n)
    overlap = np.empty(n)
    pops = np.empty((n, 3))
    conc = np.empty(n)

    prev_vectors = None
    for j in range(n):
        if j > 0:
            if cfg.backend == "trotter":
                p_seg = ModelParams(bx=cfg.bx, bz=cfg.segment_field(j))
                psi = trotter_step(p_seg, cfg.delta) @ psi
            else:
                for u in _segment_unitaries_reference(cfg, j):
                    psi = u @ psi
        p_here = ModelParams(bx=cfg.bx, bz=cfg.boundary_field(j))
        sd, f, pj = _observe(psi, p_here, prev_vectors)
        prev_vectors = sd.eigenvectors
        t[j] = j * cfg.delta
        bz[j] = cfg.boundary_field(j)
        overlap[j] = f
        defect[j] = min(1.0, max(0.0, 1.0 - f))
        pops[j] = pj
        conc[j] = concurrence(psi)

    return ScanTrace(
        t=t, bz=bz, defect=defect, overlap=overlap,
        a0=pops[:, 0], a1=pops[:, 1], a2=pops[:, 2], concurrence=conc,
    )


def phase_damping_factors(cfg: SweepConfig) -> np.ndarray:
    """Elementwise decay mask of one per-segment dephasing step.

    Entry (a, b) is the product over qubits of exp(-dt/T2_i) for every qubit
    whose bit differs between basis states a and b; dt = 2*delta/(pi*J) is
    the physical duration of one segment in seconds.
    """
    if cfg.t2 is None:
        raise InvalidT2("config carries no T2 times")
    if len(cfg.t2) != 2 or any(x <= 0 or not math.isfinite(x) for x in cfg.t2):
        raise InvalidT2(f"T2 times must be positive and finite, got {cfg.t2}")
    dt = 2.0 * cfg.delta / (math.pi * cfg.j_hz)
    lam = [math.exp(-dt / t2i) for t2i in cfg.t2]
    mask = np.ones((4, 4))
    for a in range(4):
        for b in range(4):
            f = 1.0
            for qubit in range(2):
                if _BITS[a][qubit] != _BITS[b][qubit]:
                    f *= lam[qubit]
            mask[a, b] = f
    return mask


def dephase_propagate(cfg: SweepConfig, rho0: np.ndarray) -> ScanTrace:
    """Density-matrix scan with per-qubit phase damping after each segment.

    Dephasing acts in the computational basis.  Observables are ground-state
    expectation values <psi_g|rho|psi_g> and eigenpopulations <v_i|rho|v_i>;
    the concurrence column uses the mixed-state formula.
    """
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (4, 4):
        raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
    if abs(np.trace(rho).real - 1.0) > 1e-10 or abs(np.trace(rho).imag) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    mask = phase_damping_factors(cfg)

    n = cfg.steps + 1
    t = np.empty(n)
    bz = np.empty(n)
    defect = np.empty(n)
    overlap = np.empty(n)
    pops = np.empty((n, 3))
    conc = np.empty(n)

    prev_vectors = None
    for j in range(n):
        if j > 0:
            if cfg.backend == "trotter":
                p_seg = ModelParams(bx=cfg.bx, bz=cfg.segment_field(j))
                u = trotter_step(p_seg, cfg.delta)
                rho = u @ rho @ u.conj().T
            else:
                for u in _segment_unitaries_reference(cfg, j):
                    rho = u @ rho @ u.conj().T
            rho = rho * mask
        p_here = ModelParams(bx=cfg.bx, bz=cfg.boundary_field(j))
        sd = model.triplet_spectrum(p_here, prev=prev_vectors)
        prev_vectors = sd.eigenvectors
        for i in range(3):
            v = sd.eigenvectors[:, i]
            v4 = v[0] * model.KET_00 + v[1] * model.PHI_PLUS + v[2] * model.KET_11
            pops[j, i] = float(np.real(np.vdot(v4, rho @ v4)))
        f = pops[j, 0]
        t[j] = j * cfg.delta
        bz[j] = cfg.boundary_field(j)
        overlap[j] = f
        defect[j] = min(1.0, max(0.0, 1.0 - f))
        conc[j] = concurrence_mixed(rho)

    return ScanTrace(
        t=t, bz=bz, defect=defect, overlap=overlap,
        a0=pops[:, 0], a1=pops[:, 1], a2=pops[:, 2], concurrence=conc,
    )
