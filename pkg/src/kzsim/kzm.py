"""Freeze-out analysis and defect-scaling laws for the swept two-qubit model.

The sweep near bz = -1 maps onto a linear level crossing with quench time
tau_q = sqrt(2) bx / k and maximal relaxation time tau_0 = 1/(2 sqrt(2) bx),
so tau_q / tau_0 = 4 bx^2 / k.  The freeze-out instant t_hat solves
tau(t_hat) = alpha * t_hat; in the rescaled distance eps = t / tau_q it has
the closed form

    eps_hat = sqrt( (sqrt(1 + 4/x^2) - 1) / 2 ),   x = alpha * tau_q / tau_0.

Matching the frozen state back onto the adiabatic branches after the
crossing gives the final defect density eps_hat^2 / (1 + eps_hat^2), which
reduces to exp(-x) for slow quenches.  ``run_scaling_sweep`` measures the
defect density at bz = -0.2 (past the first crossing, before the second) for
a grid of rates and fits ln D_f against tau_q/tau_0 to estimate alpha; the
linear-crossing asymptotics predict alpha = pi/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import evolve, model
from .errors import InvalidParam, UnknownFigure
from .evolve import SweepConfig
from .model import ModelParams
from .smallmat import hermitian_eig, unitary_step

# grid of scan rates for the smooth-model scaling fits; log-spaced and wider
# than the experimental 1/4..1 window so the fit is not dominated by the
# coherent post-crossing oscillation at any single rate
IDEAL_K_VALUES = tuple(float(k) for k in np.exp(np.linspace(math.log(0.125), 0.0, 12)))
# the eight experimentally realized rate settings
EXPERIMENT_K_VALUES = (1.0, 0.5, 1.0 / 3.0, 0.25)
EXPERIMENT_BX_VALUES = (0.1, 0.2)
T2_DEFAULT = (2.0, 0.2)
DF_SAMPLE_BZ = -0.2
_FIT_EXCLUDE_BELOW = 1e-6


@dataclass(frozen=True)
class KzmParams:
    """Quench time, maximal relaxation time and the freeze-out constant."""

    tau_q: float
    tau_0: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ("tau_q", "tau_0", "alpha"):
            v = getattr(self, name)
            if v <= 0 or not math.isfinite(v):
                raise InvalidParam(f"{name} must be positive, got {v}")

    @property
    def x_alpha(self) -> float:
        return self.alpha * self.tau_q / self.tau_0

    @classmethod
    def from_sweep(cls, bx: float, k: float, alpha: float) -> "KzmParams":
        return cls(tau_q=quench_time(bx, k), tau_0=tau0(bx), alpha=alpha)


@dataclass(frozen=True)
class ScalingFit:
    """(tau_q/tau_0, D_f) points with the fitted decay constant.

    ``alpha_hat`` is minus the least-squares slope of ln D_f versus x;
    ``r`` is the magnitude of the Pearson correlation of that line (the
    fit decays, so the raw coefficient is negative).
    """

    points: tuple[tuple[float, float], ...]
    alpha_hat: float
    r: float
    n_points: int
    bx_values: tuple[float, ...]
    backend: str

    def to_record(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "r": self.r,
            "n_points": self.n_points,
            "bx_values": list(self.bx_values),
            "backend": self.backend,
        }


def quench_time(bx: float, k: float) -> float:
    """tau_q = sqrt(2) bx / k."""
    if bx <= 0 or k <= 0 or not (math.isfinite(bx) and math.isfinite(k)):
        raise InvalidParam(f"need bx > 0 and k > 0, got bx={bx}, k={k}")
    return math.sqrt(2) * bx / k


def tau0(bx: float) -> float:
    """Maximal relaxation time 1/(2 sqrt(2) bx)."""
    if bx <= 0 or not math.isfinite(bx):
        raise InvalidParam(f"need bx > 0, got {bx}")
    return 1.0 / (2.0 * math.sqrt(2) * bx)


def freeze_out(p: KzmParams, verify: bool = True) -> tuple[float, float]:
    """Freeze-out time and rescaled distance (t_hat, eps_hat).

    Uses the closed form; with ``verify`` the value is cross-checked against
    an independent bisection root-find of tau(t) = alpha t (agreement to
    1e-10 relative).
    """
    u = 4.0 / (p.x_alpha * p.x_alpha)
    # sqrt(1+u) - 1 rewritten to stay accurate for small u
    eps_sq = 0.5 * u / (math.sqrt(1.0 + u) + 1.0)
    eps_hat = math.sqrt(eps_sq)
    t_hat = eps_hat * p.tau_q
    if verify:
        t_b, _ = freeze_out_bisection(p)
        if abs(t_b - t_hat) > 1e-10 * t_hat:
            raise ArithmeticError(
                f"closed form {t_hat} and bisection {t_b} disagree"
            )
    return t_hat, eps_hat


def freeze_out_bisection(p: KzmParams) -> tuple[float, float]:
    """Root of tau_0/sqrt(1+(t/tau_q)^2) = alpha*t by plain bisection."""

    def f(t: float) -> float:
        return p.tau_0 / math.sqrt(1.0 + (t / p.tau_q) ** 2) - p.alpha * t

    lo = 0.0
    hi = 10.0 * p.tau_0 / p.alpha
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t_hat = 0.5 * (lo + hi)
    return t_hat, t_hat / p.tau_q


def predicted_defects(p: KzmParams) -> float:
    """Final defect density eps_hat^2 / (1 + eps_hat^2) of the frozen state.

    Agrees with exp(-x_alpha) to second order for slow quenches and tends to
    one for fast ones.
    """
    u = 4.0 / (p.x_alpha * p.x_alpha)
    eps_sq = 0.5 * u / (math.sqrt(1.0 + u) + 1.0)
    return eps_sq / (1.0 + eps_sq)


def fit_scaling(points) -> tuple[float, float]:
    """Least-squares estimate of the decay constant from (x, d_f) points.

    Fits ln d_f = c - alpha x; points with d_f below 1e-6 are dropped to
    keep the logarithm well conditioned.  Returns (alpha_hat, |r|).
    """
    kept = sorted((x, d) for x, d in points if d >= _FIT_EXCLUDE_BELOW)
    if len(kept) < 2:
        raise InvalidParam("need at least two usable points to fit")
    x = np.array([q[0] for q in kept])
    y = np.log(np.array([q[1] for q in kept]))
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    syy = float(np.sum((y - ym) ** 2))
    if sxx == 0.0 or syy == 0.0:
        raise InvalidParam("degenerate point set for the fit")
    slope = sxy / sxx
    r = abs(sxy / math.sqrt(sxx * syy))
    return -slope, r


def run_scaling_sweep(
    bx_values,
    k_values,
    backend: str = "reference",
    b0: float = -1.5,
    bz_end: float = DF_SAMPLE_BZ,
    delta_b: float = 0.1,
    t2: tuple[float, float] | None = None,
    j_hz: float = 215.0,
) -> ScalingFit:
    """One scan per (bx, k) pair; defect sampled at the end of the window.

    The points are pooled into a single fit, so call once per transverse
    field for per-field estimates or with both fields for the pooled
    experimental-grid estimate.
    """
    pts = []
    for bx in bx_values:
        for k in k_values:
            cfg = SweepConfig.from_rate(
                bx, k, b0=b0, bz_end=bz_end, delta_b=delta_b,
                backend=backend, t2=t2, j_hz=j_hz,
            )
            x = quench_time(bx, k) / tau0(bx)
            start = model.ground_vector(ModelParams(bx=bx, bz=b0))
            if t2 is not None:
                rho0 = np.outer(start, start.conj())
                trace = evolve.dephase_propagate(cfg, rho0)
            else:
                trace = evolve.propagate(cfg, start)
            pts.append((x, trace.final_defect))
    pts.sort()
    alpha_hat, r = fit_scaling(pts)
    return ScalingFit(
        points=tuple(pts),
        alpha_hat=alpha_hat,
        r=r,
        n_points=len(pts),
        bx_values=tuple(bx_values),
        backend=backend,
    )


def lz_check(bx: float, k: float) -> tuple[float, float]:
    """Excited population of a long symmetric two-level sweep vs the
    linear-crossing formula exp(-2 pi bx^2 / k).

    The detuning bz + 1 runs from -10 sqrt(2) bx to +10 sqrt(2) bx at rate k,
    integrated with midpoint substeps of at most 0.01 time units.
    """
    if bx <= 0 or k <= 0:
        raise InvalidParam(f"need bx > 0 and k > 0, got bx={bx}, k={k}")
    half_window = 10.0 * math.sqrt(2) * bx
    z0 = -1.0 - half_window
    total = 2.0 * half_window / k
    n = max(1, math.ceil(total / evolve.REFERENCE_SUBSTEP))
    h = total / n
    sd = hermitian_eig(model.effective_hamiltonian(ModelParams(bx=bx, bz=z0)))
    psi = sd.eigenvectors[:, 0]
    for i in range(n):
        bz = z0 + k * (i + 0.5) * h
        psi = unitary_step(model.effective_hamiltonian(ModelParams(bx=bx, bz=bz)), h) @ psi
    z1 = z0 + k * total
    sd = hermitian_eig(model.effective_hamiltonian(ModelParams(bx=bx, bz=z1)))
    p_numeric = float(abs(np.vdot(sd.eigenvectors[:, 1], psi)) ** 2)
    p_formula = math.exp(-2.0 * math.pi * bx * bx / k)
    return p_numeric, p_formula


@dataclass(frozen=True)
class FigureData:
    """One reproducible dataset: column names plus rows of values."""

    figure_id: str
    note: str
    header: tuple[str, ...]
    rows: tuple[tuple, ...]


def _fig_levels(bx: float = 0.1):
    rows = []
    for i in range(-200, 201):
        bz = i / 100.0
        sd = model.triplet_spectrum(ModelParams(bx=bx, bz=bz))
        rows.append((bz, *map(float, sd.eigenvalues)))
    return rows


def _fig_tau(bx: float = 0.1):
    rows = []
    for i in range(-200, 201):
        bz = i / 100.0
        rows.append((bz, model.relaxation_time(ModelParams(bx=bx, bz=bz))))
    return rows


def _fig_populations():
    rows = []
    for k in (1.0, 0.05):
        cfg = SweepConfig.from_rate(0.1, k, b0=-2.0, bz_end=2.0)
        trace = evolve.propagate(cfg, model.ground_vector(ModelParams(0.1, -2.0)))
        for i in range(len(trace)):
            rows.append((k, trace.t[i], trace.bz[i], trace.a0[i],
                         trace.a1[i], trace.a2[i], trace.defect[i]))
    return rows


def _fig_defect_curves():
    rows = []
    for bx in EXPERIMENT_BX_VALUES:
        for k in EXPERIMENT_K_VALUES:
            for backend in ("reference", "trotter"):
                cfg = SweepConfig.from_rate(bx, k, b0=-1.5, bz_end=0.0, backend=backend)
                trace = evolve.propagate(cfg, model.ground_vector(ModelParams(bx, -1.5)))
                for i in range(len(trace)):
                    rows.append((bx, k, backend, trace.t[i], trace.bz[i], trace.defect[i]))
        cfg = SweepConfig.from_rate(bx, 0.25, b0=-1.5, bz_end=0.0,
                                    backend="trotter", t2=T2_DEFAULT)
        start = model.ground_vector(ModelParams(bx, -1.5))
        trace = evolve.dephase_propagate(cfg, np.outer(start, start.conj()))
        for i in range(len(trace)):
            rows.append((bx, 0.25, "trotter-t2", trace.t[i], trace.bz[i], trace.defect[i]))
    return rows


def _scaling_point(bx: float, k: float, backend: str) -> tuple[float, float]:
    cfg = SweepConfig.from_rate(bx, k, b0=-1.5, bz_end=DF_SAMPLE_BZ, backend=backend)
    start = model.ground_vector(ModelParams(bx=bx, bz=-1.5))
    trace = evolve.propagate(cfg, start)
    return quench_time(bx, k) / tau0(bx), trace.final_defect


def _fig_scaling_points():
    rows = []
    for bx in EXPERIMENT_BX_VALUES:
        for k in sorted(IDEAL_K_VALUES, reverse=True):
            x, d = _scaling_point(bx, k, "reference")
            rows.append((f"ideal-bx{bx}", bx, k, x, d))
    for bx in EXPERIMENT_BX_VALUES:
        for k in EXPERIMENT_K_VALUES:
            x, d = _scaling_point(bx, k, "trotter")
            rows.append(("experiment-grid", bx, k, x, d))
    return rows


def _fig_concurrence():
    rows = []
    for bx in EXPERIMENT_BX_VALUES:
        for k in (1.0, 0.1, 1.0 / 30.0):
            cfg = SweepConfig.from_rate(bx, k, b0=-1.5, bz_end=1.5)
            trace = evolve.propagate(cfg, model.ground_vector(ModelParams(bx, -1.5)))
            for i in range(len(trace)):
                rows.append((bx, k, trace.bz[i], trace.concurrence[i], trace.defect[i]))
    return rows


_FIGURES = {
    "fig1a": (
        "triplet energy levels, bx=0.1, bz in [-2, 2]",
        ("bz", "e0", "e1", "e2"),
        _fig_levels,
    ),
    "fig1b": (
        "relaxation time 1/gap, bx=0.1, bz in [-2, 2]",
        ("bz", "tau"),
        _fig_tau,
    ),
    "fig1c": (
        "eigenpopulations during scans, bx=0.1, k in {1, 1/20}, b0=-2",
        ("k", "t", "bz", "a0", "a1", "a2", "defect"),
        _fig_populations,
    ),
    "fig3": (
        "defect curves, bx in {0.1,0.2} x k in {1,1/2,1/3,1/4}, b0=-1.5;"
        " t2 variant (2 s, 0.2 s) at k=1/4",
        ("bx", "k", "variant", "t", "bz", "defect"),
        _fig_defect_curves,
    ),
    "fig4": (
        "defect scaling points: ideal reference grid per bx and the"
        " trotterized experimental grid",
        ("series", "bx", "k", "tau_ratio", "defect"),
        _fig_scaling_points,
    ),
    "fig5": (
        "concurrence during scans, bx in {0.1,0.2} x k in {1,1/10,1/30},"
        " b0=-1.5 to 1.5",
        ("bx", "k", "bz", "concurrence", "defect"),
        _fig_concurrence,
    ),
}

FIGURE_IDS = tuple(sorted(_FIGURES))


def reproduce_figure(figure_id: str) -> FigureData:
    """Dataset behind one of the published figures."""
    try:
        note, header, builder = _FIGURES[figure_id]
    except KeyError:
        raise UnknownFigure(
            f"unknown figure {figure_id!r}; choose from {', '.join(FIGURE_IDS)}"
        ) from None
    return FigureData(
        figure_id=figure_id, note=note, header=header,
        rows=tuple(builder()),
    )
