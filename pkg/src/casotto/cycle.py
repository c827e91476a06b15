"""Four-stroke cycle thermodynamics of the cavity field.

The cycle alternates thermal contact and isolated wall strokes:

  A. thermalise with the cold bath (inverse temperature ``beta_A``) at L0;
  B. compress L0 -> L1 = L0(1 - eps) along a profile of duration tau;
  C. thermalise with the hot bath (``beta_C``) at L1;
  D. expand back L1 -> L0 along the time-reversed profile.

In the adiabatic limit mode populations are frozen during the strokes and
the equidistant spectrum gives the closed results: engine efficiency
``eta = eps`` (independent of the baths) and refrigerator coefficient of
performance ``1/eps - 1``.  At finite stroke time the friction energies of
the two strokes enter with the sign dictated by the machine's bookkeeping:

  engine:       Q = Q_ad - E_F(A),  W = W_ad - (E_F(A) + E_F(C))
  refrigerator: Q = Q_ad - E_F(C),  W = W_ad + E_F(A) + E_F(C)

where E_F(A) is generated compressing out of the cold thermal state and
E_F(C) expanding out of the hot one (equal to its forward value by
direction independence; the implementation recomputes it from the reversed
profile and asserts the equality instead of assuming it).

Heat and work are assembled directly from occupation differences, never
from stroke energies, so the static vacuum offsets cancel identically: the
reported Q and W are bit-for-bit independent of whether the Casimir energy
is included in the stroke energies E_A..E_D.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .friction import SpectralTable, TruncationWarning, friction_energy, spectral_table
from .quadrature import QuadratureSpec
from .spectrum import (
    CavityConfig,
    ThermalBath,
    casimir_energy,
    mode_frequencies,
    occupations,
)
from .trajectory import Trajectory, reverse

__all__ = [
    "BathPair",
    "CycleReport",
    "ConditionWarning",
    "adiabatic_engine",
    "nonadiabatic_engine",
    "adiabatic_refrigerator",
    "nonadiabatic_refrigerator",
    "power",
    "sweep",
    "SweepRow",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]


class ConditionWarning(UserWarning):
    """The bath pair sits outside the stated operating window of the machine."""


@dataclass(frozen=True)
class BathPair:
    """Cold (A) and hot (C) baths; A must not be hotter than C."""

    beta_A: float
    beta_C: float

    def __post_init__(self) -> None:
        if not self.beta_C > 0:
            raise ValueError(f"beta_C must be positive, got {self.beta_C}")
        if not self.beta_A >= self.beta_C:
            raise ValueError(
                f"bath A must be the colder one: beta_A={self.beta_A} < beta_C={self.beta_C}"
            )

    @property
    def ratio(self) -> float:
        """Temperature ratio ``beta_C / beta_A`` (cold over hot, <= 1)."""
        if math.isinf(self.beta_A):
            return 0.0
        return self.beta_C / self.beta_A

    @property
    def carnot_efficiency(self) -> float:
        return 1.0 - self.ratio


@dataclass
class CycleReport:
    """One full cycle: stroke energies, heat, work, figures of merit.

    Engine convention: ``Q`` is the heat absorbed from the hot bath and
    ``W`` the work extracted.  Refrigerator convention: ``Q`` is the heat
    pulled from the cold bath and ``W`` the work consumed.  ``eta`` is the
    efficiency (engine) or coefficient of performance (refrigerator);
    ``eta_defined`` is False when the denominator is degenerate, in which
    case ``eta`` holds the analytic limiting value.  ``power`` is
    ``W / (2 tau)`` for finite-time cycles and NaN for adiabatic ones.
    """

    E_A: float
    E_B: float
    E_C: float
    E_D: float
    Q: float
    W: float
    eta: float
    eta_adiabatic: float
    power: float
    mode: str
    E_F_A: float
    E_F_C: float
    k_used: int
    eta_defined: bool = True
    eta_second_order: float = math.nan
    tail_estimate: float = math.nan
    tail_warning: bool = False
    q_convention: str = ""
    diagnostics: tuple[str, ...] = field(default_factory=tuple)


def _otto_sums(cfg: CavityConfig, baths: BathPair) -> tuple[float, float, float, dict]:
    """Population-frozen heat/work of the engine bookkeeping and stroke sums.

    Returns (Q_ad, W_ad, tail, pieces) where pieces holds the four
    occupation-weighted frequency sums needed for the stroke energies.
    Occupations of the hot bath are evaluated at the compressed-cavity
    frequencies exactly.
    """
    K = cfg.n_modes
    w0 = mode_frequencies(K, cfg.L0)
    w1 = mode_frequencies(K, cfg.L1)
    nA = occupations(baths.beta_A, w0)
    nC = occupations(baths.beta_C, w1)
    dn = nC - nA
    terms_Q = w1 * dn
    Q_ad = float(np.sum(terms_Q))
    # w1 - w0 = w0 * eps / (1 - eps), evaluated without cancellation
    dw = w0 * (cfg.epsilon / (1.0 - cfg.epsilon))
    W_ad = float(np.sum(dw * dn))
    # geometric tail of the last heat terms (occupation differences decay
    # exponentially in k)
    tail = math.nan
    if K >= 4 and abs(terms_Q[-2]) > 0:
        rho = abs(terms_Q[-1]) / abs(terms_Q[-2])
        if 0.0 < rho < 1.0:
            tail = abs(terms_Q[-1]) * rho / (1.0 - rho)
        else:
            tail = math.inf
    pieces = {
        "sum_w0_nA": float(np.sum(w0 * nA)),
        "sum_w1_nA": float(np.sum(w1 * nA)),
        "sum_w1_nC": float(np.sum(w1 * nC)),
        "sum_w0_nC": float(np.sum(w0 * nC)),
    }
    return Q_ad, W_ad, tail, pieces


def _tail_flag(cfg: CavityConfig, tail: float, scale: float) -> bool:
    flag = bool(math.isfinite(tail) and tail > cfg.tail_tol * max(abs(scale), 1e-300))
    if flag:
        warnings.warn(
            f"mode-sum tail estimate {tail:.3e} exceeds tail_tol * |Q| "
            f"= {cfg.tail_tol * abs(scale):.3e}; increase n_modes",
            TruncationWarning,
            stacklevel=3,
        )
    return flag


def _engine_condition(cfg: CavityConfig, baths: BathPair) -> None:
    # Q_ad > 0 requires beta_C * w_k(L1) <= beta_A * w_k, i.e. the Otto
    # efficiency eps must not exceed the Carnot efficiency 1 - beta_C/beta_A.
    if baths.ratio > 1.0 - cfg.epsilon:
        warnings.warn(
            f"bath ratio beta_C/beta_A = {baths.ratio:.4g} exceeds 1 - eps "
            f"= {1.0 - cfg.epsilon:.4g}: no positive heat intake, not an "
            "engine regime",
            ConditionWarning,
            stacklevel=3,
        )


def _refrigerator_condition(cfg: CavityConfig, baths: BathPair) -> None:
    if not (1.0 - cfg.epsilon <= baths.ratio <= 1.0):
        warnings.warn(
            f"refrigerator needs 1 - eps <= beta_C/beta_A <= 1, got "
            f"{baths.ratio:.4g} with eps = {cfg.epsilon:.4g}",
            ConditionWarning,
            stacklevel=3,
        )


def adiabatic_engine(
    cfg: CavityConfig, baths: BathPair, include_casimir: bool = True
) -> CycleReport:
    """Population-frozen engine cycle; efficiency equals ``eps`` exactly."""
    _engine_condition(cfg, baths)
    Q_ad, W_ad, tail, pieces = _otto_sums(cfg, baths)
    e0 = casimir_energy(cfg.L0) if include_casimir else 0.0
    e1 = casimir_energy(cfg.L1) if include_casimir else 0.0
    eta, defined = _safe_ratio(W_ad, Q_ad, limit=cfg.epsilon)
    mode = "engine" if (Q_ad > 0 and W_ad > 0) else "dissipator"
    return CycleReport(
        E_A=pieces["sum_w0_nA"] + e0,
        E_B=pieces["sum_w1_nA"] + e1,
        E_C=pieces["sum_w1_nC"] + e1,
        E_D=pieces["sum_w0_nC"] + e0,
        Q=Q_ad,
        W=W_ad,
        eta=eta,
        eta_adiabatic=eta,
        power=math.nan,
        mode=mode,
        E_F_A=0.0,
        E_F_C=0.0,
        k_used=cfg.n_modes,
        eta_defined=defined,
        tail_estimate=tail,
        tail_warning=_tail_flag(cfg, tail, Q_ad),
    )


def _safe_ratio(num: float, den: float, limit: float) -> tuple[float, bool]:
    """num/den with a degeneracy guard; returns (value, defined)."""
    if den != 0.0 and math.isfinite(num / den):
        return num / den, True
    return limit, False


def _friction_pair(
    cfg: CavityConfig,
    baths: BathPair,
    traj: Trajectory,
    spec: QuadratureSpec,
    tables: tuple[SpectralTable, SpectralTable] | None,
) -> tuple[float, float, float, bool]:
    """(E_F_A, E_F_C, accumulated error, tail flag) for the two strokes.

    E_F_A: compression out of the cold thermal state, forward profile.
    E_F_C: expansion out of the hot thermal state, reversed profile.  The
    kernel is direction-independent, so the reversed value must match the
    forward one; this is asserted as a consistency check on the quadrature.
    """
    rev = reverse(traj)
    if tables is None:
        table_fwd = spectral_table(traj, cfg, spec)
        table_rev = spectral_table(rev, cfg, spec)
    else:
        table_fwd, table_rev = tables
    res_A = friction_energy(
        cfg, ThermalBath(baths.beta_A), traj, spec, table=table_fwd, compute_bound=False
    )
    res_C = friction_energy(
        cfg, ThermalBath(baths.beta_C), rev, spec, table=table_rev, compute_bound=False
    )
    res_C_fwd = friction_energy(
        cfg, ThermalBath(baths.beta_C), traj, spec, table=table_fwd, compute_bound=False
    )
    tol = 1e-8 * max(abs(res_C.value), abs(res_C_fwd.value), 1e-300) + 10.0 * (
        res_C.err + res_C_fwd.err
    )
    if abs(res_C.value - res_C_fwd.value) > tol:
        raise AssertionError(
            "direction independence violated: reversed-stroke friction "
            f"{res_C.value:.6e} vs forward {res_C_fwd.value:.6e}"
        )
    err = res_A.err + res_C.err
    tail_flag = res_A.tail_warning or res_C.tail_warning
    return res_A.value, res_C.value, err, tail_flag


def nonadiabatic_engine(
    cfg: CavityConfig,
    baths: BathPair,
    traj: Trajectory,
    spec: QuadratureSpec | None = None,
    *,
    include_casimir: bool = True,
    tables: tuple[SpectralTable, SpectralTable] | None = None,
    thermalization_time: float = 0.0,
) -> CycleReport:
    """Finite-time engine cycle with friction from both strokes.

    The heat intake is reduced by the compression-stroke friction
    ``E_F(A)`` (the expansion stroke deposits its friction after the hot
    contact, where it does not touch Q); both frictions reduce the work.
    """
    spec = spec or QuadratureSpec()
    _engine_condition(cfg, baths)
    Q_ad, W_ad, tail, pieces = _otto_sums(cfg, baths)
    ef_a, ef_c, err, friction_tail = _friction_pair(cfg, baths, traj, spec, tables)

    Q = Q_ad - ef_a
    W = W_ad - (ef_a + ef_c)
    eta_ad, _ = _safe_ratio(W_ad, Q_ad, limit=cfg.epsilon)
    eta, defined = _safe_ratio(W, Q, limit=eta_ad)
    eta2 = eta_ad - (ef_a + ef_c) / Q_ad if Q_ad != 0.0 else math.nan
    mode = "engine" if (W > 0 and Q > 0) else "dissipator"
    e0 = casimir_energy(cfg.L0) if include_casimir else 0.0
    e1 = casimir_energy(cfg.L1) if include_casimir else 0.0
    return CycleReport(
        E_A=pieces["sum_w0_nA"] + e0,
        E_B=pieces["sum_w1_nA"] + ef_a + e1,
        E_C=pieces["sum_w1_nC"] + e1,
        E_D=pieces["sum_w0_nC"] + ef_c + e0,
        Q=Q,
        W=W,
        eta=eta,
        eta_adiabatic=eta_ad,
        power=W / (2.0 * traj.duration + thermalization_time),
        mode=mode,
        E_F_A=ef_a,
        E_F_C=ef_c,
        k_used=cfg.n_modes,
        eta_defined=defined,
        eta_second_order=eta2,
        tail_estimate=tail,
        tail_warning=_tail_flag(cfg, tail, Q_ad) or friction_tail,
        q_convention="Q = Q_adiabatic - E_F(cold compression stroke)",
        diagnostics=(f"friction_quadrature_err={err:.3e}",),
    )


def adiabatic_refrigerator(
    cfg: CavityConfig, baths: BathPair, include_casimir: bool = True
) -> CycleReport:
    """Population-frozen refrigerator; COP equals ``1/eps - 1`` exactly."""
    _refrigerator_condition(cfg, baths)
    K = cfg.n_modes
    w0 = mode_frequencies(K, cfg.L0)
    w1 = mode_frequencies(K, cfg.L1)
    nA = occupations(baths.beta_A, w0)
    nC = occupations(baths.beta_C, w1)
    dn = nA - nC
    terms_Q = w0 * dn
    Q_ad = float(np.sum(terms_Q))
    dw = w0 * (cfg.epsilon / (1.0 - cfg.epsilon))
    W_ad = float(np.sum(dw * dn))
    tail = math.nan
    if K >= 4 and abs(terms_Q[-2]) > 0:
        rho = abs(terms_Q[-1]) / abs(terms_Q[-2])
        tail = abs(terms_Q[-1]) * rho / (1.0 - rho) if 0.0 < rho < 1.0 else math.inf
    cop_limit = 1.0 / cfg.epsilon - 1.0
    cop, defined = _safe_ratio(Q_ad, W_ad, limit=cop_limit)
    e0 = casimir_energy(cfg.L0) if include_casimir else 0.0
    e1 = casimir_energy(cfg.L1) if include_casimir else 0.0
    mode = "refrigerator" if Q_ad > 0 else "dissipator"
    return CycleReport(
        E_A=float(np.sum(w0 * nA)) + e0,
        E_B=float(np.sum(w1 * nA)) + e1,
        E_C=float(np.sum(w1 * nC)) + e1,
        E_D=float(np.sum(w0 * nC)) + e0,
        Q=Q_ad,
        W=W_ad,
        eta=cop,
        eta_adiabatic=cop,
        power=math.nan,
        mode=mode,
        E_F_A=0.0,
        E_F_C=0.0,
        k_used=cfg.n_modes,
        eta_defined=defined,
        tail_estimate=tail,
        tail_warning=_tail_flag(cfg, tail, Q_ad),
    )


def nonadiabatic_refrigerator(
    cfg: CavityConfig,
    baths: BathPair,
    traj: Trajectory,
    spec: QuadratureSpec | None = None,
    *,
    include_casimir: bool = True,
    tables: tuple[SpectralTable, SpectralTable] | None = None,
    thermalization_time: float = 0.0,
) -> CycleReport:
    """Finite-time refrigerator: friction eats the cooling and adds to the bill.

    The heat drawn from the cold bath loses the expansion-stroke friction
    ``E_F(C)``; the work consumed gains both frictions.
    """
    spec = spec or QuadratureSpec()
    _refrigerator_condition(cfg, baths)
    ad = adiabatic_refrigerator(cfg, baths, include_casimir=include_casimir)
    ef_a, ef_c, err, friction_tail = _friction_pair(cfg, baths, traj, spec, tables)

    Q = ad.Q - ef_c
    W = ad.W + ef_a + ef_c
    cop, defined = _safe_ratio(Q, W, limit=ad.eta)
    mode = "refrigerator" if Q > 0 else "dissipator"
    return CycleReport(
        E_A=ad.E_A,
        E_B=ad.E_B + ef_a,
        E_C=ad.E_C,
        E_D=ad.E_D + ef_c,
        Q=Q,
        W=W,
        eta=cop,
        eta_adiabatic=ad.eta,
        power=W / (2.0 * traj.duration + thermalization_time),
        mode=mode,
        E_F_A=ef_a,
        E_F_C=ef_c,
        k_used=cfg.n_modes,
        eta_defined=defined,
        eta_second_order=math.nan,
        tail_estimate=ad.tail_estimate,
        tail_warning=ad.tail_warning or friction_tail,
        q_convention="Q = Q_adiabatic - E_F(hot expansion stroke)",
        diagnostics=(f"friction_quadrature_err={err:.3e}",),
    )


def power(report: CycleReport, tau: float, thermalization_time: float = 0.0) -> float:
    """Average output ``W / (2 tau + thermalization_time)``.

    The factor two counts both wall strokes; thermal contact is
    instantaneous by default but its duration can be charged here.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if thermalization_time < 0:
        raise ValueError("thermalization_time must be non-negative")
    return report.W / (2.0 * tau + thermalization_time)


@dataclass(frozen=True)
class SweepRow:
    """One grid cell of a parameter sweep."""

    tau_omega1: float
    beta_ratio: float
    epsilon: float
    report: CycleReport | None
    error: str = ""


SWEEP_COLUMNS = (
    "tau_omega1",
    "beta_ratio",
    "epsilon",
    "Q",
    "W",
    "eta",
    "eta_adiabatic",
    "power",
    "mode",
    "EF_A",
    "EF_C",
    "tail_warning",
)


def sweep(
    cfg: CavityConfig,
    baths: Sequence[BathPair],
    taus: Sequence[float],
    traj_family: Callable[[float], Trajectory],
    spec: QuadratureSpec | None = None,
    *,
    epsilons: Iterable[float] | None = None,
    machine: str = "engine",
    include_casimir: bool = True,
    thermalization_time: float = 0.0,
    jobs: int | None = None,
) -> list[SweepRow]:
    """Cycle reports over a (bath, epsilon, tau) grid.

    The expensive spectral tables depend only on the trajectory, so they are
    built once per tau (optionally in parallel over ``jobs`` workers) and
    shared across every bath and compression ratio.  Rows are ordered
    deterministically: outer bath ratio, then epsilon, then tau ascending.
    Failures of individual cells are recorded in the row and do not abort
    the sweep.
    """
    if machine not in ("engine", "refrigerator"):
        raise ValueError(f"machine must be 'engine' or 'refrigerator', got {machine!r}")
    if not baths or len(taus) == 0:
        raise ValueError("sweep needs non-empty bath and tau grids")
    spec = spec or QuadratureSpec()
    eps_list = list(epsilons) if epsilons is not None else [cfg.epsilon]
    taus = sorted(float(t) for t in taus)

    def build_tables(tau: float):
        try:
            traj = traj_family(tau)
            return traj, spectral_table(traj, cfg, spec), spectral_table(reverse(traj), cfg, spec)
        except Exception as exc:  # cell failures are recorded, not raised
            return exc

    n_workers = jobs or 1
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            prepared = list(pool.map(build_tables, taus))
    else:
        prepared = [build_tables(tau) for tau in taus]

    run = nonadiabatic_engine if machine == "engine" else nonadiabatic_refrigerator
    rows: list[SweepRow] = []
    for bath in baths:
        for eps in eps_list:
            cfg_eps = replace(cfg, epsilon=eps)
            for tau, made in zip(taus, prepared):
                if isinstance(made, Exception):
                    rows.append(
                        SweepRow(tau * cfg.omega1, bath.ratio, eps, None, error=str(made))
                    )
                    continue
                traj, tab_f, tab_r = made
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        report = run(
                            cfg_eps,
                            bath,
                            traj,
                            spec,
                            include_casimir=include_casimir,
                            tables=(tab_f, tab_r),
                            thermalization_time=thermalization_time,
                        )
                    rows.append(
                        SweepRow(tau * cfg.omega1, bath.ratio, eps, report)
                    )
                except Exception as exc:  # record and continue
                    rows.append(
                        SweepRow(tau * cfg.omega1, bath.ratio, eps, None, error=str(exc))
                    )
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], stream) -> None:
    """Emit the sweep table; one row per grid cell, header row first."""
    stream.write(",".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        if row.report is None:
            cells = [
                _fmt(row.tau_omega1),
                _fmt(row.beta_ratio),
                _fmt(row.epsilon),
                "nan", "nan", "nan", "nan", "nan",
                "failed", "nan", "nan", "1",
            ]
        else:
            r = row.report
            cells = [
                _fmt(row.tau_omega1),
                _fmt(row.beta_ratio),
                _fmt(row.epsilon),
                _fmt(r.Q),
                _fmt(r.W),
                _fmt(r.eta),
                _fmt(r.eta_adiabatic),
                _fmt(r.power),
                r.mode,
                _fmt(r.E_F_A),
                _fmt(r.E_F_C),
                "1" if r.tail_warning else "0",
            ]
        stream.write(",".join(cells) + "\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")
