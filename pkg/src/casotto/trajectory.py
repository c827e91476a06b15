"""Wall-motion profiles and their analytic derivatives.

A :class:`Trajectory` is the dimensionless displacement profile ``delta(t)``
of the moving wall, normalised so that a full compression stroke runs from
``delta = 0`` to ``delta = 1``.  Profiles carry analytic evaluators for the
first three time derivatives: the friction bound integrates the third
derivative, and differentiating a sampled profile twice numerically would
dominate the error budget.

Families provided here:

* :func:`quintic` - the lowest-order polynomial with vanishing velocity and
  acceleration at both ends.
* :func:`shortcut` - the echo-type profile ``ddelta(t) = (Gdot(t+L0) -
  Gdot(t-L0)) / (2 L0)`` whose spectral amplitudes vanish at every multiple
  of ``pi/L0``, so the second-order friction energy cancels: photons created
  early in the stroke are reabsorbed before it ends.
* :func:`from_samples` - smooth interpolation of a user-supplied sampled
  profile (approximate; see the loosened derivative guarantee below).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Trajectory",
    "BoundaryReport",
    "quintic",
    "check_boundary_conditions",
    "reverse",
    "shortcut",
    "from_samples",
]

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    """Dimensionless wall profile with analytic derivatives on [t_start, t_end].

    ``delta``, ``ddelta``, ``d2delta``, ``d3delta`` evaluate the profile and
    its first three time derivatives; all accept numpy arrays.  ``idelta``,
    when present, is the running integral of ``delta`` from ``t_start``
    (used to build shortcut profiles from a ramp).  ``breakpoints`` lists
    interior times where piecewise-defined profiles lose smoothness so that
    quadrature can align panel edges with them.
    """

    t_start: float
    t_end: float
    delta: Evaluator
    ddelta: Evaluator
    d2delta: Evaluator
    d3delta: Evaluator
    label: str = "trajectory"
    idelta: Evaluator | None = None
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ValueError("trajectory domain must be finite")
        if not self.t_end > self.t_start:
            raise ValueError(
                f"empty trajectory domain [{self.t_start}, {self.t_end}]"
            )

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def displacement(self) -> float:
        """Net displacement delta(t_end) - delta(t_start)."""
        ends = self.delta(np.array([self.t_start, self.t_end]))
        return float(ends[1] - ends[0])


@dataclass(frozen=True)
class BoundaryReport:
    """Endpoint checks for cycle-grade profiles (all within ``tol``).

    start_value/start_velocity/start_acceleration: delta, ddelta, d2delta
    vanish at t_start.  end_velocity/end_acceleration: ddelta, d2delta vanish
    at t_end.  end_value: delta(t_end) = 1.
    """

    start_value: bool
    start_velocity: bool
    start_acceleration: bool
    end_velocity: bool
    end_acceleration: bool
    end_value: bool
    measured: dict[str, float]

    @property
    def all_pass(self) -> bool:
        return (
            self.start_value
            and self.start_velocity
            and self.start_acceleration
            and self.end_velocity
            and self.end_acceleration
            and self.end_value
        )


def _poly_eval(coeffs: Sequence[float], s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    for c in reversed(coeffs):
        out = out * s + c
    return out


def quintic(tau: float) -> Trajectory:
    """Smoothest fifth-order ramp: ``10 s**3 - 15 s**4 + 6 s**5``, s = t/tau.

    Velocity and acceleration vanish at both endpoints, making the profile
    eligible for the friction bound and for cycle strokes.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")

    def delta(t):
        s = np.asarray(t, dtype=float) / tau
        return _poly_eval((0.0, 0.0, 0.0, 10.0, -15.0, 6.0), s)

    def ddelta(t):
        s = np.asarray(t, dtype=float) / tau
        return _poly_eval((0.0, 0.0, 30.0, -60.0, 30.0), s) / tau

    def d2delta(t):
        s = np.asarray(t, dtype=float) / tau
        return _poly_eval((0.0, 60.0, -180.0, 120.0), s) / tau**2

    def d3delta(t):
        s = np.asarray(t, dtype=float) / tau
        return _poly_eval((60.0, -360.0, 360.0), s) / tau**3

    def idelta(t):
        s = np.asarray(t, dtype=float) / tau
        return _poly_eval((0.0, 0.0, 0.0, 0.0, 2.5, -3.0, 1.0), s) * tau

    return Trajectory(
        t_start=0.0,
        t_end=tau,
        delta=delta,
        ddelta=ddelta,
        d2delta=d2delta,
        d3delta=d3delta,
        label=f"quintic(tau={tau:g})",
        idelta=idelta,
    )


def check_boundary_conditions(traj: Trajectory, tol: float = 1e-9) -> BoundaryReport:
    """Verify the six endpoint conditions of a cycle-grade profile."""
    t0 = np.array([traj.t_start])
    t1 = np.array([traj.t_end])
    measured = {
        "start_value": float(traj.delta(t0)[0]),
        "start_velocity": float(traj.ddelta(t0)[0]),
        "start_acceleration": float(traj.d2delta(t0)[0]),
        "end_velocity": float(traj.ddelta(t1)[0]),
        "end_acceleration": float(traj.d2delta(t1)[0]),
        "end_value": float(traj.delta(t1)[0]),
    }
    return BoundaryReport(
        start_value=abs(measured["start_value"]) <= tol,
        start_velocity=abs(measured["start_velocity"]) <= tol,
        start_acceleration=abs(measured["start_acceleration"]) <= tol,
        end_velocity=abs(measured["end_velocity"]) <= tol,
        end_acceleration=abs(measured["end_acceleration"]) <= tol,
        end_value=abs(measured["end_value"] - 1.0) <= tol,
        measured=measured,
    )


def reverse(traj: Trajectory) -> Trajectory:
    """Time-reversed profile ``delta(t_end + t_start - t)`` on the same domain.

    Odd derivatives flip sign; reversing twice restores the original
    pointwise.
    """
    t0, t1 = traj.t_start, traj.t_end
    pivot = t0 + t1

    def flip(g: Evaluator, sign: float) -> Evaluator:
        def wrapped(t):
            return sign * g(pivot - np.asarray(t, dtype=float))

        return wrapped

    return Trajectory(
        t_start=t0,
        t_end=t1,
        delta=flip(traj.delta, 1.0),
        ddelta=flip(traj.ddelta, -1.0),
        d2delta=flip(traj.d2delta, 1.0),
        d3delta=flip(traj.d3delta, -1.0),
        label=f"reversed({traj.label})",
        idelta=None,
        breakpoints=tuple(sorted(pivot - b for b in traj.breakpoints)),
    )


def shortcut(ramp: Trajectory, L0: float) -> Trajectory:
    """Friction-cancelling profile built from a monotone ramp.

    The ramp plays the role of the velocity shape ``Gdot`` on ``[0, tau]``;
    outside that interval it is extended by its endpoint values, so ``G`` is
    linear far from the stroke.  The resulting profile lives on
    ``[-L0, L0 + tau]`` with

        ddelta(t) = (Gdot(t + L0) - Gdot(t - L0)) / (2 L0 (r1 - r0))

    normalised to unit net displacement (the raw displacement of the
    construction is ``2 L0 (r1 - r0)``).  Every spectral amplitude of
    ``ddelta`` at a multiple of ``pi/L0`` vanishes identically: the two
    shifted copies acquire the same phase factor ``(-1)**n`` and cancel.

    The ramp must be flat at its own endpoints (its velocity there is the
    mismatch between the interior and the constant extension, which would
    put kinks in ``ddelta``), and its endpoint values must differ.
    """
    if not L0 > 0:
        raise ValueError(f"L0 must be positive, got {L0}")
    tau = ramp.duration
    t0 = ramp.t_start
    ends = ramp.delta(np.array([ramp.t_start, ramp.t_end]))
    r0, r1 = float(ends[0]), float(ends[1])
    slopes = ramp.ddelta(np.array([ramp.t_start, ramp.t_end]))
    if max(abs(float(slopes[0])), abs(float(slopes[1]))) > 1e-9:
        raise ValueError(
            "ramp exterior slopes differ from its endpoint derivatives: "
            "the constant extension would kink and ddelta would not vanish "
            "at the domain ends"
        )
    if abs(r1 - r0) < 1e-12:
        raise ValueError("ramp endpoint values coincide; zero net displacement")

    if ramp.idelta is None:
        # smooth antiderivative of the ramp via a dense clamped spline
        xs = np.linspace(ramp.t_start, ramp.t_end, 4001)
        spl = CubicSpline(xs, ramp.delta(xs), bc_type="clamped").antiderivative()

        def ramp_integral(x):
            return spl(np.asarray(x, dtype=float))

    else:
        ramp_integral = ramp.idelta

    norm = 2.0 * L0 * (r1 - r0)

    def gdot(x):
        x = np.asarray(x, dtype=float)
        inside = np.clip(x, ramp.t_start, ramp.t_end)
        return np.where(
            x < ramp.t_start, r0, np.where(x > ramp.t_end, r1, ramp.delta(inside))
        )

    def gval(x):
        x = np.asarray(x, dtype=float)
        inside = np.clip(x, ramp.t_start, ramp.t_end)
        core = ramp_integral(inside)
        left = r0 * (x - ramp.t_start)
        right = ramp_integral(np.asarray(ramp.t_end)) + r1 * (x - ramp.t_end)
        return np.where(x < ramp.t_start, left, np.where(x > ramp.t_end, right, core))

    def gderiv(order: int):
        g = {1: ramp.ddelta, 2: ramp.d2delta}[order]

        def wrapped(x):
            x = np.asarray(x, dtype=float)
            inside = np.clip(x, ramp.t_start, ramp.t_end)
            out = np.asarray(g(inside), dtype=float)
            return np.where((x < ramp.t_start) | (x > ramp.t_end), 0.0, out)

        return wrapped

    gdot1 = gderiv(1)
    gdot2 = gderiv(2)

    lo = t0 - L0
    hi = t0 + tau + L0
    offset = float(gval(np.asarray(lo + L0)) - gval(np.asarray(lo - L0)))

    def make(evaluator, shift=0.0):
        def profile(t):
            t = np.asarray(t, dtype=float)
            return (evaluator(t + L0) - evaluator(t - L0) - shift) / norm

        return profile
    knots = {t0 - L0, t0 + tau - L0, t0 + L0, t0 + tau + L0}
    interior = tuple(sorted(k for k in knots if lo < k < hi))
    return Trajectory(
        t_start=lo,
        t_end=hi,
        delta=make(gval, shift=offset),
        ddelta=make(gdot),
        d2delta=make(gdot1),
        d3delta=make(gdot2),
        label=f"shortcut({ramp.label}, L0={L0:g})",
        idelta=None,
        breakpoints=interior,
    )


def from_samples(source: str | Path | io.TextIOBase, label: str | None = None) -> Trajectory:
    """Build a profile from a two-column delimited text file ``t, delta``.

    Comma-separated, ``#`` starts a comment, times strictly increasing.  The
    samples are interpolated by a clamped cubic spline (endpoint velocity
    zero), so derivatives are approximate: the analytic-vs-finite-difference
    agreement is only guaranteed to about 1e-3 instead of the 1e-6 of the
    closed-form families.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
        label = label or str(source)
    else:
        text = source.read()
        label = label or "sampled"
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p for p in line.split(",") if p.strip()]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 't, delta', got {raw!r}")
        rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 4:
        raise ValueError("need at least 4 samples for a cubic profile")
    t = np.array([r[0] for r in rows])
    d = np.array([r[1] for r in rows])
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")

    spl = CubicSpline(t, d, bc_type="clamped")
    der = [spl.derivative(m) for m in (1, 2, 3)]

    def ev(fn):
        def wrapped(x):
            return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)

        return wrapped

    return Trajectory(
        t_start=float(t[0]),
        t_end=float(t[-1]),
        delta=ev(spl),
        ddelta=ev(der[0]),
        d2delta=ev(der[1]),
        d3delta=ev(der[2]),
        label=label,
        idelta=ev(spl.antiderivative()),
        breakpoints=tuple(float(x) for x in t[1:-1]),
    )


def scaled_to_unit_displacement(traj: Trajectory) -> Trajectory:
    """Rescale a profile so that its net displacement is exactly 1."""
    disp = traj.displacement()
    if abs(disp) < 1e-12:
        raise ValueError("cannot normalise a profile with zero net displacement")

    def scale(g: Evaluator) -> Evaluator:
        def wrapped(t):
            return g(t) / disp

        return wrapped

    return replace(
        traj,
        delta=scale(traj.delta),
        ddelta=scale(traj.ddelta),
        d2delta=scale(traj.d2delta),
        d3delta=scale(traj.d3delta),
        idelta=scale(traj.idelta) if traj.idelta is not None else None,
        label=f"unit({traj.label})",
    )
