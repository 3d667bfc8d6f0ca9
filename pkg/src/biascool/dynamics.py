"""Exact Gaussian-state propagation under the time-dependent quadratic Hamiltonian.

The resonator state is thermal at t = 0 and the Hamiltonian stays
quadratic with zero drive, so the first moments vanish for all time and
the state is fully described by the second moments (<x^2>, <p^2>,
<xp+px>/2).  Everything in this module is in reduced units: time in
1/omega_m, x in sqrt(hbar/(m omega_m)), p in sqrt(hbar m omega_m),
squared frequencies in omega_m^2 (so hbar = m = omega_m = 1 here).

Three independent code paths cover the same dynamics:

* ``propagate_transfer`` -- primary.  Builds the classical 2x2
  fundamental matrix with an adaptive 4th-order Magnus scheme whose
  elementary step is a closed-form exponential of a traceless matrix,
  so each step is unimodular to rounding and the symplectic invariants
  are conserved structurally, not by luck of the tolerance.
* ``propagate_covariance_ode`` -- oracle.  Integrates the moment ODEs
  directly with scipy's DOP853; shares no integration code with the
  transfer path.
* ``solve_ermakov_forward`` -- the auxiliary nonlinear equation, used
  to close the design/simulate loop and for the perturbation study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import thermometry
from .design import ControlTrajectory
from .integrate import IntegrationError, RKResult, solve_rk
from .physical import PhysicalParams

FrequencyProfile = Callable[[float], float]


class StateError(ValueError):
    """A Gaussian state violates positivity or the uncertainty bound."""


@dataclass(frozen=True)
class GaussianState:
    """Second moments of the resonator at one instant, reduced units."""

    xx: float
    pp: float
    xp: float = 0.0
    time: float = 0.0

    def __post_init__(self) -> None:
        if not (self.xx > 0.0 and self.pp > 0.0):
            raise StateError(f"moments must be positive: xx={self.xx!r}, pp={self.pp!r}")

    @property
    def purity_invariant(self) -> float:
        """det of the covariance matrix, xx*pp - xp^2; >= 1/4 for physical states."""
        return self.xx * self.pp - self.xp * self.xp

    def validate(self) -> None:
        if self.purity_invariant < 0.25 * (1.0 - 1e-9):
            raise StateError(
                f"uncertainty product {self.purity_invariant!r} below the minimum 1/4"
            )

    def at_time(self, time: float) -> "GaussianState":
        return replace(self, time=time)


@dataclass(frozen=True)
class TransferMatrix:
    """Classical phase-space map (x, p) over a time interval; det = 1."""

    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def apply(self, state: GaussianState, time: float | None = None) -> GaussianState:
        """Map second moments forward: Sigma -> M Sigma M^T."""
        xx, pp, xp = state.xx, state.pp, state.xp
        a, b, c, d = self.m11, self.m12, self.m21, self.m22
        return GaussianState(
            xx=a * a * xx + 2.0 * a * b * xp + b * b * pp,
            pp=c * c * xx + 2.0 * c * d * xp + d * d * pp,
            xp=a * c * xx + (a * d + b * c) * xp + b * d * pp,
            time=state.time if time is None else time,
        )


def thermal_state(params: PhysicalParams, omega_sq: float, temperature: float) -> GaussianState:
    """Thermal second moments at reduced squared frequency ``omega_sq``.

    xx = (nbar + 1/2)/omega, pp = (nbar + 1/2) omega, xp = 0, with the
    Bose occupation evaluated at the SI frequency.
    """
    if not omega_sq > 0.0:
        raise StateError(f"no thermal state at omega_sq = {omega_sq!r} <= 0")
    if not temperature > 0.0:
        raise StateError(f"temperature must be positive, got {temperature!r}")
    omega = math.sqrt(omega_sq)
    nbar = thermometry.thermal_occupation(omega * params.bare_frequency, temperature)
    state = GaussianState(xx=(nbar + 0.5) / omega, pp=(nbar + 0.5) * omega)
    state.validate()
    return state


def _profile(traj: ControlTrajectory | FrequencyProfile) -> FrequencyProfile:
    if isinstance(traj, ControlTrajectory):
        return traj.frequency_sq_fn()
    return traj


# --- transfer-matrix propagation -------------------------------------------

_GAUSS_LO = 0.5 - math.sqrt(3.0) / 6.0
_GAUSS_HI = 0.5 + math.sqrt(3.0) / 6.0
_COMM = math.sqrt(3.0) / 12.0


def _exp_traceless(a: float, b: float, c: float) -> tuple[float, float, float, float]:
    """exp of [[a, b], [c, -a]] via cosh/sinh(sqrt(a^2 + bc)); unit det."""
    delta = a * a + b * c
    if delta > 1e-12:
        rt = math.sqrt(delta)
        ch = math.cosh(rt)
        sh = math.sinh(rt) / rt
    elif delta < -1e-12:
        rt = math.sqrt(-delta)
        ch = math.cos(rt)
        sh = math.sin(rt) / rt
    else:
        ch = 1.0 + 0.5 * delta * (1.0 + delta / 12.0)
        sh = 1.0 + delta / 6.0 * (1.0 + delta / 20.0)
    return (ch + sh * a, sh * b, sh * c, ch - sh * a)


def _magnus4_step(w: FrequencyProfile, t: float, h: float) -> tuple[float, float, float, float]:
    """4th-order Magnus step for x' = p, p' = -w(t) x (two-point Gauss)."""
    w1 = w(t + _GAUSS_LO * h)
    w2 = w(t + _GAUSS_HI * h)
    a = _COMM * h * h * (w2 - w1)
    return _exp_traceless(a, h, -0.5 * h * (w1 + w2))


def _mmul(A, B):
    a11, a12, a21, a22 = A
    b11, b12, b21, b22 = B
    return (
        a11 * b11 + a12 * b21,
        a11 * b12 + a12 * b22,
        a21 * b11 + a22 * b21,
        a21 * b12 + a22 * b22,
    )


def _integrate_transfer(
    w: FrequencyProfile,
    t0: float,
    t1: float,
    tol: float,
    samples: Sequence[float] | None = None,
) -> tuple[list[tuple[float, float, float, float]], tuple[float, float, float, float]]:
    """Accumulate the fundamental matrix; emit it at each sample time.

    Step-doubling Richardson control: the accepted update is the pair of
    half steps (each an exact unit-det exponential); the coarse full step
    only feeds the error estimate.  Off-diagonal errors are weighted by
    the local frequency so the estimate is balanced for large omega.

    Sample emission never alters the marching step sequence: interior
    samples are reached by a single interpolating sub-step off the last
    accepted point, so the final matrix is bit-identical with or without
    sampling (series end points, one-shot propagation, and sweep cells
    must agree exactly).
    """
    span = t1 - t0
    if not span > 0.0:
        raise ValueError("require t1 > t0")
    targets = [float(v) for v in samples] if samples is not None else []
    for a, b in zip(targets, targets[1:]):
        if not b > a:
            raise ValueError("samples must be strictly ascending")
    if targets and (targets[0] <= t0 or targets[-1] > t1 * (1 + 1e-15)):
        raise ValueError("samples must lie in (t0, t1]")

    t = t0
    M = (1.0, 0.0, 0.0, 1.0)
    emitted: list[tuple[float, float, float, float]] = []
    next_target = 0
    h = span * 1e-4
    max_phase = 1.5  # keep per-step phase below the Magnus convergence radius

    while t < t1:
        if h <= abs(t) * 1e-15 + span * 1e-16:
            raise IntegrationError("transfer-matrix step size underflow", t)
        h_try = min(h, t1 - t)
        wmid = w(t + 0.5 * h_try)
        wscale = math.sqrt(max(abs(wmid), 1.0))
        if wscale * h_try > max_phase:
            h_try = max_phase / wscale
        clipped = h_try < h

        coarse = _magnus4_step(w, t, h_try)
        half = 0.5 * h_try
        fine = _mmul(_magnus4_step(w, t + half, half), _magnus4_step(w, t, half))
        err = (
            max(
                abs(fine[0] - coarse[0]),
                abs(fine[3] - coarse[3]),
                abs(fine[1] - coarse[1]) * wscale,
                abs(fine[2] - coarse[2]) / wscale,
            )
            / 15.0
        )

        accepted = err <= tol  # NaN error estimates reject
        if accepted:
            t_new = t + h_try
            M_new = _mmul(fine, M)
            while next_target < len(targets) and targets[next_target] <= t_new * (1 + 1e-15):
                target = targets[next_target]
                if target >= t_new * (1 - 1e-15):
                    emitted.append(M_new)
                else:
                    emitted.append(_mmul(_magnus4_step(w, t, target - t), M))
                next_target += 1
            t = t_new
            M = M_new
        if not math.isfinite(err):
            factor = 0.2
        elif err > 0.0:
            factor = 0.9 * (tol / err) ** 0.2
        else:
            factor = 5.0
        h_new = h_try * min(5.0, max(0.2, factor))
        h = max(h_new, h) if (clipped and accepted) else h_new

    return emitted, M


def propagate_transfer(
    traj: ControlTrajectory | FrequencyProfile,
    state0: GaussianState,
    t0: float,
    t1: float,
    tol: float = 1e-10,
) -> tuple[GaussianState, TransferMatrix]:
    """Propagate second moments from t0 to t1; also return the phase-space map.

    Inverted-potential windows (omega_eff^2 < 0) need no special
    handling: the elementary exponential simply goes hyperbolic.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    w = _profile(traj)
    _, m = _integrate_transfer(w, t0, t1, tol)
    matrix = TransferMatrix(*m)
    return matrix.apply(state0, time=t1), matrix


def transfer_series(
    traj: ControlTrajectory | FrequencyProfile,
    state0: GaussianState,
    times: Sequence[float],
    tol: float = 1e-10,
) -> tuple[list[GaussianState], TransferMatrix]:
    """States at the given times (ascending, starting at state0.time).

    The first entry of ``times`` must equal the state's own time; the
    corresponding output is state0 itself.
    """
    times = [float(v) for v in times]
    if not times or not math.isclose(times[0], state0.time, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("times must start at the state's own time")
    w = _profile(traj)
    emitted, m = _integrate_transfer(w, times[0], times[-1], tol, samples=times[1:])
    states = [state0]
    for t, mat in zip(times[1:], emitted):
        states.append(TransferMatrix(*mat).apply(state0, time=t))
    return states, TransferMatrix(*m)


# --- covariance-ODE oracle ---------------------------------------------------


def propagate_covariance_ode(
    traj: ControlTrajectory | FrequencyProfile,
    state0: GaussianState,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    t_eval: Sequence[float] | None = None,
) -> GaussianState | list[GaussianState]:
    """Independent oracle: integrate d/dt (xx, xp, pp) = (2 xp, pp - w xx, -2 w xp).

    Returns the final state, or the states at ``t_eval`` when given.
    Sampling integrates segment by segment so every sample carries full
    marching accuracy (the dense-output interpolant would not).
    Structurally disjoint from the transfer path: different equations,
    different integrator.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    w = _profile(traj)

    def rhs(t, y):
        xx, xp, pp = y
        wt = w(t)
        return (2.0 * xp, pp - wt * xx, -2.0 * wt * xp)

    scale = max(state0.xx, state0.pp, abs(state0.xp))

    def march(y, a, b):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=tol, atol=tol * scale)
        if not sol.success:
            raise IntegrationError(f"covariance ODE failed: {sol.message}", float(sol.t[-1]))
        return tuple(float(v) for v in sol.y[:, -1])

    if t_eval is None:
        xx, xp, pp = march((state0.xx, state0.xp, state0.pp), t0, t1)
        return GaussianState(xx=xx, pp=pp, xp=xp, time=t1)

    states = []
    y = (state0.xx, state0.xp, state0.pp)
    t_prev = t0
    for t in t_eval:
        t = float(t)
        if not t > t_prev:
            raise ValueError("t_eval must be strictly ascending and start after t0")
        y = march(y, t_prev, t)
        states.append(GaussianState(xx=y[0], pp=y[2], xp=y[1], time=t))
        t_prev = t
    return states


# --- auxiliary (Ermakov) equation -------------------------------------------


@dataclass(frozen=True)
class ErmakovResult:
    """Sampled auxiliary scale factor; last entry is the end point."""

    t: np.ndarray
    b: np.ndarray
    b_dot: np.ndarray

    @property
    def b_final(self) -> float:
        return float(self.b[-1])

    @property
    def b_dot_final(self) -> float:
        return float(self.b_dot[-1])


def solve_ermakov_forward(
    traj: ControlTrajectory | FrequencyProfile,
    b0: float,
    bdot0: float,
    omega0_sq: float,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    t_eval: Sequence[float] | None = None,
) -> ErmakovResult:
    """Integrate b'' + w(t) b = omega0_sq / b^3 forward from (b0, bdot0).

    Aborts with IntegrationError if b approaches the b = 0 singularity
    (within 1e-6).
    """
    if not b0 > 0.0:
        raise ValueError(f"b0 must be positive, got {b0!r}")
    w = _profile(traj)

    def rhs(t, y):
        b, bd = y
        return (bd, omega0_sq / (b * b * b) - w(t) * b)

    def guard(t, y):
        if y[0] < 1e-6:
            raise IntegrationError(f"auxiliary scale factor b = {y[0]:.3e} hit the singularity", t)

    result: RKResult = solve_rk(
        rhs, t0, (b0, bdot0), t1, rtol=tol, atol=tol, t_eval=t_eval, guard=guard
    )
    return ErmakovResult(result.t, result.y[:, 0].copy(), result.y[:, 1].copy())


def invariant_expectation(state: GaussianState, omega0_sq: float, b: float, b_dot: float) -> float:
    """Expectation of the quadratic dynamical invariant for the given scale factor.

    <I> = (omega0^2/2) xx/b^2 + (1/2)(b^2 pp - 2 b b' xp + b'^2 xx) in
    reduced units; constant along a trajectory designed with that b(t).
    """
    return 0.5 * (
        omega0_sq * state.xx / (b * b)
        + b * b * state.pp
        - 2.0 * b * b_dot * state.xp
        + b_dot * b_dot * state.xx
    )
