"""Inverse-engineered bias ramps that preserve the oscillator occupation.

The ramp is built around the Ermakov auxiliary equation

    b'' + omega_eff^2(t) b = omega_0^2 / b^3 ,

whose solution b(t) sets the width of the dynamically invariant mode.
Choosing b as the quintic "smoothstep" that goes from b=1 (oscillator
locked to the initial frequency omega_0) to b=chi with vanishing first
and second derivatives at both ends makes the invariant coincide with
the Hamiltonian at the endpoints, so a state that starts thermal at
omega_0 arrives thermal at the target frequency with the same mean
occupation.  Solving the Ermakov equation for omega_eff^2 and mapping
through omega_eff^2 = omega_m^2 (1 + eta f) yields the gate drive f(t).

Everything here is closed form; all quantities are in reduced units
(time in 1/omega_m, squared frequencies in omega_m^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .physical import PhysicalParams


class DesignError(ValueError):
    """Trajectory request outside the designable domain."""


@dataclass(frozen=True)
class TrajectorySpec:
    """Boundary data of one ramp, in reduced units.

    chi is redundant with the frequency ratio (chi^4 = omega0_sq /
    omega_final_sq) and is validated to 1e-12 relative on construction;
    build instances through :meth:`create` rather than by hand.
    """

    omega0_sq: float
    omega_final_sq: float
    t_final: float
    chi: float

    def __post_init__(self) -> None:
        if not (self.omega0_sq > 0.0 and self.omega_final_sq > 0.0):
            raise DesignError("boundary frequencies squared must be positive")
        if not self.t_final > 0.0:
            raise DesignError(f"t_final must be positive, got {self.t_final!r}")
        if not math.isclose(self.chi**4 * self.omega_final_sq, self.omega0_sq, rel_tol=1e-12):
            raise DesignError("chi is inconsistent with the boundary frequencies")

    @classmethod
    def create(cls, omega0_sq: float, omega_final_sq: float, t_final: float) -> "TrajectorySpec":
        if not (omega0_sq > 0.0 and omega_final_sq > 0.0):
            raise DesignError("boundary frequencies squared must be positive")
        chi = (omega0_sq / omega_final_sq) ** 0.25
        return cls(omega0_sq, omega_final_sq, t_final, chi)


@dataclass(frozen=True)
class ControlTrajectory:
    """A designed gate drive f(t) for a device with coupling eta.

    f_scale multiplies the nominal drive; it is 1 for as-designed ramps
    and 1 + epsilon for the perturbed ramps of the robustness study, in
    which case the boundary metadata in ``spec`` is nominal only (see
    :attr:`boundary_consistent`).
    """

    spec: TrajectorySpec
    eta: float
    f_scale: float = 1.0

    @property
    def t_final(self) -> float:
        return self.spec.t_final

    @property
    def boundary_consistent(self) -> bool:
        """Whether f(t) still meets the designed boundary conditions."""
        return self.f_scale == 1.0

    def control(self, t):
        return control_function(self, t)

    def omega_eff_sq(self, t):
        return effective_frequency_profile(self, t)

    def frequency_sq_fn(self) -> Callable[[float], float]:
        """Fast scalar omega_eff^2(t) closure for the integrators."""
        c = self.spec.chi - 1.0
        t_f = self.spec.t_final
        om0sq = self.spec.omega0_sq
        eta = self.eta
        scale = self.f_scale

        def w(t: float) -> float:
            s = t / t_f
            b = ((6.0 * c * s - 15.0 * c) * s + 10.0 * c) * s * s * s + 1.0
            d2 = 60.0 * c * s * (2.0 * s - 1.0) * (s - 1.0) / (t_f * t_f)
            b4 = (b * b) * (b * b)
            f = (om0sq - b * b * b * d2 - b4) / (eta * b4)
            return 1.0 + eta * scale * f

        return w


def b_polynomial(s, chi: float):
    """Quintic scale-factor profile and its first two derivatives in s = t/t_f.

    b(s) = 6(chi-1)s^5 - 15(chi-1)s^4 + 10(chi-1)s^3 + 1 interpolates
    b(0)=1 to b(1)=chi with b' = b'' = 0 at both ends.  Derivatives are
    with respect to s; divide by t_f and t_f^2 for time derivatives.
    Accepts scalars or arrays; s must lie in [0, 1].
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0) or np.any(s_arr > 1.0):
        raise DesignError("s must lie in [0, 1]")
    c = chi - 1.0
    b = ((6.0 * c * s_arr - 15.0 * c) * s_arr + 10.0 * c) * s_arr**3 + 1.0
    db = 30.0 * c * s_arr**2 * (s_arr - 1.0) ** 2
    d2b = 60.0 * c * s_arr * (2.0 * s_arr - 1.0) * (s_arr - 1.0)
    if np.isscalar(s) or np.ndim(s) == 0:
        return float(b), float(db), float(d2b)
    return b, db, d2b


def make_spec(params: PhysicalParams, t_final: float) -> TrajectorySpec:
    """Ramp boundary data for the full protocol: start at full bias, end bare.

    With f = 1 at the start the squared start frequency is 1 + eta (in
    omega_m^2), and the target is the bare frequency, omega_final_sq = 1.
    """
    eta = params.eta
    if eta <= -1.0:
        raise DesignError(f"eta = {eta:.6g} <= -1: start frequency would not be real")
    if not t_final > 0.0:
        raise DesignError(f"t_final must be positive, got {t_final!r}")
    return TrajectorySpec.create(1.0 + eta, 1.0, t_final)


def make_trajectory(params: PhysicalParams, t_final: float) -> ControlTrajectory:
    """Designed drive for the full cooling ramp of a given device."""
    if params.eta == 0.0:
        raise DesignError("eta = 0: the gate drive has no effect, inverse design undefined")
    return ControlTrajectory(make_spec(params, t_final), params.eta)


def control_function(traj: ControlTrajectory, t):
    """Gate drive f(t) = (omega_0^2 - b^3 b'' - omega_m^2 b^4) / (eta b^4 omega_m^2).

    Evaluated in closed form from the quintic b; in reduced units
    omega_m^2 = 1.  The trajectory's f_scale multiplies the result.
    """
    if traj.eta == 0.0:
        raise DesignError("eta = 0: inverse design undefined")
    spec = traj.spec
    t_arr = np.asarray(t, dtype=float)
    b, _, d2b = b_polynomial(t_arr / spec.t_final, spec.chi)
    b_dd = np.asarray(d2b) / spec.t_final**2
    b = np.asarray(b)
    b4 = b**4
    f = traj.f_scale * (spec.omega0_sq - b**3 * b_dd - b4) / (traj.eta * b4)
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(f)
    return f


def effective_frequency_profile(traj: ControlTrajectory, t):
    """Squared effective frequency 1 + eta f(t), in omega_m^2 units.

    For the unperturbed ramp this equals omega_0^2/b^4 - b''/b by the
    Ermakov equation; both forms agree to rounding.
    """
    return 1.0 + traj.eta * control_function(traj, t)


@dataclass(frozen=True)
class TrajectoryValidation:
    """Closed-form sampling report for one trajectory."""

    n_samples: int
    max_abs_f: float  # over all samples, endpoints included
    max_abs_f_interior: float
    f_within_unit: bool  # |f| <= 1 at interior samples
    negative_omega_sq_windows: tuple[tuple[float, float], ...]
    boundary_residual_start: float  # |f(0) - f_scale|
    boundary_residual_end: float  # |f(t_f)|

    @property
    def ok(self) -> bool:
        return self.f_within_unit and not self.negative_omega_sq_windows


def validate_trajectory(traj: ControlTrajectory, n_samples: int = 2001) -> TrajectoryValidation:
    """Sample the closed-form drive and report amplitude and sign diagnostics.

    Report-only: the drive may legitimately exceed |f| = 1 or push
    omega_eff^2 negative for aggressive ramp times; callers decide what
    to do with that.  Window edges are sample-resolution estimates.
    """
    if n_samples < 2:
        raise DesignError("n_samples must be at least 2")
    t = np.linspace(0.0, traj.t_final, n_samples)
    f = np.asarray(control_function(traj, t))
    w = 1.0 + traj.eta * f

    windows: list[tuple[float, float]] = []
    neg = w < 0.0
    i = 0
    while i < n_samples:
        if neg[i]:
            j = i
            while j + 1 < n_samples and neg[j + 1]:
                j += 1
            windows.append((float(t[i]), float(t[j])))
            i = j + 1
        else:
            i += 1

    interior = slice(1, -1)
    return TrajectoryValidation(
        n_samples=n_samples,
        max_abs_f=float(np.max(np.abs(f))),
        max_abs_f_interior=float(np.max(np.abs(f[interior]))) if n_samples > 2 else 0.0,
        f_within_unit=bool(np.all(np.abs(f[interior]) <= 1.0)) if n_samples > 2 else True,
        negative_omega_sq_windows=tuple(windows),
        boundary_residual_start=float(abs(f[0] - traj.f_scale)),
        boundary_residual_end=float(abs(f[-1])),
    )
