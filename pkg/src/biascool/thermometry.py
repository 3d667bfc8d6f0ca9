"""Occupation numbers and effective temperatures of the resonator.

For thermal states the mean occupation is the Bose factor
nbar = 1/(exp(hbar omega / kB T) - 1); for the non-stationary Gaussian
states produced mid-ramp it is extended energetically as
nbar = E/(hbar omega_ref) - 1/2, which coincides with the Bose form on
thermal states.  The effective temperature inverts the Bose factor at a
chosen reference frequency.

SI in, SI out for the frequency/temperature functions; the state-based
functions live in reduced units like the states themselves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .constants import BOLTZMANN, HBAR

if TYPE_CHECKING:  # avoids a circular import; only needed for annotations
    from .dynamics import GaussianState


class ThermometryError(ValueError):
    """Occupation or temperature request outside the physical domain."""


@dataclass(frozen=True)
class ThermometryRecord:
    """One row of the cooling diagnostics time series (reduced units + K)."""

    time: float  # 1/omega_m
    ref_omega_sq: float  # omega_m^2
    n_bar: float
    t_eff: float  # kelvin
    state_omega_sq: float  # pp/xx, omega_m^2


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation 1/(exp(hbar omega / kB T) - 1); omega in rad/s, T in K."""
    if not omega > 0.0:
        raise ThermometryError(f"omega must be positive, got {omega!r}")
    if not temperature > 0.0:
        raise ThermometryError(f"temperature must be positive, got {temperature!r}")
    x = HBAR * omega / (BOLTZMANN * temperature)
    if x > 700.0:  # expm1 would overflow; occupation is exp(-x) to full precision
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def effective_temperature(omega: float, n_bar: float) -> float:
    """Temperature at which a thermal state at ``omega`` has occupation ``n_bar``.

    T = hbar omega / (kB ln(1 + 1/nbar)).  By convention n_bar = 0 maps
    to T = 0 (the inversion limit), not an error.
    """
    if not omega > 0.0:
        raise ThermometryError(f"omega must be positive, got {omega!r}")
    if n_bar < 0.0:
        raise ThermometryError(f"n_bar must be non-negative, got {n_bar!r}")
    if n_bar == 0.0:
        return 0.0
    return HBAR * omega / (BOLTZMANN * math.log1p(1.0 / n_bar))


def occupation_from_state(state: "GaussianState", ref_omega_sq: float, mass: float = 1.0) -> float:
    """Energy-referenced occupation E/omega_ref - 1/2, reduced units.

    E = pp/(2 m) + m omega_ref^2 xx / 2.  Tiny negative results (above
    -1e-9) are rounding on a ground state and clamp silently to 0;
    anything more negative clamps with a warning.
    """
    if not ref_omega_sq > 0.0:
        raise ThermometryError(f"ref_omega_sq must be positive, got {ref_omega_sq!r}")
    omega_ref = math.sqrt(ref_omega_sq)
    energy = 0.5 * (state.pp / mass + mass * ref_omega_sq * state.xx)
    n_bar = energy / omega_ref - 0.5
    if n_bar < 0.0:
        if n_bar < -1e-9:
            warnings.warn(
                f"occupation {n_bar:.3e} below the rounding budget; clamping to 0",
                stacklevel=2,
            )
        return 0.0
    return n_bar


def state_frequency(state: "GaussianState", mass: float = 1.0) -> float:
    """Squared frequency pp/(m^2 xx) a stationary thermal state would have.

    Matches omega^2 for a thermal state at omega; for squeezed states it
    is one possible frequency assignment among several (reported, never
    asserted against, in the perturbation study).
    """
    return state.pp / (mass * mass * state.xx)
