"""Device parameters and the electrostatic model of the biased resonator.

A charged beam sits midway between two gate electrodes a distance ``d``
away on either side.  Charging the gates to ``U = U0 * f(t)`` stiffens
(or softens) the beam's motion; to quadratic order in ``x/d`` the bias
acts as a parabolic potential that shifts the squared eigenfrequency to

    omega_eff^2 = omega_m^2 * (1 + eta * f(t)),

with the dimensionless coupling ``eta = 4 k C0 U0 Q / (m omega_m^2 d^3)``.

This module is the only place units are converted: parameters are stored
in SI, and every accepted input unit is listed in :data:`FIELD_UNITS`.
All other modules work either in SI scalars taken from here or in
reduced units (frequencies squared in omega_m^2, time in 1/omega_m).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from functools import cached_property

from .constants import COULOMB_K_DEFAULT, ELEMENTARY_CHARGE


class ParameterError(ValueError):
    """A physical parameter is missing, malformed, or out of domain."""


_TWO_PI = 2.0 * math.pi

# Accepted unit suffixes per field, as factors to the SI value.  Angular
# frequencies are stored in rad/s; plain-frequency suffixes include the
# 2*pi.  A missing suffix means the value is already in the SI column.
FIELD_UNITS: dict[str, dict[str, float]] = {
    "coulomb_k": {"": 1.0},
    "capacitance": {"": 1.0, "F": 1.0, "uF": 1e-6, "nF": 1e-9, "pF": 1e-12, "fF": 1e-15},
    "voltage_amplitude": {"": 1.0, "V": 1.0, "mV": 1e-3, "kV": 1e3},
    "charge_density": {
        "": 1.0,
        "/m^2": 1.0,
        "1/m^2": 1.0,
        "m^-2": 1.0,
        "/cm^2": 1e4,
        "1/cm^2": 1e4,
        "cm^-2": 1e4,
    },
    "charge_area": {"": 1.0, "m^2": 1.0, "um^2": 1e-12, "nm^2": 1e-18},
    "resonator_charge": {"": 1.0, "C": 1.0, "e": ELEMENTARY_CHARGE},
    "mass": {"": 1.0, "kg": 1.0, "g": 1e-3, "ug": 1e-9, "ng": 1e-12, "pg": 1e-15, "fg": 1e-18},
    "bare_frequency": {
        "": 1.0,
        "rad/s": 1.0,
        "Hz": _TWO_PI,
        "kHz": _TWO_PI * 1e3,
        "MHz": _TWO_PI * 1e6,
        "GHz": _TWO_PI * 1e9,
    },
    "separation": {"": 1.0, "m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "bath_temperature": {"": 1.0, "K": 1.0, "mK": 1e-3, "uK": 1e-6},
}


def convert_to_si(field: str, value: float, unit: str = "") -> float:
    """Convert ``value`` with unit suffix ``unit`` to the SI value of ``field``."""
    try:
        table = FIELD_UNITS[field]
    except KeyError:
        raise ParameterError(f"unknown parameter field {field!r}") from None
    try:
        factor = table[unit]
    except KeyError:
        accepted = ", ".join(repr(u) for u in table if u)
        raise ParameterError(
            f"unsupported unit {unit!r} for {field}; accepted: {accepted or 'SI only'}"
        ) from None
    return value * factor


def parse_quantity(field: str, text: str) -> float:
    """Parse ``"<number> [unit]"`` into the SI value of ``field``."""
    parts = text.strip().split(None, 1)
    if not parts:
        raise ParameterError(f"empty value for {field}")
    try:
        value = float(parts[0])
    except ValueError:
        raise ParameterError(f"cannot parse number {parts[0]!r} for {field}") from None
    unit = parts[1].strip() if len(parts) == 2 else ""
    return convert_to_si(field, value, unit)


@dataclass(frozen=True)
class PhysicalParams:
    """Device constants in SI units.

    ``resonator_charge`` can be given directly or derived from the surface
    charge density and charged area; use :meth:`create` for that logic.
    """

    coulomb_k: float = COULOMB_K_DEFAULT  # N m^2/C^2
    capacitance: float = 0.0  # F
    voltage_amplitude: float = 0.0  # V
    charge_density: float = 0.0  # 1/m^2
    charge_area: float = 0.0  # m^2
    resonator_charge: float = 0.0  # C
    mass: float = 0.0  # kg
    bare_frequency: float = 0.0  # rad/s
    separation: float = 0.0  # m
    bath_temperature: float = 0.0  # K

    def __post_init__(self) -> None:
        for name in ("capacitance", "mass", "bare_frequency", "separation", "bath_temperature"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be strictly positive, got {getattr(self, name)!r}")

    @classmethod
    def create(
        cls,
        *,
        coulomb_k: float = COULOMB_K_DEFAULT,
        capacitance: float,
        voltage_amplitude: float,
        mass: float,
        bare_frequency: float,
        separation: float,
        bath_temperature: float,
        charge_density: float = 0.0,
        charge_area: float = 0.0,
        resonator_charge: float | None = None,
    ) -> "PhysicalParams":
        """Build params, deriving the total charge from (density, area) if needed.

        If both a direct charge and (density, area) are supplied, the direct
        value wins; a warning is emitted when the two disagree by more than
        1e-9 relative.
        """
        derived = ELEMENTARY_CHARGE * charge_density * charge_area
        if resonator_charge is None:
            charge = derived
        else:
            charge = resonator_charge
            if derived != 0.0 and not math.isclose(derived, charge, rel_tol=1e-9):
                warnings.warn(
                    "resonator_charge %.6e C overrides the value %.6e C derived "
                    "from charge_density * charge_area" % (charge, derived),
                    stacklevel=2,
                )
        return cls(
            coulomb_k=coulomb_k,
            capacitance=capacitance,
            voltage_amplitude=voltage_amplitude,
            charge_density=charge_density,
            charge_area=charge_area,
            resonator_charge=charge,
            mass=mass,
            bare_frequency=bare_frequency,
            separation=separation,
            bath_temperature=bath_temperature,
        )

    @cached_property
    def eta(self) -> float:
        """Dimensionless electrostatic coupling 4 k C0 U0 Q / (m omega_m^2 d^3)."""
        return compute_eta(self)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def compute_eta(params: PhysicalParams) -> float:
    """Coupling strength between the gate bias and the squared eigenfrequency."""
    num = 4.0 * params.coulomb_k * params.capacitance * params.voltage_amplitude
    num *= params.resonator_charge
    den = params.mass * params.bare_frequency**2 * params.separation**3
    return num / den


def coulomb_potential_exact(params: PhysicalParams, f: float, x: float) -> float:
    """Two-electrode electrostatic energy k C0 U0 f Q (1/(d+x) + 1/(d-x)), in J.

    Valid only while the beam stays between the electrodes (|x| < d).
    """
    d = params.separation
    if not abs(x) < d:
        raise ParameterError(f"|x| = {abs(x):.6e} m must be below the separation {d:.6e} m")
    scale = params.coulomb_k * params.capacitance * params.voltage_amplitude * f
    return scale * params.resonator_charge * (1.0 / (d + x) + 1.0 / (d - x))


def coulomb_potential_quadratic(params: PhysicalParams, f: float, x: float) -> float:
    """Harmonic part 2 k C0 U0 Q f x^2 / d^3 of the electrode potential, in J.

    The x-independent offset 2 k C0 U0 Q f / d is dropped: it commutes with
    x and p and never feeds back on the motion, so energies from this
    function are relative to it.
    """
    scale = 2.0 * params.coulomb_k * params.capacitance * params.voltage_amplitude
    return scale * params.resonator_charge * f * x * x / params.separation**3


def effective_frequency_sq(params: PhysicalParams, f: float) -> float:
    """Signed squared effective frequency omega_m^2 (1 + eta f), in rad^2/s^2.

    Negative values (inverted potential, transiently imaginary frequency)
    are legitimate outputs and are handled by the propagators downstream.
    """
    return params.bare_frequency**2 * (1.0 + params.eta * f)
