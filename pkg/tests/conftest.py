import math

import pytest

from biascool.physical import PhysicalParams

# Default device (text parameter set).  Golden values below were computed
# with a 40-digit mpmath evaluation of the same closed forms and frozen;
# the per-test oracles recompute the non-trivial ones.
ETA_DEFAULT = 12511321.855218202
CHI_DEFAULT = 59.473816398596957
OMEGA0_DEFAULT = 3537.1348370140203  # sqrt(1 + eta), in omega_m
NBAR_HOT = 3109.4431814367543  # occupation at omega_m, 20 mK
NBAR_COLD = 0.47202441093788376  # occupation at omega_0, 20 mK
TEFF_FINAL = 5.6542939191098541e-6  # K, occupation NBAR_COLD at omega_m

OMEGA_M_SI = 2.0 * math.pi * 134e3


def make_params(**overrides) -> PhysicalParams:
    kwargs = dict(
        coulomb_k=8.988e9,
        capacitance=27.5e-9,
        voltage_amplitude=7.00,
        charge_density=1.25e13 * 1e4,  # 1.25e13 / cm^2
        charge_area=0.08e-12,  # 0.08 um^2
        mass=40e-15,  # 40 pg
        bare_frequency=OMEGA_M_SI,
        separation=3.15e-6,  # 3.15 um
        bath_temperature=20e-3,  # 20 mK
    )
    kwargs.update(overrides)
    return PhysicalParams.create(**kwargs)


def make_params_eta(eta: float) -> PhysicalParams:
    """Default device with the charge tuned to hit a coupling exactly."""
    base = make_params()
    charge = eta * base.mass * base.bare_frequency**2 * base.separation**3
    charge /= 4.0 * base.coulomb_k * base.capacitance * base.voltage_amplitude
    return make_params(charge_density=0.0, charge_area=0.0, resonator_charge=charge)


@pytest.fixture(scope="session")
def device_params() -> PhysicalParams:
    return make_params()
