"""Fixed physical constants (2019 SI exact values where they exist).

Everything downstream of the parameter layer works in reduced units
(time in 1/omega_m, lengths in sqrt(hbar/(m*omega_m)), momenta in
sqrt(hbar*m*omega_m)), so these constants only enter when converting
device parameters or reporting occupations/temperatures in SI.
"""

HBAR = 1.054571817e-34  # J s
BOLTZMANN = 1.380649e-23  # J/K (exact)
ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact)

# Coulomb force constant 1/(4 pi eps0).  Treated as a device input with
# this default so configs can pin the rounded value they were taken from.
COULOMB_K_DEFAULT = 8.988e9  # N m^2 / C^2
