"""Unit conversions between user-facing units and Hartree atomic units.

Everything inside the package works in atomic units (hbar = m_e = e = 1);
times in fs, intensities in W/cm^2 and wavelengths in nm appear only at the
I/O boundary, and every conversion lives here.
"""

import numpy as np

# time: one atomic unit of time in femtoseconds
FS_PER_AU = 0.02418884254

# cycle-averaged intensity (W/cm^2) corresponding to a field amplitude of
# one atomic unit, from I = (1/2) eps0 c F0^2
AU_INTENSITY_W_CM2 = 3.50945e16

# wavelength: 1 nm in bohr, and the speed of light in atomic units
BOHR_PER_NM = 18.8972598858
C_AU = 137.035999084

# energies
EV_PER_HARTREE = 27.211386245988
WAVENUMBER_PER_HARTREE = 219474.6313632

# nuclear reduced mass of D2+ (half the deuteron mass), in electron masses
D2_PLUS_REDUCED_MASS = 1835.24


def fs_to_au(t_fs):
    return np.asarray(t_fs, dtype=float) / FS_PER_AU if np.ndim(t_fs) else float(t_fs) / FS_PER_AU


def au_to_fs(t_au):
    return np.asarray(t_au, dtype=float) * FS_PER_AU if np.ndim(t_au) else float(t_au) * FS_PER_AU


def intensity_to_field(intensity_w_cm2):
    """Peak field amplitude F0 (a.u.) for a cycle-averaged intensity in W/cm^2."""
    if intensity_w_cm2 < 0:
        raise ValueError(f"intensity must be non-negative, got {intensity_w_cm2}")
    return float(np.sqrt(intensity_w_cm2 / AU_INTENSITY_W_CM2))


def wavelength_to_omega(wavelength_nm):
    """Carrier angular frequency (a.u.) of light with the given vacuum wavelength."""
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return 2.0 * np.pi * C_AU / (wavelength_nm * BOHR_PER_NM)


def hartree_to_ev(e):
    return e * EV_PER_HARTREE


def wavenumber_to_hartree(nu_cm):
    return nu_cm / WAVENUMBER_PER_HARTREE
