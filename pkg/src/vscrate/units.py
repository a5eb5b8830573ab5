"""Unit conversions and thermal factors.

Everything inside the package runs in atomic units (hbar = m_e = 1).  Public
functions take spectroscopic units: wavenumbers (cm^-1), femtoseconds, kelvin
and kcal/mol.  Constants are CODATA 2018 (exact SI where applicable).
"""

import math

HARTREE_TO_WAVENUMBER = 219474.6313632      # cm^-1 per hartree
FS_PER_ATU = 0.024188843265857              # fs per atomic unit of time
BOLTZMANN_WAVENUMBER = 0.6950348004         # cm^-1 per kelvin
WAVENUMBER_PER_KCALMOL = 349.7550880660     # cm^-1 per (kcal/mol)
SPEED_OF_LIGHT_CM_PER_FS = 2.99792458e-5

# How a wavenumber is turned into a rate.  "angular" is omega = 2*pi*c*nu,
# the hbar = 1 convention used everywhere else.  "cyclic" drops the 2*pi
# (omega = c*nu); the reference sweep numbers follow this one.
CONVENTIONS = ("angular", "cyclic")


class UnitSystem:
    """Read-only bundle of the conversion constants."""

    hartree_per_wavenumber = 1.0 / HARTREE_TO_WAVENUMBER
    fs_per_atu = FS_PER_ATU
    boltzmann_wavenumber_per_kelvin = BOLTZMANN_WAVENUMBER
    wavenumber_per_kcalmol = WAVENUMBER_PER_KCALMOL

    def __setattr__(self, name, value):
        raise AttributeError("UnitSystem constants are fixed")


UNITS = UnitSystem()


def wavenumber_to_au(e):
    """cm^-1 -> hartree (equivalently angular frequency in a.u.)."""
    return e / HARTREE_TO_WAVENUMBER


def au_to_wavenumber(e):
    return e * HARTREE_TO_WAVENUMBER


def fs_to_au(t):
    return t / FS_PER_ATU


def au_to_fs(t):
    return t * FS_PER_ATU


def rate_au_to_fs(k):
    """Rate in inverse atomic time units -> fs^-1."""
    return k / FS_PER_ATU


def rate_fs_to_au(k):
    return k * FS_PER_ATU


def kcalmol_to_wavenumber(e):
    return e * WAVENUMBER_PER_KCALMOL


def wavenumber_to_kcalmol(e):
    return e / WAVENUMBER_PER_KCALMOL


def frequency_scale(convention="angular"):
    """Atomic-unit angular frequency per cm^-1 under `convention`."""
    if convention == "angular":
        return 1.0 / HARTREE_TO_WAVENUMBER
    if convention == "cyclic":
        return 1.0 / (2.0 * math.pi * HARTREE_TO_WAVENUMBER)
    raise ValueError(f"unknown frequency convention {convention!r}; expected one of {CONVENTIONS}")


def linewidth_wavenumber(tau_c_fs):
    """hbar / tau in cm^-1 (about 53.08 cm^-1 at 100 fs)."""
    if tau_c_fs <= 0:
        raise ValueError("lifetime must be positive")
    return au_to_wavenumber(1.0 / fs_to_au(tau_c_fs))


def kT_wavenumber(T):
    """k_B T in cm^-1."""
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    return BOLTZMANN_WAVENUMBER * T


def thermal_beta(T):
    """1/(k_B T) in inverse hartree."""
    return 1.0 / wavenumber_to_au(kT_wavenumber(T))
