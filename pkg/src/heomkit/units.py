"""
Unit conversion into internal hbar = k_B = 1 units.

A configuration declares one energy unit (``dimensionless``, ``eV`` or
``cm^-1``); every tagged quantity is converted into that unit (energies) or
its inverse (times).  Constants are CODATA 2018 literals:

    k_B   = 8.617333262e-5 eV/K          (exact)
    hbar  = 6.582119569e-16 eV s         (exact)
    c     = 2.99792458e10 cm/s           (exact)
    1 cm^-1 = 1.2398419843320026e-4 eV   (h c)
"""

__all__ = ["convert_units", "ENERGY_UNITS", "K_B_EV", "HBAR_EV_FS", "CM1_EV"]

K_B_EV = 8.617333262e-5          # eV per kelvin
HBAR_EV_FS = 0.6582119569        # eV femtosecond
CM1_EV = 1.2398419843320026e-4   # eV per cm^-1
C_CM_PER_FS = 2.99792458e-5      # cm per femtosecond
TWO_PI_C_CM_FS = 2.0 * 3.141592653589793 * C_CM_PER_FS

ENERGY_UNITS = ("dimensionless", "eV", "cm^-1")

# energy value of 1 <row unit> expressed in <column unit>
_ENERGY_FACTOR = {
    ("eV", "eV"): 1.0,
    ("cm^-1", "cm^-1"): 1.0,
    ("eV", "cm^-1"): 1.0 / CM1_EV,
    ("cm^-1", "eV"): CM1_EV,
}


def convert_units(value, unit, energy_unit="dimensionless"):
    """
    Convert ``value`` carrying ``unit`` into internal units where energies
    are measured in ``energy_unit`` and hbar = k_B = 1.

    Energy tags (``eV``, ``cm^-1``) convert between energy units;
    temperatures (``K``) multiply by the Boltzmann constant; times (``fs``)
    become inverse energies, e.g. a decay over 166 fs corresponds to the
    rate ``1 / (2 pi c * 166 fs)`` when energies are wavenumbers.
    """
    if energy_unit not in ENERGY_UNITS:
        raise ValueError(f"unknown energy unit {energy_unit!r}")
    value = float(value)
    if unit == "dimensionless":
        return value
    if energy_unit == "dimensionless":
        raise ValueError(
            f"cannot convert {unit!r} without a physical energy_unit"
        )
    if unit in ("eV", "cm^-1"):
        return value * _ENERGY_FACTOR[(unit, energy_unit)]
    if unit == "K":
        k_b = K_B_EV if energy_unit == "eV" else K_B_EV / CM1_EV
        return value * k_b
    if unit == "fs":
        if energy_unit == "eV":
            return value / HBAR_EV_FS
        return value * TWO_PI_C_CM_FS
    raise ValueError(f"unknown unit tag {unit!r}")
