"""CODATA 2018 exact constants, plus a few derived vacuum quantities."""

import math

PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 2.99792458e8  # m/s
ELEMENTARY_CHARGE = 1.602176634e-19  # C
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
VACUUM_PERMEABILITY = 1.25663706212e-6  # H/m
FREE_SPACE_IMPEDANCE = math.sqrt(VACUUM_PERMEABILITY / VACUUM_PERMITTIVITY)

SILICON_PERMITTIVITY = 11.7
