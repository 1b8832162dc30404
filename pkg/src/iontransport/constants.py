"""Physical constants in SI units (CODATA values from scipy)."""

from scipy import constants as _c

HBAR = _c.hbar
ATOMIC_MASS = _c.atomic_mass
ELEMENTARY_CHARGE = _c.e

BE9_MASS_U = 9.01218
BE9_MASS = BE9_MASS_U * ATOMIC_MASS
