"""Physical constants and unit conversions used throughout the package.

All internal computations are in SI units. Photon energies in eV and
positions in micrometres appear only at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

#: Elementary charge (C), exact SI value. Used for the eV <-> J conversion.
ELEMENTARY_CHARGE = 1.602176634e-19

_C = 2.99792458e8
_EPS0 = 8.8541878128e-12


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants plus the transverse quantization area.

    The default vacuum permeability is derived from ``1/(c^2 eps0)`` so the
    electromagnetic identity ``c^2 eps0 mu0 = 1`` holds to rounding.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant (J s).
    k_B : float
        Boltzmann constant (J/K).
    c : float
        Vacuum speed of light (m/s).
    eps0 : float
        Vacuum permittivity (F/m).
    mu0 : float
        Vacuum permeability (H/m).
    S : float
        Quantization area in the transverse plane (m^2). Scales all field
        quantities; kept explicit rather than absorbed into output units.
    """

    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23
    c: float = _C
    eps0: float = _EPS0
    mu0: float = field(default=1.0 / (_C * _C * _EPS0))
    S: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar", "k_B", "c", "eps0", "mu0", "S"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"constant {name!r} must be strictly positive")
        resid = abs(self.c * self.c * self.eps0 * self.mu0 - 1.0)
        if resid > 1e-12:
            raise ValueError(
                f"inconsistent electromagnetic constants: |c^2 eps0 mu0 - 1| = {resid:.3e}"
            )

    def omega_from_ev(self, energy_ev: float) -> float:
        """Angular frequency (rad/s) of a photon with the given energy in eV."""
        return energy_ev * ELEMENTARY_CHARGE / self.hbar

    def ev_from_omega(self, omega: float) -> float:
        """Photon energy in eV for the given angular frequency (rad/s)."""
        return omega * self.hbar / ELEMENTARY_CHARGE


#: Default constants instance shared by all operations.
CONSTANTS = PhysicalConstants()
