"""Laser pulses: a cosine carrier under a Gaussian intensity envelope.

F(t) = F0 cos(w (t - tau) + phi) exp(-2 ln2 (t - tau)^2 / W^2), where W is
the full width at half maximum of the envelope.  All fields are in atomic
units internally; the constructor converts from the experiment-facing units
(W/cm^2, nm, fs).
"""

from dataclasses import dataclass

import numpy as np

from . import units

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class LaserPulse:
    """Pulse parameters in atomic units (see from_experiment for lab units)."""

    amplitude: float      # peak field F0 (a.u.)
    omega: float          # carrier angular frequency (a.u.)
    center: float         # envelope centre tau (a.u. time)
    fwhm: float           # envelope FWHM W (a.u. time)
    carrier_phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude}")
        if self.fwhm <= 0:
            raise ValueError(f"fwhm must be positive, got {self.fwhm}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @classmethod
    def from_experiment(cls, intensity_w_cm2, wavelength_nm, center_fs, fwhm_fs,
                        carrier_phase=0.0):
        return cls(amplitude=units.intensity_to_field(intensity_w_cm2),
                   omega=units.wavelength_to_omega(wavelength_nm),
                   center=units.fs_to_au(center_fs),
                   fwhm=units.fs_to_au(fwhm_fs),
                   carrier_phase=carrier_phase)

    def envelope(self, t):
        dt = np.asarray(t, dtype=float) - self.center
        return self.amplitude * np.exp(-2.0 * _LN2 * dt * dt / (self.fwhm * self.fwhm))

    def field_at(self, t):
        dt = np.asarray(t, dtype=float) - self.center
        return self.envelope(t) * np.cos(self.omega * dt + self.carrier_phase)

    def shifted(self, center_au):
        return LaserPulse(self.amplitude, self.omega, center_au, self.fwhm,
                          self.carrier_phase)

    @property
    def half_cycle(self) -> float:
        """Half optical period pi/w, the natural impulse duration."""
        return np.pi / self.omega

    def window(self, half_widths: float = 5.0):
        """(start, end) times outside which the envelope is negligible."""
        return (self.center - half_widths * self.fwhm,
                self.center + half_widths * self.fwhm)


def field_at(pulse: LaserPulse, t):
    return pulse.field_at(t)


def total_field(pulses, t) -> float:
    return float(sum(p.field_at(t) for p in pulses))
