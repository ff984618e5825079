"""Closed-form second-order model of the control-pulse interference.

The repulsive surface acts as a virtual intermediate state: summing over its
continuum with a single representative energy (closure, taken at the
dissociation threshold, the package-wide energy zero) collapses the
second-order amplitude into matrix elements of d^2(R).  One half-cycle of
the field, treated as a square impulse of duration W' = pi/omega, then maps
the bound coefficients through a tridiagonal update

    a_n <- a_n (1 - i k_nn) - i k_(n,n-1) a_(n-1) e^(i(E_n-E_(n-1)) tau)
                            - i k_(n,n+1) a_(n+1) e^(i(E_n-E_(n+1)) tau)

whose diagonal is the quadratic Stark phase advance.  A full pulse is the
ordered product of one such map per half-cycle, with each impulse amplitude
read off the envelope at the impulse midpoint.  The model is quadratic in
the field, so it is blind to the carrier-envelope phase by construction.
"""

from dataclasses import dataclass

import numpy as np

from . import units
from .eigen import SpectralConstants, VibrationalBasis
from .pulses import LaserPulse


@dataclass(frozen=True)
class CouplingMatrix:
    """Second-order coupling strengths d2[n, n'] = <n| d^2(R) |n'>."""

    d2: np.ndarray

    @property
    def n_states(self) -> int:
        return self.d2.shape[0]


@dataclass(frozen=True)
class KappaMatrix:
    """Impulse-response matrix for one square half-cycle of amplitude f0."""

    kappa: np.ndarray
    f0: float
    duration: float           # W', atomic units
    reference_energy: float   # closure energy; zero at the dissociation threshold


def coupling_matrix(basis: VibrationalBasis, dipole_samples: np.ndarray) -> CouplingMatrix:
    """Quadrature of <n| d^2 |n'> over the grid; symmetric by construction."""
    d = np.asarray(dipole_samples, dtype=float)
    if d.shape != (basis.grid.n_points,):
        raise ValueError("dipole samples must match the basis grid")
    weighted = basis.wavefunctions * (d * d)
    d2 = weighted @ basis.wavefunctions.T * basis.grid.dr
    return CouplingMatrix(0.5 * (d2 + d2.T))


def _kernel(delta_e, duration):
    """Time integral of the impulse response: W' sinc(dE W'/2) e^(i dE W'/2)."""
    x = delta_e * duration
    return duration * np.sinc(x / (2.0 * np.pi)) * np.exp(0.5j * x)


def kappa(n: int, n_prime: int, f0: float, duration: float,
          energies: np.ndarray, d2: np.ndarray,
          reference_energy: float = 0.0) -> complex:
    """Impulse coupling between two bound states for one square half-cycle.

    Reduces to f0^2 W' d2[n,n'] / E_n' when (E_n - E_n') W' << 1.
    """
    e = np.asarray(energies, dtype=float)
    denom = e[n_prime] - reference_energy
    if denom >= 0:
        raise ValueError(
            f"state {n_prime} is not bound relative to the closure energy")
    return complex(f0 * f0 * d2[n, n_prime] / denom
                   * _kernel(e[n] - e[n_prime], duration))


def kappa_matrix(f0: float, duration: float, energies: np.ndarray,
                 coupling: CouplingMatrix, reference_energy: float = 0.0) -> KappaMatrix:
    e = np.asarray(energies, dtype=float)
    denom = e - reference_energy
    if np.any(denom >= 0):
        raise ValueError("all basis states must lie below the closure energy")
    delta = e[:, None] - e[None, :]
    mat = (f0 * f0) * coupling.d2 / denom[None, :] * _kernel(delta, duration)
    return KappaMatrix(mat, f0, duration, reference_energy)


def apply_impulse(coefficients: np.ndarray, tau: float, kap: KappaMatrix,
                  energies: np.ndarray) -> np.ndarray:
    """One impulse applied at time tau (nearest-neighbour tridiagonal action)."""
    a = np.asarray(coefficients, dtype=complex)
    e = np.asarray(energies, dtype=float)
    phases = np.exp(1j * (e[:, None] - e[None, :]) * tau)
    m = -1j * kap.kappa * phases
    update = (np.diag(np.diag(m))
              + np.diag(np.diag(m, -1), -1)
              + np.diag(np.diag(m, 1), 1))
    return a + update @ a


def compose_pulse(coefficients: np.ndarray, pulse: LaserPulse,
                  energies: np.ndarray, coupling: CouplingMatrix,
                  reference_energy: float = 0.0,
                  envelope_cut: float = 1e-8) -> np.ndarray:
    """Ordered product of half-cycle impulse maps across the whole pulse.

    Impulse k occupies [tau + (k - 1/2) W', tau + (k + 1/2) W'] and carries
    the envelope amplitude at its midpoint; the carrier sign never enters
    because each map is quadratic in the field.
    """
    wp = pulse.half_cycle
    a = np.asarray(coefficients, dtype=complex).copy()
    n_half = int(np.ceil(5.0 * pulse.fwhm / wp))
    for k in range(-n_half, n_half + 1):
        f_k = float(pulse.envelope(pulse.center + k * wp))
        if f_k < envelope_cut * pulse.amplitude:
            continue
        kap = kappa_matrix(f_k, wp, energies, coupling, reference_energy)
        a = apply_impulse(a, pulse.center + (k - 0.5) * wp, kap, energies)
    return a


def clock_phases(initial_index: int, pulse: LaserPulse, energies: np.ndarray,
                 coupling: CouplingMatrix, reference_energy: float = 0.0):
    """Amplitudes and phase shifts produced from a single initial eigenstate.

    Phases are measured against the unperturbed evolution exp(-i E_n t), so
    with no field every clock stays at zero; a positive shift is a phase
    advance.  Returns (amplitudes, phase_shifts) arrays over the basis.
    """
    a0 = np.zeros(len(energies), dtype=complex)
    a0[initial_index] = 1.0
    a = compose_pulse(a0, pulse, energies, coupling, reference_energy)
    return np.abs(a), np.angle(a)


def predict_interference_times(constants: SpectralConstants) -> dict:
    """Characteristic delays implied by the fitted anharmonic expansion."""
    frac = np.pi / (2.0 * constants.omega_e_x_e)
    flip = np.pi / constants.omega_e
    return {
        "fractional_revival_fs": float(units.au_to_fs(frac)),
        "parity_flip_interval_fs": float(units.au_to_fs(flip)),
        "full_revival_fs": float(units.au_to_fs(4.0 * frac)),
    }


def phase_alignment_misfit(energies: np.ndarray, tau: float,
                           n_range=(2, 7)) -> float:
    """RMS wrapped phase sum of neighbouring interference terms at delay tau.

    The two routes into state n acquire phases (E_n - E_(n-1)) tau and
    (E_(n+1) - E_n) tau; their sum must vanish mod 2 pi for the parity
    pattern to lock in, which happens near the fractional revival.
    """
    e = np.asarray(energies, dtype=float)
    ns = np.arange(*n_range)
    total = (e[ns + 1] - e[ns - 1]) * tau
    wrapped = np.angle(np.exp(1j * total))
    return float(np.sqrt(np.mean(wrapped**2)))


def stark_phase_misfit(n: int, tau: float, kap: KappaMatrix,
                       energies: np.ndarray) -> float:
    """Distance (rad) of the diagonal Stark phase from the value that makes
    the neighbour interference fully destructive for state n; diagnostic only.
    """
    e = np.asarray(energies, dtype=float)
    target = (e[n] - e[n - 1]) * tau + 0.5 * np.pi
    return float(np.abs(np.angle(np.exp(1j * (kap.kappa[n, n].real - target)))))


def balance_ratio(coefficients: np.ndarray, kap: KappaMatrix) -> np.ndarray:
    """|neighbour interference terms| / |direct term| per state; near one
    where destructive interference can fully cancel a state."""
    a = np.asarray(coefficients, dtype=complex)
    k = kap.kappa
    n = len(a)
    ratio = np.full(n, np.nan)
    for i in range(n):
        neigh = 0.0
        if i > 0:
            neigh += abs(k[i, i - 1] * a[i - 1])
        if i < n - 1:
            neigh += abs(k[i, i + 1] * a[i + 1])
        direct = abs(a[i] * (1.0 - 1j * k[i, i]))
        ratio[i] = neigh / direct if direct > 0 else np.inf
    return ratio
