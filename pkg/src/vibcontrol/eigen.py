"""Bound vibrational eigenpairs of the g well and derived spectral constants.

The Hamiltonian is diagonalised on the radial grid with the kinetic operator
built exactly in momentum space (Fourier-grid method), which converges
spectrally for smooth wells.  Continuum states are discarded by an energy
filter just below the dissociation limit.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, toeplitz

from .errors import GridMismatchError
from .grids import ChannelField, RadialGrid, TwoChannelState

BOUND_THRESHOLD = -1e-6  # hartree; energies above this count as continuum


@dataclass(frozen=True)
class VibrationalBasis:
    """Orthonormal bound eigenpairs {E_n, |n>} on a shared grid.

    wavefunctions[n] holds the dr-normalised real amplitudes of state n; the
    phase convention makes the leftmost antinode positive so signs are stable
    across runs and platforms.
    """

    grid: RadialGrid
    energies: np.ndarray
    wavefunctions: np.ndarray
    reduced_mass: float
    truncated: bool = False

    @property
    def n_max(self) -> int:
        return len(self.energies)

    def state(self, n: int) -> ChannelField:
        return ChannelField(self.grid, self.wavefunctions[n].astype(complex))


@dataclass(frozen=True)
class SpectralConstants:
    """Quadratic expansion E_n ~ -D_e + w_e (n+1/2) - w_e x_e (n+1/2)^2."""

    omega_e: float
    omega_e_x_e: float
    d_e: float
    residual: float


def kinetic_matrix(grid: RadialGrid, reduced_mass: float,
                   n_window: int | None = None) -> np.ndarray:
    """Dense position-space kinetic matrix, exact on the Fourier grid.

    n_window restricts the matrix to the first n_window grid points; the
    full operator is Toeplitz, so the restriction is just its leading block.
    """
    t_k = grid.k_values**2 / (2.0 * reduced_mass)
    row = np.real(np.fft.ifft(t_k))
    if n_window is not None:
        row = row[:n_window]
    return toeplitz(row)


def apply_hamiltonian(grid: RadialGrid, v: np.ndarray, reduced_mass: float,
                      psi: np.ndarray) -> np.ndarray:
    """H psi with the same discretisation the eigensolver uses."""
    t_k = grid.k_values**2 / (2.0 * reduced_mass)
    return np.fft.ifft(t_k * np.fft.fft(psi)) + v * psi


def _fix_phase(psi: np.ndarray) -> np.ndarray:
    """Make the leftmost antinode positive."""
    mag = np.abs(psi)
    floor = 1e-3 * mag.max()
    interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] > mag[2:]) & (mag[1:-1] > floor)
    peaks = np.flatnonzero(interior) + 1
    anchor = peaks[0] if peaks.size else int(np.argmax(mag))
    return -psi if psi[anchor] < 0 else psi


def solve_bound_states(grid: RadialGrid, v: np.ndarray, reduced_mass: float,
                       count: int | None = None,
                       bound_threshold: float | None = BOUND_THRESHOLD,
                       r_cut: float | None = None) -> VibrationalBasis:
    """Lowest bound eigenpairs of -1/(2 mu) d^2/dR^2 + v(R).

    count limits how many states are returned (all bound states if None);
    asking for more than the well supports returns every bound state and sets
    the truncated flag.  bound_threshold=None disables the continuum filter
    (useful for confining test potentials).  r_cut restricts the dense solve
    to R <= r_cut for speed; states must have decayed there, which holds
    whenever the classically allowed region ends well inside the cut.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.n_points,):
        raise ValueError("potential samples must match the grid")

    if r_cut is not None:
        m = int(np.count_nonzero(grid.r_values <= r_cut))
        if m < 64:
            raise ValueError(f"r_cut={r_cut} leaves too few grid points")
    else:
        m = grid.n_points
    idx = np.arange(m)

    h = kinetic_matrix(grid, reduced_mass, n_window=m) + np.diag(v[idx])
    energies, vectors = eigh(h)

    if bound_threshold is not None:
        n_bound = int(np.searchsorted(energies, bound_threshold))
    else:
        n_bound = len(energies)
    truncated = False
    if count is not None:
        if count > n_bound:
            warnings.warn(
                f"requested {count} states but only {n_bound} are bound; returning all",
                stacklevel=2)
            truncated = True
        n_keep = min(count, n_bound)
    else:
        n_keep = n_bound

    wfs = np.zeros((n_keep, grid.n_points))
    wfs[:, idx] = vectors[:, :n_keep].T / np.sqrt(grid.dr)
    for i in range(n_keep):
        wfs[i] = _fix_phase(wfs[i])
    return VibrationalBasis(grid, energies[:n_keep].copy(), wfs, reduced_mass, truncated)


def project(state, basis: VibrationalBasis) -> np.ndarray:
    """Coefficients a_n = <n|psi_g> of the g-channel wavepacket."""
    if isinstance(state, TwoChannelState):
        f = state.g
    elif isinstance(state, ChannelField):
        f = state
    else:
        raise TypeError(f"cannot project object of type {type(state).__name__}")
    if f.grid != basis.grid:
        raise GridMismatchError("state and basis live on different grids")
    return basis.wavefunctions @ f.amplitudes * basis.grid.dr


def synthesize(basis: VibrationalBasis, coefficients: np.ndarray) -> ChannelField:
    """Grid wavefunction sum_n a_n |n>, the inverse of project on the bound span."""
    amps = np.asarray(coefficients, dtype=complex) @ basis.wavefunctions
    return ChannelField(basis.grid, amps)


def beat_frequency(basis: VibrationalBasis, n: int, m: int) -> float:
    """Angular beat frequency (E_n - E_m)/hbar; antisymmetric in its arguments."""
    n_states = basis.n_max
    if not (0 <= n < n_states and 0 <= m < n_states):
        raise IndexError(f"state index out of range (have {n_states} states)")
    return float(basis.energies[n] - basis.energies[m])


def fit_anharmonic(basis: VibrationalBasis, n_fit: int = 9) -> SpectralConstants:
    """Least-squares quadratic expansion of the low spectrum."""
    if basis.n_max < 5:
        raise ValueError(f"need at least 5 bound states to fit, have {basis.n_max}")
    m = min(n_fit, basis.n_max)
    x = np.arange(m) + 0.5
    design = np.vstack([np.ones(m), x, x * x]).T
    coef, *_ = np.linalg.lstsq(design, basis.energies[:m], rcond=None)
    fit = design @ coef
    residual = float(np.sqrt(np.mean((fit - basis.energies[:m]) ** 2)))
    return SpectralConstants(omega_e=float(coef[1]), omega_e_x_e=float(-coef[2]),
                             d_e=float(-coef[0]), residual=residual)
