"""Radial grid, channel fields and the elementary algebra used everywhere.

Wavefunctions live on a uniform grid in the internuclear distance R, with a
dr-weighted inner product, and move between position and momentum space by
FFT.  The momentum axis follows numpy's FFT ordering (zero frequency first);
every k-space operator in the package is built with the same convention.
The momentum-space amplitudes carry the unitary continuum normalisation
psi~(k) = fft(psi) * dr / sqrt(2 pi), so norms are preserved exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True)
class RadialGrid:
    """Uniform internuclear-distance grid with its conjugate momentum grid."""

    r_min: float
    r_max: float
    n_points: int
    dr: float = field(init=False)
    r_values: np.ndarray = field(init=False, repr=False)
    k_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r_min <= 0:
            raise ValueError(f"r_min must be positive, got {self.r_min}")
        if self.r_max <= self.r_min:
            raise ValueError(f"r_max must exceed r_min, got [{self.r_min}, {self.r_max}]")
        n = self.n_points
        if n < 256 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 256, got {n}")
        dr = (self.r_max - self.r_min) / n
        object.__setattr__(self, "dr", dr)
        object.__setattr__(self, "r_values", self.r_min + dr * np.arange(n))
        object.__setattr__(self, "k_values", 2.0 * np.pi * np.fft.fftfreq(n, d=dr))

    def __eq__(self, other):
        return (isinstance(other, RadialGrid)
                and (self.r_min, self.r_max, self.n_points)
                == (other.r_min, other.r_max, other.n_points))

    def __hash__(self):
        return hash((self.r_min, self.r_max, self.n_points))


@dataclass
class ChannelField:
    """Complex amplitudes on one electronic surface, dr-normalised."""

    grid: RadialGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match "
                f"grid with {self.grid.n_points} points")

    def copy(self):
        return ChannelField(self.grid, self.amplitudes.copy())


@dataclass
class TwoChannelState:
    """Wavefunction partitioned into g (bound) and u (repulsive) components."""

    g: ChannelField
    u: ChannelField

    def __post_init__(self):
        if self.g.grid != self.u.grid:
            raise GridMismatchError("g and u components must share one grid")

    @property
    def grid(self):
        return self.g.grid

    def copy(self):
        return TwoChannelState(self.g.copy(), self.u.copy())

    @classmethod
    def from_g(cls, g: ChannelField):
        return cls(g, ChannelField(g.grid, np.zeros(g.grid.n_points, dtype=complex)))


def field_norm_squared(f: ChannelField) -> float:
    return float(np.sum(np.abs(f.amplitudes) ** 2) * f.grid.dr)


def norm_squared(state: TwoChannelState) -> float:
    """Total probability on both surfaces."""
    return field_norm_squared(state.g) + field_norm_squared(state.u)


def inner_product(a: ChannelField, b: ChannelField) -> complex:
    """<a|b> with the dr-weighted product; conjugate-linear in the first slot."""
    if a.grid != b.grid:
        raise GridMismatchError("inner product requires fields on the same grid")
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.grid.dr)


def expectation_position(f: ChannelField) -> float:
    """<R> of a field; raises on a zero-norm field."""
    n2 = field_norm_squared(f)
    if n2 <= 0.0:
        raise ValueError("expectation_position is undefined for a zero-norm field")
    dens = np.abs(f.amplitudes) ** 2
    return float(np.sum(f.grid.r_values * dens) * f.grid.dr / n2)


def to_momentum(f: ChannelField) -> np.ndarray:
    """Momentum-space amplitudes in FFT ordering (unitary normalisation)."""
    return np.fft.fft(f.amplitudes) * (f.grid.dr / np.sqrt(2.0 * np.pi))


def from_momentum(grid: RadialGrid, values: np.ndarray) -> ChannelField:
    """Inverse of to_momentum."""
    amps = np.fft.ifft(np.asarray(values, dtype=complex)) * (np.sqrt(2.0 * np.pi) / grid.dr)
    return ChannelField(grid, amps)


def momentum_norm_squared(grid: RadialGrid, values: np.ndarray) -> float:
    dk = 2.0 * np.pi / (grid.n_points * grid.dr)
    return float(np.sum(np.abs(values) ** 2) * dk)


def normalized(f: ChannelField) -> ChannelField:
    n2 = field_norm_squared(f)
    if n2 <= 0.0:
        raise ValueError("cannot normalise a zero-norm field")
    return ChannelField(f.grid, f.amplitudes / np.sqrt(n2))
