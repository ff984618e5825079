"""Born-Oppenheimer input data: the two electronic curves and the transition
dipole, loaded from a four-column tabulation and interpolated onto grids.

The bundled file (data/h2plus_bo_curves.dat) was computed from the exact
two-centre Coulomb problem by tools/generate_curves.py; electronic curves are
isotope independent, so the same file serves H2+, D2+ and HD+ with only the
reduced mass changing.
"""

import importlib.resources
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CurveDataError
from .grids import RadialGrid
from .units import D2_PLUS_REDUCED_MASS

BUNDLED_CURVE_FILE = "h2plus_bo_curves.dat"


@dataclass(frozen=True)
class MoleculeParams:
    """Nuclear parameters; electronic structure enters only via the curves."""

    reduced_mass: float = D2_PLUS_REDUCED_MASS
    label: str = "D2+"

    def __post_init__(self):
        if self.reduced_mass <= 0:
            raise ValueError(f"reduced mass must be positive, got {self.reduced_mass}")


class PotentialCurveSet:
    """Validated tabulation of v_g(R), v_u(R) and d(R), spline-interpolated.

    Energies are shifted so the common dissociation limit sits at zero; the
    shift is estimated from the midpoint of the two curves at the largest
    tabulated R.  Beyond the table both curves clamp to zero and the dipole
    continues as its charge-resonance asymptote R/2; below the table the
    curves continue with the bare 1/R nuclear repulsion.
    """

    def __init__(self, r_samples, v_g, v_u, d):
        r = np.asarray(r_samples, dtype=float)
        v_g = np.asarray(v_g, dtype=float)
        v_u = np.asarray(v_u, dtype=float)
        d = np.asarray(d, dtype=float)
        if not (len(r) == len(v_g) == len(v_u) == len(d)):
            raise CurveDataError("all four columns must have equal length")
        if len(r) < 50:
            raise CurveDataError(f"insufficient samples: {len(r)} rows, need at least 50")
        for arr, name in ((r, "R"), (v_g, "V_g"), (v_u, "V_u"), (d, "d")):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise CurveDataError(f"non-finite {name} value at row {bad[0]}")
        dec = np.flatnonzero(np.diff(r) <= 0)
        if dec.size:
            raise CurveDataError(f"R not strictly increasing at row {dec[0] + 1}")

        shift = 0.5 * (v_g[-1] + v_u[-1])
        v_g = v_g - shift
        v_u = v_u - shift

        below = np.flatnonzero(v_u < v_g)
        if below.size:
            raise CurveDataError(f"V_u below V_g at row {below[0]} (R = {r[below[0]]:g})")
        i_min = int(np.argmin(v_g))
        if i_min in (0, len(r) - 1):
            raise CurveDataError("V_g has no interior minimum")
        if abs(v_g[-1] - v_u[-1]) > 1e-3:
            raise CurveDataError("curves do not reach a common dissociation limit")
        if abs(d[-1] / (r[-1] / 2.0) - 1.0) > 0.05:
            raise CurveDataError("dipole does not approach R/2 at the largest tabulated R")

        self.r_samples = r
        self.v_g = v_g
        self.v_u = v_u
        self.d = d
        self.interpolation_order = 3
        self._spl_g = CubicSpline(r, v_g, bc_type="natural")
        self._spl_u = CubicSpline(r, v_u, bc_type="natural")
        self._spl_d = CubicSpline(r, d, bc_type="natural")

    @property
    def well_depth(self) -> float:
        return float(-np.min(self.v_g))

    @property
    def r_well(self) -> float:
        return float(self.r_samples[np.argmin(self.v_g)])


@dataclass(frozen=True)
class SampledCurves:
    """Curve set evaluated on a radial grid, ready for the propagator."""

    grid: RadialGrid
    v_g: np.ndarray
    v_u: np.ndarray
    d: np.ndarray


def load_curves(source) -> PotentialCurveSet:
    """Load a curve set from a path or open text stream.

    Format: whitespace-separated columns "R V_g V_u d" in atomic units,
    '#' comment lines allowed.
    """
    try:
        table = np.loadtxt(source, comments="#", ndmin=2)
    except ValueError as exc:
        raise CurveDataError(f"unparseable curve file: {exc}") from exc
    if table.shape[1] != 4:
        raise CurveDataError(f"expected 4 columns (R V_g V_u d), got {table.shape[1]}")
    if table.shape[0] < 50:
        raise CurveDataError(f"insufficient samples: {table.shape[0]} rows, need at least 50")
    return PotentialCurveSet(table[:, 0], table[:, 1], table[:, 2], table[:, 3])


def bundled_curves() -> PotentialCurveSet:
    """The curve set shipped with the package."""
    ref = importlib.resources.files("vibcontrol.data").joinpath(BUNDLED_CURVE_FILE)
    with ref.open("r") as fh:
        return load_curves(fh)


def sample_on_grid(curves: PotentialCurveSet, grid: RadialGrid) -> SampledCurves:
    """Interpolate the curve set onto a grid, applying the extrapolation rules."""
    r = grid.r_values
    r_lo, r_hi = curves.r_samples[0], curves.r_samples[-1]
    inside = (r >= r_lo) & (r <= r_hi)

    v_g = np.zeros_like(r)
    v_u = np.zeros_like(r)
    d = np.where(r > r_hi, r / 2.0, 0.0)
    v_g[inside] = curves._spl_g(r[inside])
    v_u[inside] = curves._spl_u(r[inside])
    d[inside] = curves._spl_d(r[inside])

    low = r < r_lo
    if np.any(low):
        # continue the inner wall with the bare nuclear repulsion
        wall = 1.0 / r[low] - 1.0 / r_lo
        v_g[low] = curves._spl_g(r_lo) + wall
        v_u[low] = curves._spl_u(r_lo) + wall
        d[low] = curves._spl_d(r_lo)
    return SampledCurves(grid, v_g, v_u, d)


@dataclass(frozen=True)
class MorseCurve:
    """Analytic Morse well: V(R) = D_e (1 - exp(-a(R - R_e)))^2 - D_e.

    Its closed-form spectrum makes it the standard oracle for eigensolver
    accuracy tests.
    """

    well_depth: float
    width: float
    r_e: float

    def __post_init__(self):
        if min(self.well_depth, self.width, self.r_e) <= 0:
            raise ValueError("Morse parameters must all be positive")

    def __call__(self, r):
        x = 1.0 - np.exp(-self.width * (np.asarray(r, dtype=float) - self.r_e))
        return self.well_depth * x * x - self.well_depth

    def harmonic_frequency(self, reduced_mass: float) -> float:
        return self.width * np.sqrt(2.0 * self.well_depth / reduced_mass)

    def eigenvalues(self, reduced_mass: float, count: int) -> np.ndarray:
        """Closed-form bound spectrum E_n, truncated to the well's capacity."""
        w0 = self.harmonic_frequency(reduced_mass)
        x_e = w0 / (4.0 * self.well_depth)
        n_max = int(np.floor(1.0 / (2.0 * x_e) - 0.5))
        n = np.arange(min(count, n_max + 1))
        v = n + 0.5
        return -self.well_depth + w0 * v - (w0 * x_e) * v * v

    @classmethod
    def from_frequency(cls, well_depth, omega, r_e, reduced_mass):
        """Morse well with a chosen harmonic frequency (a.u.)."""
        return cls(well_depth, omega * np.sqrt(reduced_mass / (2.0 * well_depth)), r_e)


def morse_curve(well_depth: float, width: float, r_e: float) -> MorseCurve:
    return MorseCurve(well_depth, width, r_e)
