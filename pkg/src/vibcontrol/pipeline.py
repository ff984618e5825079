"""End-to-end experiments: pump, control-delay scans, probe-dissociation
scans and the beat spectrum of the dissociation signal.

Scan rows exploit that field-free evolution is exactly diagonal in the bound
basis: coefficients are carried analytically to the edge of each pulse
window, the window itself ([tau - 5W, tau + 5W]) is propagated numerically,
and the final wavepacket is projected back.  Rows are independent, so scans
parallelise trivially and results are assembled in index order regardless of
worker count.
"""

from dataclasses import dataclass

import numpy as np

from . import units
from .curves import MorseCurve, SampledCurves
from .eigen import VibrationalBasis, project, solve_bound_states, synthesize
from .grids import ChannelField, TwoChannelState, field_norm_squared, normalized
from .propagation import PropagationConfig, SampledOperators, propagate
from .pulses import LaserPulse
from .runner import map_ordered

# Morse fit to the neutral ground surface used for the Franck-Condon pump:
# equilibrium distance, well depth (hartree) and harmonic wavenumber (cm^-1).
D2_GROUND_R_E = 1.40
D2_GROUND_WELL_DEPTH = 0.1745
D2_GROUND_OMEGA_CM = 3115.5


@dataclass(frozen=True)
class PumpSpec:
    """How the initial ion wavepacket is prepared."""

    mode: str = "franck_condon"          # or "weighted"
    r_e: float = D2_GROUND_R_E
    well_depth: float = D2_GROUND_WELL_DEPTH
    omega_cm: float = D2_GROUND_OMEGA_CM

    def __post_init__(self):
        if self.mode not in ("franck_condon", "weighted"):
            raise ValueError(f"unknown pump mode {self.mode!r}")


def neutral_ground_field(basis: VibrationalBasis, spec: PumpSpec) -> ChannelField:
    """Ground vibrational state of the neutral molecule on the ion's grid."""
    omega = units.wavenumber_to_hartree(spec.omega_cm)
    morse = MorseCurve.from_frequency(spec.well_depth, omega, spec.r_e,
                                      basis.reduced_mass)
    v = morse(basis.grid.r_values)
    ground = solve_bound_states(basis.grid, v, basis.reduced_mass, count=1,
                                r_cut=spec.r_e + 6.0)
    return ground.state(0)


def franck_condon_pump(d2_ground: ChannelField, basis: VibrationalBasis,
                       weight: np.ndarray | None = None):
    """Place the neutral ground state on the ion surface at the instant of
    ionisation, optionally reweighted by w(R), and expand it in the basis.

    Returns (TwoChannelState, coefficients).
    """
    amps = d2_ground.amplitudes.copy()
    if weight is not None:
        w = np.asarray(weight, dtype=float)
        if w.shape != amps.shape:
            raise ValueError("weight samples must match the grid")
        if not np.any(w > 0):
            raise ValueError("weight function must be positive somewhere")
        amps = amps * w
    g = normalized(ChannelField(basis.grid, amps))
    state = TwoChannelState.from_g(g)
    return state, project(state, basis)


@dataclass(frozen=True)
class PopulationMap:
    """Final populations |a_n|^2 against control delay (the interference map)."""

    tau_fs: np.ndarray
    populations: np.ndarray   # shape (n_delays, n_report)
    yields: np.ndarray
    contrast: np.ndarray
    row_status: tuple = ()    # (index, message) for rows that failed

    @property
    def n_states(self) -> int:
        return self.populations.shape[1]


@dataclass(frozen=True)
class YieldSeries:
    """Total dissociation yield against probe delay, uniformly sampled."""

    tau_prime_fs: np.ndarray
    yields: np.ndarray

    def __post_init__(self):
        steps = np.diff(self.tau_prime_fs)
        if len(steps) and not np.allclose(steps, steps[0], rtol=0, atol=1e-9):
            raise ValueError("probe delays must be uniformly spaced")

    @property
    def step_fs(self) -> float:
        return float(self.tau_prime_fs[1] - self.tau_prime_fs[0])


@dataclass(frozen=True)
class SpectralDensity:
    """Magnitude spectrum of a yield series (Hann window, zero padded)."""

    omega_au: np.ndarray      # angular frequency, atomic units
    magnitudes: np.ndarray
    window: str
    pad_factor: int
    n_samples: int

    @property
    def period_fs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.omega_au > 0,
                            2.0 * np.pi / self.omega_au * units.FS_PER_AU, np.inf)


@dataclass(frozen=True)
class ScanContext:
    """Everything one scan row needs; shared read-only across workers."""

    basis: VibrationalBasis
    sampled: SampledCurves
    config: PropagationConfig
    coefficients: np.ndarray     # interaction-picture a_n at the t = 0 reference
    n_report: int


def pulse_window_coefficients(ctx: ScanContext, pulse: LaserPulse,
                              window_half_widths: float = 5.0):
    """Carry the coefficients through one pulse analytically + numerically.

    The input (and output) coefficients are interaction-picture amplitudes
    referenced to t = 0, so the caller never tracks absolute time.  Returns
    (coefficients_after, absorbed_flux).
    """
    basis = ctx.basis
    t0, t1 = pulse.window(window_half_widths)
    a = ctx.coefficients * np.exp(-1j * basis.energies * t0)
    state = TwoChannelState.from_g(synthesize(basis, a))
    config = PropagationConfig(dt=ctx.config.dt, t_start=t0, t_end=t1,
                               absorber_fraction=ctx.config.absorber_fraction,
                               absorber_strength=ctx.config.absorber_strength,
                               record_stride=10**9)
    ops = SampledOperators(ctx.sampled, basis.reduced_mass, config)
    result = propagate(state, [pulse], config, ops=ops)
    a_after = project(result.state, basis) * np.exp(1j * basis.energies * result.t_end)
    return a_after, result.absorbed_flux


def parity_contrast(populations: np.ndarray, n_limit: int = 9) -> float:
    """(even - odd)/(even + odd) population balance over states n < n_limit."""
    p = np.asarray(populations, dtype=float)[:n_limit]
    total = p.sum()
    if total <= 0:
        raise ValueError("contrast is undefined for an all-zero population row")
    even = p[0::2].sum()
    odd = p[1::2].sum()
    return float((even - odd) / total)


def _control_row(ctx: ScanContext, template: LaserPulse, tau_fs: float):
    try:
        pulse = template.shifted(units.fs_to_au(tau_fs))
        a_after, _ = pulse_window_coefficients(ctx, pulse)
        pops = np.abs(a_after) ** 2
        row_yield = float(np.sum(np.abs(ctx.coefficients) ** 2) - pops.sum())
        return "ok", pops[: ctx.n_report], row_yield, parity_contrast(pops)
    except Exception as exc:  # row failures must not kill the scan
        return "error", str(exc), 0.0, 0.0


def control_scan(ctx: ScanContext, template: LaserPulse, tau_fs_values,
                 workers: int = 1) -> PopulationMap:
    """Population map over control delays (one pulse window per row).

    Failed rows are reported in row_status and filled with NaN so the scan
    always completes with one output row per requested delay.
    """
    taus = np.asarray(tau_fs_values, dtype=float)
    rows = map_ordered(_control_row, [(ctx, template, t) for t in taus], workers)
    pops = np.full((len(taus), ctx.n_report), np.nan)
    yields = np.full(len(taus), np.nan)
    contr = np.full(len(taus), np.nan)
    failures = []
    for i, row in enumerate(rows):
        if row[0] == "ok":
            pops[i], yields[i], contr[i] = row[1], row[2], row[3]
        else:
            failures.append((i, row[1]))
    return PopulationMap(taus, pops, yields, contr, tuple(failures))


def _probe_row(ctx: ScanContext, template: LaserPulse, tau_fs: float):
    pulse = template.shifted(units.fs_to_au(tau_fs))
    a_after, _ = pulse_window_coefficients(ctx, pulse)
    return float(np.sum(np.abs(ctx.coefficients) ** 2) - np.sum(np.abs(a_after) ** 2))


def probe_scan(ctx: ScanContext, template: LaserPulse, tau_prime_fs_values,
               workers: int = 1) -> YieldSeries:
    """Dissociation yield against probe delay for a prepared wavepacket.

    ctx.coefficients describe the state after the control stage; the yield of
    each row counts only probe-epoch loss from the bound manifold, so a
    zero-intensity probe gives exactly zero.
    """
    taus = np.asarray(tau_prime_fs_values, dtype=float)
    yields = map_ordered(_probe_row, [(ctx, template, t) for t in taus], workers)
    return YieldSeries(taus, np.array(yields))


def beat_spectrum(series: YieldSeries, pad_factor: int = 4) -> SpectralDensity:
    """Windowed magnitude spectrum of the mean-subtracted yield signal."""
    y = np.asarray(series.yields, dtype=float)
    if len(y) < 256:
        raise ValueError(f"need at least 256 samples, got {len(y)}")
    y = y - y.mean()
    windowed = y * np.hanning(len(y))
    n_pad = pad_factor * len(y)
    mags = np.abs(np.fft.rfft(windowed, n_pad))
    dt_au = units.fs_to_au(series.step_fs)
    omega = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=dt_au)
    return SpectralDensity(omega_au=omega, magnitudes=mags, window="hann",
                           pad_factor=pad_factor, n_samples=len(y))
