"""Output products: delimited files plus rendered figures.

Every scan or analysis command writes a CSV with documented columns and, by
default, a PNG figure of the same data next to it.  Floats are written with
shortest round-trip formatting so outputs are byte-identical across worker
counts and re-runs.
"""

import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import units
from .eigen import VibrationalBasis
from .pipeline import PopulationMap, SpectralDensity, YieldSeries


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


# ---------------------------------------------------------------- CSV layers

def eigen_csv(path, basis: VibrationalBasis):
    """Columns: n, energy in hartree and eV, beat periods to n+-1 / n+-2 in fs."""
    rows = []
    e = basis.energies
    for n in range(basis.n_max):
        t1 = 2 * np.pi / (e[n + 1] - e[n]) * units.FS_PER_AU if n + 1 < basis.n_max else np.nan
        t2 = 2 * np.pi / (e[n + 2] - e[n]) * units.FS_PER_AU if n + 2 < basis.n_max else np.nan
        rows.append((n, e[n], units.hartree_to_ev(e[n]), t1, t2))
    return write_csv(path, ["n", "energy_hartree", "energy_ev",
                            "beat_period_n_plus_1_fs", "beat_period_n_plus_2_fs"], rows)


def propagation_csv(path, result, yields=None):
    """Columns: t_fs, norm, mean_R, pop_g, pop_u, yield."""
    y = yields if yields is not None else np.full_like(result.norms, np.nan)
    rows = zip(units.au_to_fs(result.times), result.norms, result.mean_r,
               result.pop_g, result.pop_u, y)
    return write_csv(path, ["t_fs", "norm", "mean_R", "pop_g", "pop_u", "yield"], rows)


def population_map_csv(path, pmap: PopulationMap):
    """Columns: tau_fs, pop_n0..pop_nK, yield, contrast."""
    header = (["tau_fs"] + [f"pop_n{i}" for i in range(pmap.n_states)]
              + ["yield", "contrast"])
    rows = [(t, *p, y, c) for t, p, y, c in
            zip(pmap.tau_fs, pmap.populations, pmap.yields, pmap.contrast)]
    return write_csv(path, header, rows)


def yield_series_csv(path, series: YieldSeries):
    return write_csv(path, ["tau_prime_fs", "yield"],
                     zip(series.tau_prime_fs, series.yields))


def read_yield_series(path) -> YieldSeries:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return YieldSeries(data[:, 0], data[:, 1])


def spectrum_csv(path, density: SpectralDensity):
    """Columns: omega_au (angular), period_fs, magnitude."""
    return write_csv(path, ["omega_au", "period_fs", "magnitude"],
                     zip(density.omega_au, density.period_fs, density.magnitudes))


def coupling_csv(path, d2: np.ndarray):
    header = ["n"] + [f"d2_n{j}" for j in range(d2.shape[1])]
    rows = [(i, *d2[i]) for i in range(d2.shape[0])]
    return write_csv(path, header, rows)


def clock_csv(path, tau_fs_values, clock_rows):
    """Columns: tau_fs, initial_n, n, amplitude, phase_rad."""
    rows = []
    for tau_fs, start, amps, phases in clock_rows:
        for n, (a, ph) in enumerate(zip(amps, phases)):
            rows.append((tau_fs, start, n, a, ph))
    return write_csv(path, ["tau_fs", "initial_n", "n", "amplitude", "phase_rad"], rows)


# ------------------------------------------------------------------- figures

def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def eigen_figure(path, basis: VibrationalBasis, sampled=None):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    if sampled is not None:
        ax1.plot(sampled.grid.r_values, sampled.v_g, "k-", lw=1, label="g surface")
        ax1.plot(sampled.grid.r_values, sampled.v_u, "r-", lw=1, label="u surface")
        ax1.set_xlim(0.5, 12)
    for e in basis.energies:
        ax1.axhline(e, color="C0", lw=0.5)
    ax1.set_ylim(-0.12, 0.12)
    ax1.set_xlabel("R (bohr)")
    ax1.set_ylabel("energy (hartree)")
    ax1.legend(loc="upper right", fontsize=8)
    n = np.arange(basis.n_max - 1)
    periods = 2 * np.pi / np.diff(basis.energies) * units.FS_PER_AU
    ax2.plot(n, periods, "o-")
    ax2.set_xlabel("n")
    ax2.set_ylabel("beat period n, n+1 (fs)")
    fig.tight_layout()
    return _save(fig, path)


def propagation_figure(path, result):
    t_fs = units.au_to_fs(result.times)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    ax1.plot(t_fs, result.mean_r, lw=0.8)
    ax1.set_ylabel("<R> (bohr)")
    ax2.plot(t_fs, result.pop_g, label="g")
    ax2.plot(t_fs, result.pop_u, label="u")
    ax2.plot(t_fs, result.norms, "k--", lw=0.8, label="norm")
    ax2.set_xlabel("t (fs)")
    ax2.set_ylabel("population")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def population_map_figure(path, pmap: PopulationMap):
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(8, 6), sharex=True, height_ratios=[3, 1])
    step = pmap.tau_fs[1] - pmap.tau_fs[0] if len(pmap.tau_fs) > 1 else 1.0
    tau_edges = np.concatenate([pmap.tau_fs - step / 2, [pmap.tau_fs[-1] + step / 2]])
    mesh = ax1.pcolormesh(tau_edges, np.arange(pmap.n_states + 1) - 0.5,
                          pmap.populations.T, cmap="inferno", shading="flat")
    ax1.set_ylabel("vibrational level n")
    fig.colorbar(mesh, ax=ax1, label="population")
    ax2.plot(pmap.tau_fs, pmap.contrast, lw=0.8)
    ax2.axhline(0, color="k", lw=0.5)
    ax2.set_xlabel("control delay tau (fs)")
    ax2.set_ylabel("parity contrast")
    ax2.set_ylim(-1, 1)
    fig.tight_layout()
    return _save(fig, path)


def yield_series_figure(path, series: YieldSeries):
    fig, ax = plt.subplots(figsize=(9, 3.2))
    ax.plot(series.tau_prime_fs, series.yields, lw=0.6)
    ax.set_xlabel("probe delay tau' (fs)")
    ax.set_ylabel("dissociation yield")
    fig.tight_layout()
    return _save(fig, path)


def spectrum_figure(path, density: SpectralDensity, period_window=(5.0, 40.0)):
    fig, ax = plt.subplots(figsize=(7, 4))
    periods = density.period_fs
    sel = (periods >= period_window[0]) & (periods <= period_window[1])
    ax.plot(periods[sel], density.magnitudes[sel], lw=0.9)
    ax.set_xlabel("beat period (fs)")
    ax.set_ylabel("spectral magnitude")
    fig.tight_layout()
    return _save(fig, path)


def coupling_figure(path, d2: np.ndarray):
    fig, ax = plt.subplots(figsize=(5, 4.2))
    img = ax.imshow(np.abs(d2), origin="lower", cmap="viridis")
    ax.set_xlabel("n'")
    ax.set_ylabel("n")
    fig.colorbar(img, ax=ax, label="|<n| d^2 |n'>| (a.u.)")
    fig.tight_layout()
    return _save(fig, path)


def clock_figure(path, tau_fs_values, clock_rows, n_show=10):
    fig, axes = plt.subplots(len(clock_rows), 1,
                             figsize=(8, 2.4 * len(clock_rows)), squeeze=False)
    for ax, (tau_fs, start, amps, phases) in zip(axes[:, 0], clock_rows):
        n = np.arange(min(n_show, len(amps)))
        ax.bar(n, amps[: len(n)] ** 2, color="C0", alpha=0.7)
        for i in n:
            ax.annotate("", xy=(i + 0.35 * np.sin(phases[i]),
                                amps[i] ** 2 + 0.08 * np.cos(phases[i])),
                        xytext=(i, amps[i] ** 2),
                        arrowprops=dict(arrowstyle="-", color="C3"))
        ax.set_ylabel(f"|a_n|^2  (start n={start}, tau={tau_fs:g} fs)", fontsize=8)
    axes[-1, 0].set_xlabel("n")
    fig.tight_layout()
    return _save(fig, path)
