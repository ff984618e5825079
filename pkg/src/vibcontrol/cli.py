"""Command-line interface.

Subcommands: eigen | propagate | scan-control | scan-probe | spectrum | model.
A config file (--config) sets every parameter; individual flags override
config keys.  Each command writes its CSV products, figures (unless
--no-figures) and a JSON manifest into the output directory.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import importlib.metadata
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import report, units
from .config import (ConfigError, RunConfig, RunManifest, default_config,
                     file_checksum, load_config)
from .curves import bundled_curves, load_curves, sample_on_grid
from .eigen import fit_anharmonic, project, solve_bound_states
from .errors import NumericsError, VibcontrolError
from .grids import RadialGrid
from .model import (balance_ratio, clock_phases, compose_pulse,
                    coupling_matrix, kappa_matrix, predict_interference_times)
from .pipeline import (PopulationMap, ScanContext, beat_spectrum, control_scan,
                       franck_condon_pump, neutral_ground_field, parity_contrast,
                       probe_scan, pulse_window_coefficients, PumpSpec)
from .propagation import PropagationConfig, propagate
from .pulses import LaserPulse
from .runner import default_workers


def _version() -> str:
    try:
        return importlib.metadata.version("vibcontrol")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class Setup:
    """Everything derived from the config that commands share."""

    cfg: RunConfig
    grid: RadialGrid
    sampled: object
    basis: object          # full bound manifold, used by the scan machinery
    n_report: int
    curve_checksum: str
    curve_source: str


def build_setup(cfg: RunConfig, curves_path=None) -> Setup:
    import importlib.resources

    mol = cfg["molecule"]
    source = curves_path or mol["curves"]
    if source == "bundled":
        ref = importlib.resources.files("vibcontrol.data").joinpath(
            "h2plus_bo_curves.dat")
        with importlib.resources.as_file(ref) as p:
            checksum = file_checksum(p)
            curve_source = str(p)
        curves = bundled_curves()
    else:
        curves = load_curves(source)
        checksum = file_checksum(source)
        curve_source = str(source)

    g = cfg["grid"]
    grid = RadialGrid(g["r_min"], g["r_max"], int(g["n_points"]))
    sampled = sample_on_grid(curves, grid)
    basis = solve_bound_states(grid, sampled.v_g, mol["reduced_mass"],
                               r_cut=cfg["eigen"]["r_cut"])
    return Setup(cfg, grid, sampled, basis, int(cfg["eigen"]["n_states"]),
                 checksum, curve_source)


def _prop_config(cfg: RunConfig, t_start=0.0, t_end=0.0) -> PropagationConfig:
    p = cfg["propagation"]
    return PropagationConfig(dt=p["dt"], t_start=t_start, t_end=t_end,
                             absorber_fraction=p["absorber_fraction"],
                             absorber_strength=p["absorber_strength"],
                             record_stride=int(p["record_stride"]))


def _pulse(section, tau_fs=None) -> LaserPulse:
    tau = section.tau if tau_fs is None else tau_fs
    return LaserPulse.from_experiment(section.intensity, section.wavelength,
                                      tau, section.fwhm, section.phase)


def _pump_state(setup: Setup):
    spec = PumpSpec(mode=setup.cfg["pump"]["mode"],
                    r_e=setup.cfg["pump"]["r_e"],
                    well_depth=setup.cfg["pump"]["well_depth"],
                    omega_cm=setup.cfg["pump"]["omega_cm"])
    ground = neutral_ground_field(setup.basis, spec)
    return franck_condon_pump(ground, setup.basis)


def _pump_context(setup: Setup) -> ScanContext:
    _, coeffs = _pump_state(setup)
    return ScanContext(setup.basis, setup.sampled, _prop_config(setup.cfg),
                       coeffs, setup.n_report)


def _manifest(setup: Setup, command: str) -> RunManifest:
    return RunManifest(command=command, config=setup.cfg.as_flat_dict(),
                       version=_version(), curve_checksum=setup.curve_checksum)


def _workers(cfg: RunConfig) -> int:
    configured = int(cfg["output"]["workers"])
    return configured if configured > 0 else default_workers()


def _out(cfg, out_dir, name):
    directory = out_dir or cfg["output"]["directory"]
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


# ------------------------------------------------------------------ commands

def cmd_eigen(setup: Setup, args) -> int:
    man = _manifest(setup, "eigen")
    basis = setup.basis
    n_report = min(setup.n_report, basis.n_max)
    trimmed = type(basis)(basis.grid, basis.energies[:n_report],
                          basis.wavefunctions[:n_report], basis.reduced_mass)
    csv_path = report.eigen_csv(_out(setup.cfg, args.out_dir, "eigen.csv"), trimmed)
    man.outputs.append(csv_path)
    fit = fit_anharmonic(basis)
    times = predict_interference_times(fit)
    print(f"bound states: {basis.n_max}; fundamental beat "
          f"{2 * np.pi / (basis.energies[1] - basis.energies[0]) * units.FS_PER_AU:.2f} fs")
    print(f"anharmonic fit: omega_e = {fit.omega_e:.6f} a.u., "
          f"omega_e_x_e = {fit.omega_e_x_e:.3e} a.u.")
    print(f"fractional revival estimate: {times['fractional_revival_fs']:.1f} fs; "
          f"parity flip interval: {times['parity_flip_interval_fs']:.1f} fs")
    if args.figures:
        man.outputs.append(report.eigen_figure(
            _out(setup.cfg, args.out_dir, "eigen.png"), trimmed, setup.sampled))
    man.write(_out(setup.cfg, args.out_dir, "manifest_eigen.json"))
    return 0


def cmd_propagate(setup: Setup, args) -> int:
    man = _manifest(setup, "propagate")
    state, _ = _pump_state(setup)
    pulses = []
    control = setup.cfg.control_pulse()
    if control.intensity > 0:
        pulses.append(_pulse(control))
    config = _prop_config(setup.cfg, 0.0, units.fs_to_au(args.t_end))
    result = propagate(state, pulses, config, sampled=setup.sampled,
                       reduced_mass=setup.basis.reduced_mass, basis=setup.basis)
    csv_path = report.propagation_csv(
        args.out or _out(setup.cfg, args.out_dir, "propagation.csv"),
        result, result.yields)
    man.outputs.append(csv_path)
    if args.figures:
        man.outputs.append(report.propagation_figure(
            _out(setup.cfg, args.out_dir, "propagation.png"), result))
    man.write(_out(setup.cfg, args.out_dir, "manifest_propagate.json"))
    print(f"propagated {result.n_steps} steps to t = {units.au_to_fs(result.t_end):.1f} fs; "
          f"final norm {result.norms[-1]:.6f}, absorbed {result.absorbed_flux:.3e}")
    return 0


def cmd_scan_control(setup: Setup, args) -> int:
    man = _manifest(setup, "scan-control")
    ctx = _pump_context(setup)
    template = _pulse(setup.cfg.control_pulse())
    taus = setup.cfg.scan("scan_control").values()
    pmap = control_scan(ctx, template, taus, workers=_workers(setup.cfg))
    for idx, msg in pmap.row_status:
        man.mark_row(idx, "error", msg)
    csv_path = report.population_map_csv(
        _out(setup.cfg, args.out_dir, "control_scan.csv"), pmap)
    man.outputs.append(csv_path)
    if args.figures:
        man.outputs.append(report.population_map_figure(
            _out(setup.cfg, args.out_dir, "control_scan.png"), pmap))
    man.write(_out(setup.cfg, args.out_dir, "manifest_scan_control.json"))
    ok = len(taus) - len(pmap.row_status)
    print(f"scan-control: {ok}/{len(taus)} rows ok; "
          f"contrast range [{np.nanmin(pmap.contrast):+.3f}, {np.nanmax(pmap.contrast):+.3f}]")
    return 0


def cmd_scan_probe(setup: Setup, args) -> int:
    man = _manifest(setup, "scan-probe")
    ctx = _pump_context(setup)
    control = setup.cfg.control_pulse()
    if control.intensity > 0:
        a_ctrl, _ = pulse_window_coefficients(ctx, _pulse(control))
        ctx = ScanContext(ctx.basis, ctx.sampled, ctx.config, a_ctrl, ctx.n_report)
    template = _pulse(setup.cfg.probe_pulse())
    taus = setup.cfg.scan("scan_probe").values()
    series = probe_scan(ctx, template, taus, workers=_workers(setup.cfg))
    csv_path = report.yield_series_csv(
        _out(setup.cfg, args.out_dir, "probe_scan.csv"), series)
    man.outputs.append(csv_path)
    if args.figures:
        man.outputs.append(report.yield_series_figure(
            _out(setup.cfg, args.out_dir, "probe_scan.png"), series))
    man.write(_out(setup.cfg, args.out_dir, "manifest_scan_probe.json"))
    print(f"scan-probe: {len(taus)} rows; yield range "
          f"[{series.yields.min():.4f}, {series.yields.max():.4f}]")
    return 0


def cmd_spectrum(setup: Setup, args) -> int:
    man = _manifest(setup, "spectrum")
    series = report.read_yield_series(args.series)
    density = beat_spectrum(series)
    csv_path = report.spectrum_csv(_out(setup.cfg, args.out_dir, "spectrum.csv"), density)
    man.outputs.append(csv_path)
    if args.figures:
        man.outputs.append(report.spectrum_figure(
            _out(setup.cfg, args.out_dir, "spectrum.png"), density))
    man.write(_out(setup.cfg, args.out_dir, "manifest_spectrum.json"))
    sel = density.omega_au > 0
    peak = np.argmax(density.magnitudes * sel)
    print(f"spectrum: {len(series.yields)} samples; strongest component at "
          f"{density.period_fs[peak]:.2f} fs period")
    return 0


def cmd_model(setup: Setup, args) -> int:
    man = _manifest(setup, "model")
    basis = setup.basis
    n_report = min(setup.n_report, basis.n_max)
    coupling = coupling_matrix(basis, setup.sampled.d)
    d2 = coupling.d2[:n_report, :n_report]
    man.outputs.append(report.coupling_csv(
        _out(setup.cfg, args.out_dir, "coupling_matrix.csv"), d2))
    if args.figures:
        man.outputs.append(report.coupling_figure(
            _out(setup.cfg, args.out_dir, "coupling_matrix.png"), d2))

    control = setup.cfg.control_pulse()
    closure = setup.cfg["eigen"]["closure_energy"]
    clock_rows = []
    for tau_fs in args.tau:
        for start in args.initial_n:
            pulse = _pulse(control, tau_fs=tau_fs)
            amps, phases = clock_phases(start, pulse, basis.energies, coupling,
                                        closure)
            clock_rows.append((tau_fs, start, amps[:n_report], phases[:n_report]))
    man.outputs.append(report.clock_csv(
        _out(setup.cfg, args.out_dir, "clocks.csv"), args.tau, clock_rows))
    if args.figures:
        man.outputs.append(report.clock_figure(
            _out(setup.cfg, args.out_dir, "clocks.png"), args.tau,
            [row for row in clock_rows if row[1] == args.initial_n[0]]))

    fit = fit_anharmonic(basis)
    times = predict_interference_times(fit)
    import json
    times_path = _out(setup.cfg, args.out_dir, "predicted_times.json")
    with open(times_path, "w") as fh:
        json.dump({**times, "omega_e_au": fit.omega_e,
                   "omega_e_x_e_au": fit.omega_e_x_e,
                   "fit_residual_hartree": fit.residual}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    man.outputs.append(times_path)
    print(f"predicted fractional revival {times['fractional_revival_fs']:.1f} fs, "
          f"parity flip interval {times['parity_flip_interval_fs']:.1f} fs")

    if args.population_map:
        comparison = _model_vs_full(setup, args.population_map, coupling, closure)
        path = _out(setup.cfg, args.out_dir, "model_vs_full.csv")
        report.write_csv(path, ["tau_fs", "contrast_full", "contrast_model",
                                "sign_agrees", "max_abs_pop_diff"], comparison)
        man.outputs.append(path)
        print(f"model-vs-full comparison written for {len(comparison)} delays")
    man.write(_out(setup.cfg, args.out_dir, "manifest_model.json"))
    return 0


def _model_vs_full(setup: Setup, pmap_csv, coupling, closure):
    ctx = _pump_context(setup)
    data = np.loadtxt(pmap_csv, delimiter=",", skiprows=1, ndmin=2)
    n_pop = data.shape[1] - 3
    control = setup.cfg.control_pulse()
    rows = []
    for rec in data:
        tau_fs, pops_full = rec[0], rec[1:1 + n_pop]
        pulse = _pulse(control, tau_fs=tau_fs)
        a_model = compose_pulse(ctx.coefficients, pulse, setup.basis.energies,
                                coupling, closure)
        pops_model = np.abs(a_model[:n_pop]) ** 2
        c_full = parity_contrast(pops_full)
        c_model = parity_contrast(pops_model)
        rows.append((tau_fs, c_full, c_model,
                     int(np.sign(c_full) == np.sign(c_model)),
                     float(np.max(np.abs(pops_model - pops_full)))))
    return rows


# ------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vibcontrol",
        description="Two-channel vibrational wavepacket control simulator")
    ap.add_argument("--config", help="path to an INI config file")
    ap.add_argument("--out-dir", help="output directory (overrides [output] directory)")
    ap.add_argument("--curves", help="curve file (overrides the bundled tabulation)")
    ap.add_argument("--no-figures", dest="figures", action="store_false",
                    help="skip figure rendering")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("eigen", help="bound levels, beat periods, anharmonic fit")

    p = sub.add_parser("propagate", help="single propagation of the pumped wavepacket")
    p.add_argument("--intensity", type=float, help="control intensity (W/cm^2)")
    p.add_argument("--wavelength", type=float, help="carrier wavelength (nm)")
    p.add_argument("--fwhm", type=float, help="pulse FWHM (fs)")
    p.add_argument("--tau", type=float, help="pulse centre (fs)")
    p.add_argument("--t-end", type=float, default=650.0, help="end time (fs)")
    p.add_argument("--dt", type=float, help="time step (a.u.)")
    p.add_argument("--out", help="output CSV path (default <out-dir>/propagation.csv)")

    p = sub.add_parser("scan-control", help="population map against control delay")
    p.add_argument("--tau-start", type=float)
    p.add_argument("--tau-stop", type=float)
    p.add_argument("--tau-step", type=float)

    p = sub.add_parser("scan-probe", help="dissociation yield against probe delay")
    p.add_argument("--tau-start", type=float)
    p.add_argument("--tau-stop", type=float)
    p.add_argument("--tau-step", type=float)
    p.add_argument("--control-tau", type=float, help="control delay (fs)")

    p = sub.add_parser("spectrum", help="beat spectrum of a yield series CSV")
    p.add_argument("series", help="probe_scan.csv produced by scan-probe")

    p = sub.add_parser("model", help="second-order interference model products")
    p.add_argument("--tau", type=float, nargs="+", default=[293.0, 306.0])
    p.add_argument("--initial-n", type=int, nargs="+", default=[3, 4, 5])
    p.add_argument("--population-map", help="control_scan.csv to compare against")
    return ap


_OVERRIDES = {
    "intensity": ("control", "intensity"),
    "wavelength": ("control", "wavelength"),
    "fwhm": ("control", "fwhm"),
    "tau": ("control", "tau"),
    "dt": ("propagation", "dt"),
    "tau_start": (None, "tau_start"),
    "tau_stop": (None, "tau_stop"),
    "tau_step": (None, "tau_step"),
    "control_tau": ("control", "tau"),
}


def _apply_overrides(cfg: RunConfig, args):
    scan_section = {"scan-control": "scan_control", "scan-probe": "scan_probe"}.get(
        args.command)
    for attr, (section, key) in _OVERRIDES.items():
        value = getattr(args, attr, None)
        if value is None or isinstance(value, (list, tuple)):
            continue
        target = section or scan_section
        if target is None:
            continue
        if key in ("tau_step",) and value <= 0:
            raise ConfigError(f"--{attr.replace('_', '-')} must be positive")
        cfg.sections[target][key] = value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        _apply_overrides(cfg, args)
        setup = build_setup(cfg, curves_path=args.curves)
        handler = {
            "eigen": cmd_eigen,
            "propagate": cmd_propagate,
            "scan-control": cmd_scan_control,
            "scan-probe": cmd_scan_probe,
            "spectrum": cmd_spectrum,
            "model": cmd_model,
        }[args.command]
        return handler(setup, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericsError,) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except VibcontrolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
