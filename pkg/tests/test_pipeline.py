import numpy as np
import pytest

import vibcontrol.pipeline as pipeline_mod
from vibcontrol.eigen import project
from vibcontrol.grids import field_norm_squared
from vibcontrol.pipeline import (ScanContext, YieldSeries, beat_spectrum,
                                 control_scan, franck_condon_pump,
                                 parity_contrast, probe_scan)
from vibcontrol.pulses import LaserPulse
from vibcontrol.units import FS_PER_AU, fs_to_au


def short_pulse(intensity, tau_fs, fwhm_fs=1.0):
    return LaserPulse.from_experiment(intensity, 790.0, tau_fs, fwhm_fs)


class TestPump:
    def test_fc_distribution(self, fc):
        state, coeffs = fc
        p = np.abs(coeffs) ** 2
        assert int(np.argmax(p)) in (2, 3)
        assert np.all(p[:10] > 0.01)
        assert field_norm_squared(state.g) == pytest.approx(1.0, abs=1e-12)
        assert field_norm_squared(state.u) == 0.0

    def test_unit_weight_is_identity(self, d2_ground, basis, fc):
        _, plain = fc
        _, weighted = franck_condon_pump(
            d2_ground, basis, weight=np.ones(basis.grid.n_points))
        assert np.max(np.abs(weighted - plain)) < 1e-12

    def test_weight_reshapes_distribution(self, d2_ground, basis, fc):
        _, plain = fc
        w = np.exp(2.0 * basis.grid.r_values)   # bias toward larger R
        _, skewed = franck_condon_pump(d2_ground, basis, weight=w)
        assert np.argmax(np.abs(skewed) ** 2) > np.argmax(np.abs(plain) ** 2)

    def test_nonpositive_weight_rejected(self, d2_ground, basis):
        with pytest.raises(ValueError, match="positive"):
            franck_condon_pump(d2_ground, basis,
                               weight=np.zeros(basis.grid.n_points))

    def test_eigenstate_input_is_stationary(self, basis):
        _, coeffs = franck_condon_pump(basis.state(0), basis)
        assert abs(coeffs[0]) == pytest.approx(1.0, abs=1e-8)
        assert np.max(np.abs(coeffs[1:])) < 1e-8


class TestParityContrast:
    def test_pure_even(self):
        p = np.zeros(10)
        p[0::2] = 0.2
        assert parity_contrast(p) == pytest.approx(1.0)

    def test_pure_odd(self):
        p = np.zeros(10)
        p[1::2] = 0.2
        assert parity_contrast(p) == pytest.approx(-1.0)

    def test_fc_contrast_small(self, fc):
        _, coeffs = fc
        assert abs(parity_contrast(np.abs(coeffs) ** 2)) < 0.4

    def test_zero_row_rejected(self):
        with pytest.raises(ValueError):
            parity_contrast(np.zeros(10))


class TestControlScan:
    def test_zero_intensity_rows_keep_fc(self, scan_context):
        template = short_pulse(0.0, 0.0)
        taus = np.array([50.0, 51.0, 52.0])
        pmap = control_scan(scan_context, template, taus)
        p0 = np.abs(scan_context.coefficients[: scan_context.n_report]) ** 2
        for row in pmap.populations:
            assert np.max(np.abs(row - p0)) < 1e-6
        assert np.max(np.abs(pmap.yields)) < 1e-6
        assert pmap.row_status == ()

    def test_rows_independent_of_workers(self, scan_context):
        template = short_pulse(5e13, 0.0)
        taus = np.array([100.0, 101.0, 102.0])
        one = control_scan(scan_context, template, taus, workers=1)
        two = control_scan(scan_context, template, taus, workers=2)
        assert np.array_equal(one.populations, two.populations)
        assert np.array_equal(one.yields, two.yields)
        assert np.array_equal(one.contrast, two.contrast)

    def test_row_failure_is_flagged(self, scan_context, monkeypatch):
        real = pipeline_mod.pulse_window_coefficients

        def sometimes_broken(ctx, pulse, window_half_widths=5.0):
            if abs(pulse.center - fs_to_au(101.0)) < 1e-6:
                raise RuntimeError("synthetic failure")
            return real(ctx, pulse, window_half_widths)

        monkeypatch.setattr(pipeline_mod, "pulse_window_coefficients",
                            sometimes_broken)
        template = short_pulse(0.0, 0.0)
        pmap = control_scan(scan_context, template,
                            np.array([100.0, 101.0, 102.0]))
        assert len(pmap.row_status) == 1
        assert pmap.row_status[0][0] == 1
        assert "synthetic failure" in pmap.row_status[0][1]
        assert np.all(np.isnan(pmap.populations[1]))
        assert not np.any(np.isnan(pmap.populations[0]))


class TestProbeScan:
    def test_zero_intensity_yields_zero(self, scan_context):
        template = short_pulse(0.0, 0.0)
        series = probe_scan(scan_context, template, np.arange(310.0, 315.0))
        assert np.array_equal(series.yields, np.zeros(5))

    def test_uniform_spacing_enforced(self):
        with pytest.raises(ValueError, match="uniform"):
            YieldSeries(np.array([0.0, 1.0, 3.0]), np.zeros(3))


class TestBeatSpectrum:
    def synthetic_series(self, period_fs=11.0, n=600, step_fs=1.0):
        t = np.arange(n) * step_fs
        y = 0.3 + 0.05 * np.cos(2 * np.pi * t / period_fs)
        return YieldSeries(t, y)

    def test_single_cosine_peak_position(self):
        series = self.synthetic_series(period_fs=11.0)
        density = beat_spectrum(series)
        peak = np.argmax(density.magnitudes)
        omega_expected = 2 * np.pi / fs_to_au(11.0)
        bin_width = density.omega_au[1] - density.omega_au[0]
        # within one unpadded resolution bin (pad_factor bins of the fine grid)
        assert abs(density.omega_au[peak] - omega_expected) \
            <= density.pad_factor * bin_width + 1e-15
        assert density.period_fs[peak] == pytest.approx(11.0, abs=0.2)

    def test_constant_series_has_no_peaks(self):
        t = np.arange(600.0)
        density = beat_spectrum(YieldSeries(t, np.full(600, 0.25)))
        assert np.max(density.magnitudes) < 1e-12

    def test_minimum_samples(self):
        with pytest.raises(ValueError, match="256"):
            beat_spectrum(YieldSeries(np.arange(100.0), np.zeros(100)))

    def test_parseval_consistency(self):
        series = self.synthetic_series()
        density = beat_spectrum(series, pad_factor=4)
        y = series.yields - series.yields.mean()
        windowed = y * np.hanning(len(y))
        n_pad = 4 * len(y)
        mags = density.magnitudes
        # rfft Parseval with even-length zero padding
        power_freq = (mags[0] ** 2 + 2 * np.sum(mags[1:-1] ** 2) + mags[-1] ** 2) / n_pad
        assert power_freq == pytest.approx(np.sum(windowed**2), rel=1e-10)

    def test_metadata(self):
        density = beat_spectrum(self.synthetic_series())
        assert density.window == "hann"
        assert len(density.magnitudes) == 4 * 600 // 2 + 1
