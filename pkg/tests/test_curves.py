import io

import numpy as np
import pytest

from vibcontrol.curves import (MorseCurve, bundled_curves, load_curves,
                               morse_curve, sample_on_grid)
from vibcontrol.errors import CurveDataError
from vibcontrol.grids import RadialGrid
from vibcontrol.units import EV_PER_HARTREE


def table_text(rows):
    return "\n".join("  ".join(f"{v:.10e}" for v in row) for row in rows)


def synthetic_rows(n=80):
    # a well-behaved fake curve set for loader tests
    r = np.linspace(0.5, 12.0, n)
    v_g = 0.1 * (1 - np.exp(-0.7 * (r - 2.0))) ** 2 - 0.1
    v_u = 0.25 * np.exp(-1.1 * (r - 0.5))
    d = r / 2.0 * (1 - np.exp(-r))
    return np.column_stack([r, v_g, v_u, d])


class TestLoader:
    def test_bundled_well_depth(self, curves):
        # ~0.103 hartree below the dissociation limit (~2.79 eV)
        assert curves.well_depth == pytest.approx(0.1026, abs=0.002)
        assert curves.well_depth * EV_PER_HARTREE == pytest.approx(2.79, abs=0.05)
        assert curves.r_well == pytest.approx(2.0, abs=0.05)

    def test_bundled_dissociation_limit_convention(self, curves):
        assert abs(curves.v_u[-1]) < 1e-4
        assert abs(curves.v_g[-1] - curves.v_u[-1]) < 1e-6

    def test_insufficient_samples(self):
        rows = synthetic_rows()[:3]
        with pytest.raises(CurveDataError, match="insufficient samples"):
            load_curves(io.StringIO(table_text(rows)))

    def test_u_below_g_names_row(self):
        rows = synthetic_rows()
        rows[17, 2] = rows[17, 1] - 0.01
        with pytest.raises(CurveDataError, match="row 17"):
            load_curves(io.StringIO(table_text(rows)))

    def test_non_monotone_r_names_row(self):
        rows = synthetic_rows()
        rows[30, 0] = rows[29, 0]
        with pytest.raises(CurveDataError, match="row 30"):
            load_curves(io.StringIO(table_text(rows)))

    def test_nan_rejected(self):
        rows = synthetic_rows()
        rows[12, 1] = np.nan
        with pytest.raises(CurveDataError, match="row 12"):
            load_curves(io.StringIO(table_text(rows)))

    def test_wrong_column_count(self):
        text = "\n".join("1.0 2.0 3.0" for _ in range(60))
        with pytest.raises(CurveDataError):
            load_curves(io.StringIO(text))

    def test_comments_allowed(self):
        text = "# header\n" + table_text(synthetic_rows())
        assert load_curves(io.StringIO(text)).well_depth > 0


class TestSampling:
    def test_reproduces_knots(self, curves):
        grid = RadialGrid(0.1, 40.0, 2048)
        s = sample_on_grid(curves, grid)
        # grid points that coincide with tabulated R (within fp noise)
        for i, r in enumerate(curves.r_samples[::25]):
            j = np.argmin(np.abs(grid.r_values - r))
            if abs(grid.r_values[j] - r) < 1e-9:
                assert s.v_g[j] == pytest.approx(curves.v_g[25 * i], abs=1e-10)

    def test_spline_exact_at_knot_values(self, curves):
        # evaluate the interpolant directly on the tabulated abscissae
        assert np.max(np.abs(curves._spl_g(curves.r_samples) - curves.v_g)) < 1e-10
        assert np.max(np.abs(curves._spl_d(curves.r_samples) - curves.d)) < 1e-10

    def test_beyond_table_asymptotics(self, curves):
        grid = RadialGrid(0.1, 40.0, 2048)
        s = sample_on_grid(curves, grid)
        outside = grid.r_values > curves.r_samples[-1]
        assert np.all(s.v_g[outside] == 0.0)
        assert np.all(s.v_u[outside] == 0.0)
        assert np.allclose(s.d[outside], grid.r_values[outside] / 2.0)

    def test_repulsive_u_monotone(self, curves):
        # the upper surface falls monotonically outward over the well region
        grid = RadialGrid(0.1, 40.0, 2048)
        s = sample_on_grid(curves, grid)
        sel = (grid.r_values > curves.r_well) & (grid.r_values < 10.0)
        assert np.all(np.diff(s.v_u[sel]) < 0)

    def test_spline_second_derivative_continuous(self, curves):
        d2 = curves._spl_g.derivative(2)
        knots = curves.r_samples[5:-5:20]
        eps = 1e-7
        jumps = np.abs(d2(knots + eps) - d2(knots - eps))
        assert np.max(jumps) < 1e-4

    def test_inner_wall_rises(self, curves):
        grid = RadialGrid(0.05, 40.0, 2048)
        s = sample_on_grid(curves, grid)
        inner = grid.r_values < curves.r_samples[0]
        assert np.all(np.diff(s.v_g[inner]) < 0)  # decreasing toward the table edge
        assert s.v_g[0] > s.v_g[np.argmin(np.abs(grid.r_values - 0.2))]


class TestMorse:
    def test_minimum_value(self):
        m = morse_curve(0.103, 0.72, 2.0)
        assert m(2.0) == pytest.approx(-0.103, abs=1e-14)

    def test_asymptote(self):
        m = morse_curve(0.103, 0.72, 2.0)
        assert m(60.0) == pytest.approx(0.0, abs=1e-12)

    def test_parameters_positive(self):
        with pytest.raises(ValueError):
            morse_curve(-0.1, 0.7, 2.0)
        with pytest.raises(ValueError):
            morse_curve(0.1, 0.0, 2.0)

    def test_closed_form_spectrum_monotone(self):
        m = morse_curve(0.103, 0.72, 2.0)
        e = m.eigenvalues(1835.24, 20)
        assert np.all(np.diff(e) > 0)
        assert np.all(e < 0)

    def test_from_frequency_roundtrip(self):
        omega = 0.0142
        m = MorseCurve.from_frequency(0.1745, omega, 1.40, 1835.24)
        assert m.harmonic_frequency(1835.24) == pytest.approx(omega, rel=1e-12)
