import numpy as np
import pytest

from vibcontrol.curves import SampledCurves
from vibcontrol.errors import NumericsError
from vibcontrol.grids import (ChannelField, RadialGrid, TwoChannelState,
                              field_norm_squared, norm_squared, normalized)
from vibcontrol.eigen import project, synthesize
from vibcontrol.pipeline import pulse_window_coefficients
from vibcontrol.propagation import (PropagationConfig, SampledOperators,
                                    absorber_mask, bound_population,
                                    dissociation_yield, make_ledger, propagate,
                                    split_step)
from vibcontrol.pulses import LaserPulse
from vibcontrol.units import D2_PLUS_REDUCED_MASS, fs_to_au

MU = D2_PLUS_REDUCED_MASS


class ConstField:
    """Duck-typed pulse with a constant field, for closed-form step tests."""

    def __init__(self, value):
        self.value = value

    def field_at(self, t):
        return self.value


def no_absorber(dt=0.5, t_end=0.0):
    return PropagationConfig(dt=dt, t_start=0.0, t_end=t_end, absorber_fraction=0.0)


class TestSplitStep:
    def test_exact_two_level_rotation(self):
        # potentials zeroed, kinetic suppressed by a huge mass: one step is a
        # pointwise rotation by theta = F d dt between the channels
        grid = RadialGrid(0.1, 40.0, 256)
        c = 0.8
        sampled = SampledCurves(grid, np.zeros(256), np.zeros(256),
                                np.full(256, c))
        config = no_absorber(dt=0.5)
        ops = SampledOperators(sampled, 1e30, config)
        f = normalized(ChannelField(grid, np.exp(-(grid.r_values - 5) ** 2)))
        state = TwoChannelState.from_g(f)
        fbar = 0.13
        out = split_step(state, 0.0, ops, [ConstField(fbar)])
        theta = fbar * c * 0.5
        assert np.max(np.abs(out.g.amplitudes - np.cos(theta) * f.amplitudes)) < 1e-12
        assert np.max(np.abs(out.u.amplitudes + 1j * np.sin(theta) * f.amplitudes)) < 1e-12

    def test_stationary_state_1000_steps(self, basis, sampled):
        n = 2
        state = TwoChannelState.from_g(basis.state(n))
        config = no_absorber(dt=0.5, t_end=500.0)
        result = propagate(state, [], config, sampled=sampled, reduced_mass=MU)
        a = project(result.state, basis)
        pops = np.abs(a) ** 2
        assert pops[n] == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.delete(pops, n)) < 1e-10
        expected = -basis.energies[n] * result.t_end
        assert np.angle(a[n] * np.exp(-1j * expected)) == pytest.approx(0.0, abs=1e-4)

    def test_eigenstate_fieldfree_100fs(self, basis, sampled):
        n = 5
        state = TwoChannelState.from_g(basis.state(n))
        config = no_absorber(dt=0.5, t_end=fs_to_au(100.0))
        result = propagate(state, [], config, sampled=sampled, reduced_mass=MU)
        a = project(result.state, basis)[n]
        assert abs(a) == pytest.approx(1.0, abs=1e-6)
        assert np.angle(a * np.exp(1j * basis.energies[n] * result.t_end)) \
            == pytest.approx(0.0, abs=1e-3)


class TestConservation:
    def test_norm_conservation_1e4_steps(self, fc, sampled):
        state, _ = fc
        config = no_absorber(dt=0.5, t_end=5000.0)
        result = propagate(state.copy(), [], config, sampled=sampled, reduced_mass=MU)
        assert abs(norm_squared(result.state) - norm_squared(state)) < 1e-10
        assert np.max(np.abs(result.norms - result.norms[0])) < 1e-10

    def test_absorber_accounting(self, fc, sampled):
        state, _ = fc
        probe = LaserPulse.from_experiment(4e14, 790.0, 20.0, 5.0)
        config = PropagationConfig(dt=0.5, t_start=0.0, t_end=fs_to_au(120.0))
        result = propagate(state.copy(), [probe], config, sampled=sampled,
                           reduced_mass=MU)
        budget = norm_squared(result.state) + result.absorbed_flux
        assert budget == pytest.approx(1.0, abs=1e-9)
        assert result.absorbed_flux > 1e-4   # strong pulse really ejects flux

    def test_zero_duration_identity(self, fc, sampled):
        state, _ = fc
        config = no_absorber(dt=0.5, t_end=0.0)
        result = propagate(state.copy(), [], config, sampled=sampled, reduced_mass=MU)
        assert np.array_equal(result.state.g.amplitudes, state.g.amplitudes)
        assert result.n_steps == 0


class TestAccuracy:
    def test_second_order_dt_convergence(self, basis, sampled, fc):
        state, _ = fc
        pulse = LaserPulse.from_experiment(5e13, 790.0, 12.5, 5.0)
        t_end = 1034.0  # divisible by every dt below

        def run(dt):
            config = no_absorber(dt=dt, t_end=t_end)
            r = propagate(state.copy(), [pulse], config, sampled=sampled,
                          reduced_mass=MU)
            return np.concatenate([r.state.g.amplitudes, r.state.u.amplitudes])

        ref = run(0.125)
        err1 = np.linalg.norm(run(1.0) - ref)
        err2 = np.linalg.norm(run(0.5) - ref)
        assert 3.5 < err1 / err2 < 4.5

    def test_carrier_sign_insensitivity(self, basis, sampled, fc):
        state, _ = fc
        pops = {}
        for phase in (0.0, np.pi):
            pulse = LaserPulse.from_experiment(5e13, 790.0, 293.0, 5.0,
                                               carrier_phase=phase)
            t0, t1 = pulse.window()
            a = project(state, basis) * np.exp(-1j * basis.energies * t0)
            start = TwoChannelState.from_g(synthesize(basis, a))
            config = PropagationConfig(dt=0.5, t_start=t0, t_end=t1)
            r = propagate(start, [pulse], config, sampled=sampled, reduced_mass=MU)
            pops[phase] = np.abs(project(r.state, basis)) ** 2
        a, b = pops[0.0], pops[np.pi]
        sel = a > 1e-3
        assert np.max(np.abs(a[sel] - b[sel]) / a[sel]) < 0.01

    def test_time_reversal_exact(self, fc, sampled):
        # with midpoint field sampling the reversed product is the exact
        # algebraic inverse, so recovery is limited only by rounding
        state, _ = fc
        pulse = LaserPulse.from_experiment(5e13, 790.0, 6.0, 3.0)
        t_end = 500.0
        config = no_absorber(dt=0.5, t_end=t_end)
        fwd = propagate(state.copy(), [pulse], config, sampled=sampled,
                        reduced_mass=MU)

        class Reversed:
            def field_at(self, t):
                return pulse.field_at(t_end - t)

        conj = TwoChannelState(
            ChannelField(state.grid, np.conj(fwd.state.g.amplitudes)),
            ChannelField(state.grid, np.conj(fwd.state.u.amplitudes)))
        back = propagate(conj, [Reversed()], config, sampled=sampled,
                         reduced_mass=MU)
        recovered = np.conj(back.state.g.amplitudes)
        assert np.max(np.abs(recovered - state.g.amplitudes)) < 1e-10


class TestFailureModes:
    def test_nan_aborts_with_step_index(self, fc, sampled):
        state, _ = fc

        class BadPulse:
            def field_at(self, t):
                return np.nan if t > 5.0 else 0.0

        config = PropagationConfig(dt=0.5, t_start=0.0, t_end=100.0,
                                   record_stride=5)
        with pytest.raises(NumericsError, match="step"):
            propagate(state.copy(), [BadPulse()], config, sampled=sampled,
                      reduced_mass=MU)

    def test_grid_mismatch_rejected(self, fc, sampled):
        state, _ = fc
        other = RadialGrid(0.1, 40.0, 1024)
        bad = SampledCurves(other, np.zeros(1024), np.zeros(1024), np.zeros(1024))
        config = no_absorber(t_end=1.0)
        with pytest.raises(ValueError):
            propagate(state.copy(), [], config, sampled=bad, reduced_mass=MU)


class TestDissociationYield:
    def test_field_free_yield_zero(self, fc, basis, sampled):
        state, _ = fc
        initial = bound_population(state, basis)
        config = no_absorber(dt=0.5, t_end=fs_to_au(10.0))
        r = propagate(state.copy(), [], config, sampled=sampled, reduced_mass=MU)
        assert dissociation_yield(r.state, basis, initial_norm=initial) \
            == pytest.approx(0.0, abs=1e-9)

    def test_u_channel_counts_fully(self, basis):
        grid = basis.grid
        u = normalized(ChannelField(grid, np.exp(-((grid.r_values - 6) ** 2))))
        g = ChannelField(grid, np.zeros(grid.n_points))
        state = TwoChannelState(g, u)
        assert dissociation_yield(state, basis, initial_norm=1.0) \
            == pytest.approx(1.0, abs=1e-12)

    def test_strong_probe_ledger_consistency(self, fc, basis, sampled):
        state, _ = fc
        probe = LaserPulse.from_experiment(4e14, 790.0, 15.0, 5.0)
        config = PropagationConfig(dt=0.5, t_start=0.0, t_end=fs_to_au(100.0))
        r = propagate(state.copy(), [probe], config, sampled=sampled,
                      reduced_mass=MU)
        y = dissociation_yield(r.state, basis, initial_norm=1.0)
        ledger = make_ledger(r.state, basis, r.absorbed_flux)
        assert 0.0 < y < 1.0
        assert y == pytest.approx(ledger.total, abs=1e-6)
        assert 0.0 <= ledger.u_population <= 1.0
        assert 0.0 <= ledger.g_continuum_population <= 1.0


class TestAbsorberMask:
    def test_disabled(self):
        grid = RadialGrid(0.1, 40.0, 256)
        assert np.all(absorber_mask(grid, 0.0) == 1.0)

    def test_shape(self):
        grid = RadialGrid(0.1, 40.0, 1024)
        m = absorber_mask(grid, 0.10)
        assert np.all(m <= 1.0) and np.all(m >= 0.0)
        assert np.all(m[: int(0.9 * 1024) - 1] == 1.0)
        assert m[-1] < 0.05
        assert np.all(np.diff(m[int(0.9 * 1024):]) <= 1e-12)


class TestWindowedScanStep:
    def test_window_jump_matches_full_propagation(self, scan_context, basis,
                                                  sampled):
        # coefficients carried analytically to the window edge agree with a
        # start-to-finish numerical propagation from t = 0
        tau_fs = 60.0
        pulse = LaserPulse.from_experiment(5e13, 790.0, tau_fs, 5.0)
        a_win, _ = pulse_window_coefficients(scan_context, pulse)

        state = TwoChannelState.from_g(synthesize(basis, scan_context.coefficients))
        t0, t1 = pulse.window()
        config = PropagationConfig(dt=0.5, t_start=0.0, t_end=t1)
        r = propagate(state, [pulse], config, sampled=sampled, reduced_mass=MU)
        a_full = project(r.state, basis) * np.exp(1j * basis.energies * r.t_end)

        p_win = np.abs(a_win) ** 2
        p_full = np.abs(a_full) ** 2
        assert np.max(np.abs(p_win - p_full)) < 5e-4
