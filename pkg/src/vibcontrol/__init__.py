"""Coherent vibrational control of the deuterium molecular ion.

A two-channel split-operator simulator for nuclear wavepackets on the bound
and repulsive surfaces of D2+, with the tooling around it: a Fourier-grid
eigensolver for the vibrational manifold, control-delay scans producing the
even/odd parity interference map, a closed-form second-order model of the
interference, and probe-dissociation scans whose beat spectrum identifies
the populated states.
"""

from .curves import (MoleculeParams, MorseCurve, PotentialCurveSet,
                     bundled_curves, load_curves, morse_curve, sample_on_grid)
from .eigen import (SpectralConstants, VibrationalBasis, beat_frequency,
                    fit_anharmonic, project, solve_bound_states, synthesize)
from .errors import (ConfigError, CurveDataError, GridMismatchError,
                     NumericsError, VibcontrolError)
from .grids import (ChannelField, RadialGrid, TwoChannelState,
                    expectation_position, from_momentum, inner_product,
                    norm_squared, to_momentum)
from .model import (CouplingMatrix, KappaMatrix, apply_impulse, clock_phases,
                    compose_pulse, coupling_matrix, kappa, kappa_matrix,
                    predict_interference_times)
from .pipeline import (PopulationMap, PumpSpec, ScanContext, SpectralDensity,
                       YieldSeries, beat_spectrum, control_scan,
                       franck_condon_pump, neutral_ground_field,
                       parity_contrast, probe_scan, pulse_window_coefficients)
from .propagation import (DissociationLedger, PropagationConfig,
                          PropagationResult, SampledOperators,
                          dissociation_yield, make_ledger, propagate,
                          split_step)
from .pulses import LaserPulse, field_at
from .units import intensity_to_field

__version__ = "0.1.0"
