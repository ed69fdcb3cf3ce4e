"""Deterministic quadratic-residue partial Fourier sensing and sub-Nyquist harmonic detection."""

from .harmonic import (HarmonicSpec, SamplingSchedule, SpectrumEstimate, Tone, add_awgn,
                       assemble_measurement, build_real_system, estimate_spectrum,
                       make_schedule, reconstruct_signal, relative_accumulated_error,
                       synthesize_samples)
from .numtheory import (InvalidParamsError, gauss_sum, gauss_sum_direct, is_prime,
                        is_valid_modulus, jacobi_symbol, quadratic_residue_rows)
from .recovery import RecoveryConfig, RecoveryResult, exhaustive_sparse_solve, least_squares, omp
from .sensing import (SensingParams, build_sensing_matrix, coherence_bruteforce,
                      coherence_closed_form, column_normalize, random_partial_fourier,
                      rip_eigen_sweep, sparsity_guarantee, spectral_norm_squared)

__version__ = "0.1.0"
