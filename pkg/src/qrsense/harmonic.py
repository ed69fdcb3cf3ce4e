"""Sub-Nyquist harmonic detection with a deterministic sampling schedule.

A real multi-tone signal on the grid ``n * f0`` (n = 1..M) is sampled at
M instants ``l * dt`` with ``l = m**2 mod N``. Because the rate is
``fS = N f0 / p``, the sample taken for index m equals row m of the
sensing matrix built with the same p, so recovering the spectrum is a
sparse recovery problem on that matrix. Only real samples are available,
hence the recovery runs on the 2M x 4M real system with the imaginary
half of the measurement set to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numtheory import InvalidParamsError, is_valid_modulus, next_valid_modulus
from .recovery import RecoveryConfig, omp
from .sensing import SensingParams, build_sensing_matrix

TWO_PI = 2.0 * math.pi
EARLY_STOP_RTOL = 1e-9


@dataclass(frozen=True)
class Tone:
    n: int
    amplitude: float
    phase: float


@dataclass(frozen=True)
class SamplingSchedule:
    params: SensingParams
    f0: float

    @property
    def fN(self) -> float:
        return self.params.N * self.f0

    @property
    def fS(self) -> float:
        return self.fN / self.params.p

    @property
    def dt(self) -> float:
        return self.params.p / (self.params.N * self.f0)

    @property
    def acquisition_order(self) -> list[int]:
        """Slots ``m**2 mod N`` for m = 1..M; samples are stored in this order."""
        N = self.params.N
        return [m * m % N for m in range(1, self.params.M + 1)]

    @property
    def slots(self) -> list[int]:
        """The sampling instants (in units of dt) in time order."""
        return sorted(self.acquisition_order)

    def times(self) -> np.ndarray:
        """Sample times in acquisition order."""
        return np.asarray(self.acquisition_order, dtype=float) * self.dt


@dataclass(frozen=True)
class HarmonicSpec:
    components: tuple[Tone, ...]

    def __init__(self, components=()):
        tones = tuple(c if isinstance(c, Tone) else Tone(int(c[0]), float(c[1]), float(c[2]))
                      for c in components)
        indexes = [t.n for t in tones]
        if len(set(indexes)) != len(indexes):
            raise ValueError("frequency indexes must be distinct")
        for t in tones:
            if t.n < 1 or t.amplitude <= 0 or not 0 <= t.phase < TWO_PI:
                raise ValueError(f"invalid component {t}")
        object.__setattr__(self, "components", tones)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def indexes(self) -> list[int]:
        return [t.n for t in self.components]

    def check_range(self, M: int) -> None:
        if any(t.n > M for t in self.components):
            raise ValueError(f"frequency indexes must be <= M={M}")


@dataclass
class RealSystem:
    """Real-valued measurement model for real signals.

    ``B`` is the first M columns of the sensing matrix and ``Bprime`` the
    2M x 4M block matrix [[Br, -Bi, Br, Bi], [Bi, Br, -Bi, Br]].
    ``column_scales`` are the factors that make the columns of ``Bprime``
    unit-norm; ``unit`` is the normalized matrix used by the solver.
    """

    params: SensingParams
    B: np.ndarray
    Bprime: np.ndarray
    column_scales: np.ndarray
    unit: np.ndarray = field(repr=False)


@dataclass
class MeasurementAssembly:
    y_r: np.ndarray
    y_prime: np.ndarray


@dataclass
class SpectrumEstimate:
    components: list[Tone]
    residual_norm: float

    @property
    def indexes(self) -> list[int]:
        return [t.n for t in self.components]


def make_schedule(N: int, p: int, f0: float) -> SamplingSchedule:
    if not is_valid_modulus(N):
        raise InvalidParamsError(
            f"N={N} is not a prime of the form 4z+3; the nearest valid grid size is {next_valid_modulus(N)}")
    if not f0 > 0:
        raise ValueError("f0 must be positive")
    return SamplingSchedule(SensingParams(N, p), float(f0))


def synthesize_samples(spec: HarmonicSpec, schedule: SamplingSchedule) -> np.ndarray:
    """Sum of cosines sampled at the schedule's instants, in acquisition order."""
    spec.check_range(schedule.params.M)
    t = schedule.times()
    out = np.zeros_like(t)
    for tone in spec.components:
        out += tone.amplitude * np.cos(TWO_PI * tone.n * schedule.f0 * t + tone.phase)
    return out


def add_awgn(samples, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to the mean sample power."""
    samples = np.asarray(samples, dtype=float)
    if math.isinf(snr_db) and snr_db > 0:
        return samples.copy()
    power = float(np.mean(samples ** 2))
    if power == 0.0:
        raise ValueError("cannot set an SNR for an all-zero signal")
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    return samples + rng.normal(0.0, sigma, size=samples.shape)


def build_real_system(params: SensingParams) -> RealSystem:
    M = params.M
    # the last column (n = N) is all ones: dropped, the signal has no DC term
    B = build_sensing_matrix(params)[:, :M]
    br, bi = B.real, B.imag
    Bprime = np.block([[br, -bi, br, bi], [bi, br, -bi, br]])
    scales = 1.0 / np.linalg.norm(Bprime, axis=0)
    unit = Bprime * scales
    for arr in (Bprime, scales, unit):
        arr.flags.writeable = False
    return RealSystem(params=params, B=B, Bprime=Bprime, column_scales=scales, unit=unit)


def assemble_measurement(samples, M: int | None = None) -> MeasurementAssembly:
    y_r = np.asarray(samples, dtype=float)
    if y_r.ndim != 1 or (M is not None and y_r.size != M):
        raise ValueError(f"expected {M} samples, got shape {y_r.shape}")
    y_prime = np.concatenate([2.0 * y_r, np.zeros_like(y_r)])
    return MeasurementAssembly(y_r=y_r, y_prime=y_prime)


def normalize_phase(phase: float) -> float:
    phase = math.fmod(phase, TWO_PI)
    if phase < 0:
        phase += TWO_PI
    return 0.0 if phase >= TWO_PI else phase


def fold_coefficients(system: RealSystem, x_unit: np.ndarray) -> np.ndarray:
    """Complex spectrum x1[n] from a solution on the unit-column real system.

    The two copies of each real and imaginary part are averaged.
    """
    M = system.params.M
    x = np.asarray(x_unit) * system.column_scales
    blocks = x.reshape(4, M)
    return 0.5 * (blocks[0] + blocks[2]) + 0.5j * (blocks[1] - blocks[3])


def estimate_spectrum(system: RealSystem, assembly: MeasurementAssembly, k: int) -> SpectrumEstimate:
    """Recover the k strongest tones with OMP on the real system."""
    M = system.params.M
    if not 1 <= k <= M:
        raise ValueError(f"k={k} must lie in 1..{M}")
    y = assembly.y_prime
    if y.shape != (2 * M,):
        raise ValueError(f"measurement has shape {y.shape}, expected ({2 * M},)")
    # each tone can occupy up to four entries of the real unknown
    config = RecoveryConfig(max_iterations=min(4 * k, 2 * M),
                            residual_tolerance=EARLY_STOP_RTOL * np.linalg.norm(y))
    result = omp(system.unit, y, config)
    x1 = fold_coefficients(system, result.as_dense(4 * M))
    mags = np.abs(x1)
    # stable sort on -magnitude: equal magnitudes keep the lower index first
    order = np.argsort(-mags, kind="stable")[:k]
    tones = [Tone(int(i) + 1, float(mags[i]), normalize_phase(float(np.angle(x1[i]))))
             for i in sorted(order) if mags[i] > 0.0]
    return SpectrumEstimate(components=tones, residual_norm=result.residual_norm)


def estimate_from_samples(samples, schedule: SamplingSchedule, k: int,
                          system: RealSystem | None = None) -> SpectrumEstimate:
    if system is None:
        system = build_real_system(schedule.params)
    return estimate_spectrum(system, assemble_measurement(samples, schedule.params.M), k)


def reconstruct_signal(estimate, f0: float, times) -> np.ndarray:
    """Evaluate the estimated cosine sum at arbitrary times (seconds)."""
    t = np.asarray(times, dtype=float)
    out = np.zeros_like(t)
    for tone in estimate.components:
        out += tone.amplitude * np.cos(TWO_PI * tone.n * f0 * t + tone.phase)
    return out


def relative_accumulated_error(estimate, truth) -> float:
    """sum |estimate - truth| / sum |truth|."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError("estimate and truth must have equal length")
    denom = float(np.sum(np.abs(truth)))
    if denom == 0.0:
        raise ValueError("truth is identically zero")
    return float(np.sum(np.abs(estimate - truth))) / denom
