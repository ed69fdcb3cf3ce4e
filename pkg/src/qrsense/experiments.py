"""Seeded experiment harness producing the data behind each figure.

Trials are cut into fixed chunks of ``CHUNK`` consecutive indexes; serial
and parallel runs evaluate exactly the same chunks, and every trial draws
from its own substream, so the output does not depend on ``workers``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import rng as rngmod
from .harmonic import (HarmonicSpec, Tone, add_awgn, build_real_system, estimate_from_samples,
                       make_schedule, reconstruct_signal, relative_accumulated_error,
                       synthesize_samples)
from .recovery import RankDeficiencyError, RecoveryConfig, omp, support_match
from .sensing import (SensingParams, batch_sub_gram_extreme_eigs, build_sensing_matrix,
                      column_normalize, random_partial_fourier, sample_without_replacement,
                      summarize_sweep)

EXPERIMENTS = tuple(rngmod.EXPERIMENT_TAGS)
CHUNK = 250
F0 = 1.0
MAX_TONE_INDEX = 50
DEMO_TONES = 10
RECON_POINTS = 50
RECON_RATE_HZ = 100.0
RECON_START_S = 0.01

_DEFAULTS = {
    "rip-sweep": dict(N=23, p=1, k_min=1, k_max=None, trials=2000, snr_db=math.inf),
    "omp-sweep": dict(N=103, p=1, k_min=1, k_max=30, trials=10000, snr_db=math.inf),
    "harmonic-sweep": dict(N=103, p=100, k_min=1, k_max=25, trials=10000, snr_db=math.inf),
    "spectrum-demo": dict(N=103, p=100, k_min=DEMO_TONES, k_max=DEMO_TONES, trials=1, snr_db=30.0),
    "reconstruct-demo": dict(N=103, p=100, k_min=DEMO_TONES, k_max=DEMO_TONES, trials=1, snr_db=30.0),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    N: int
    p: int
    k_min: int
    k_max: int
    trials: int
    snr_db: float
    seed: int = 0
    output_path: str | None = None
    complex_values: bool = False

    @property
    def params(self) -> SensingParams:
        return SensingParams(self.N, self.p)

    @property
    def ks(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        M = self.params.M
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.k_min <= self.k_max <= M:
            raise ValueError(f"k range {self.k_min}..{self.k_max} must lie within 1..{M}")
        if self.experiment in ("harmonic-sweep", "spectrum-demo", "reconstruct-demo"):
            if self.k_max > max_tone_index(M):
                raise ValueError(f"k cannot exceed the {max_tone_index(M)} candidate tones")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be a real number or +inf")
        return self

    def header(self) -> str:
        d = asdict(self)
        d.pop("output_path")
        if self.experiment in ("spectrum-demo", "reconstruct-demo", "harmonic-sweep"):
            d["f0"] = F0
        if self.experiment == "reconstruct-demo":
            d.update(t0=RECON_START_S, rate_hz=RECON_RATE_HZ, points=RECON_POINTS)
        return " ".join(f"{key}={_fmt_value(v)}" for key, v in d.items())


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "inf" if math.isinf(v) else format(v, ".17g")
    return str(v)


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    if experiment not in _DEFAULTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    values = dict(_DEFAULTS[experiment])
    values.update({k: v for k, v in overrides.items() if v is not None})
    if values["k_max"] is None:
        values["k_max"] = SensingParams(values["N"], values["p"]).M
    return ExperimentConfig(experiment=experiment, **values).validate()


def max_tone_index(M: int) -> int:
    return min(MAX_TONE_INDEX, M)


@dataclass
class TrialTable:
    header: list[str]
    rows: list[tuple]
    trailer: list[str] = field(default_factory=list)

    def column(self, name: str, **where) -> list:
        i = self.header.index(name)
        keys = [(self.header.index(k), v) for k, v in where.items()]
        return [r[i] for r in self.rows if all(r[j] == v for j, v in keys)]


@lru_cache(maxsize=None)
def _deterministic(N: int, p: int) -> np.ndarray:
    return column_normalize(build_sensing_matrix(SensingParams(N, p)))


@lru_cache(maxsize=None)
def _real_system(N: int, p: int):
    return build_real_system(SensingParams(N, p))


# -- per-chunk work (module level so process pools can pickle it) -----------

def _rip_chunk(cfg: ExperimentConfig, k: int, start: int, stop: int):
    N, M = cfg.N, cfg.params.M
    det = _deterministic(N, cfg.p)
    rnd = column_normalize(random_partial_fourier(
        N, M, rngmod.substream(cfg.seed, cfg.experiment, k, 0, rngmod.MATRIX)))
    det_sup, rnd_sup = [], []
    for t in range(start, stop):
        g = rngmod.substream(cfg.seed, cfg.experiment, k, t)
        det_sup.append(sample_without_replacement(N, k, g))
        rnd_sup.append(sample_without_replacement(N, k, g))
    return batch_sub_gram_extreme_eigs(det, det_sup) + batch_sub_gram_extreme_eigs(rnd, rnd_sup)


def draw_sparse_vector(g: np.random.Generator, N: int, k: int, complex_values: bool = False):
    support = sample_without_replacement(N, k, g)
    x = np.zeros(N, dtype=complex)
    if complex_values:
        x[support] = (g.standard_normal(k) + 1j * g.standard_normal(k)) / math.sqrt(2.0)
    else:
        x[support] = g.standard_normal(k)
    return support, x


def _omp_trial(phi: np.ndarray, x: np.ndarray, support, k: int) -> bool:
    try:
        result = omp(phi, phi @ x, RecoveryConfig(max_iterations=k))
    except RankDeficiencyError:
        return False
    return len(result.support) == k and support_match(result.support, support)


def _omp_chunk(cfg: ExperimentConfig, k: int, start: int, stop: int):
    N, M = cfg.N, cfg.params.M
    det = _deterministic(N, cfg.p)
    det_ok = np.zeros(stop - start, dtype=bool)
    rnd_ok = np.zeros(stop - start, dtype=bool)
    for i, t in enumerate(range(start, stop)):
        g = rngmod.substream(cfg.seed, cfg.experiment, k, t)
        support, x = draw_sparse_vector(g, N, k, cfg.complex_values)
        rnd = column_normalize(random_partial_fourier(N, M, g))
        det_ok[i] = _omp_trial(det, x, support, k)
        rnd_ok[i] = _omp_trial(rnd, x, support, k)
    return det_ok, rnd_ok


def draw_harmonic_spec(g: np.random.Generator, M: int, k: int, amplitudes=None) -> HarmonicSpec:
    """k distinct tones on 1..min(50, M); amplitudes U[0.1, 1] unless given."""
    idx = sample_without_replacement(max_tone_index(M), k, g) + 1
    amps = g.uniform(0.1, 1.0, k) if amplitudes is None else np.asarray(amplitudes, dtype=float)
    phases = g.uniform(0.0, 2.0 * math.pi, k)
    return HarmonicSpec(Tone(int(n), float(a), float(th)) for n, a, th in zip(idx, amps, phases))


def _harmonic_chunk(cfg: ExperimentConfig, k: int, start: int, stop: int):
    schedule = make_schedule(cfg.N, cfg.p, F0)
    system = _real_system(cfg.N, cfg.p)
    ok = np.zeros(stop - start, dtype=bool)
    for i, t in enumerate(range(start, stop)):
        g = rngmod.substream(cfg.seed, cfg.experiment, k, t)
        spec = draw_harmonic_spec(g, cfg.params.M, k)
        samples = add_awgn(synthesize_samples(spec, schedule), cfg.snr_db, g)
        try:
            est = estimate_from_samples(samples, schedule, k, system)
        except RankDeficiencyError:
            continue
        ok[i] = set(est.indexes) == set(spec.indexes)
    return ok


_WORK = {"rip-sweep": _rip_chunk, "omp-sweep": _omp_chunk, "harmonic-sweep": _harmonic_chunk}


def _call(args):
    fn, cfg, k, start, stop = args
    return fn(cfg, k, start, stop)


def _run_chunks(cfg: ExperimentConfig, workers: int) -> dict[int, list]:
    fn = _WORK[cfg.experiment]
    tasks = [(fn, cfg, k, s, min(s + CHUNK, cfg.trials))
             for k in cfg.ks for s in range(0, cfg.trials, CHUNK)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_call, tasks))
    else:
        outputs = [_call(t) for t in tasks]
    by_k: dict[int, list] = {k: [] for k in cfg.ks}
    for (_, _, k, _, _), out in zip(tasks, outputs):
        by_k[k].append(out)
    return by_k


def _joined(parts, i):
    return np.concatenate([p[i] for p in parts])


def run_rip_sweep(config: ExperimentConfig, workers: int = 1) -> TrialTable:
    header = ["k", "matrix", "trials", "mean_max_eig", "mean_min_eig", "extreme_max_eig", "extreme_min_eig"]
    rows = []
    for k, parts in _run_chunks(config, workers).items():
        for name, lo, hi in (("deterministic", 0, 1), ("random", 2, 3)):
            rec = summarize_sweep(k, _joined(parts, lo), _joined(parts, hi))
            rows.append((k, name, rec.trials, rec.mean_max_eig, rec.mean_min_eig,
                         rec.extreme_max_eig, rec.extreme_min_eig))
    return TrialTable(header, rows)


def _success_rows(k, trials, named_counts):
    return [(k, name, int(c), trials, int(c) / trials) for name, c in named_counts]


def run_omp_sweep(config: ExperimentConfig, workers: int = 1) -> TrialTable:
    header = ["k", "matrix", "success_count", "trials", "success_rate"]
    rows = []
    for k, parts in _run_chunks(config, workers).items():
        counts = [("deterministic", _joined(parts, 0).sum()), ("random", _joined(parts, 1).sum())]
        rows.extend(_success_rows(k, config.trials, counts))
    return TrialTable(header, rows)


def run_harmonic_sweep(config: ExperimentConfig, workers: int = 1) -> TrialTable:
    header = ["k", "success_count", "trials", "success_rate"]
    rows = []
    for k, parts in _run_chunks(config, workers).items():
        c = int(np.concatenate(parts).sum())
        rows.append((k, c, config.trials, c / config.trials))
    return TrialTable(header, rows)


@dataclass
class DemoRun:
    truth: HarmonicSpec
    estimate: object
    samples: np.ndarray


def _demo_run(config: ExperimentConfig) -> DemoRun:
    schedule = make_schedule(config.N, config.p, F0)
    g = rngmod.substream(config.seed, config.experiment)
    amps = np.arange(1, DEMO_TONES + 1) / DEMO_TONES
    truth = draw_harmonic_spec(g, config.params.M, DEMO_TONES, amplitudes=amps)
    samples = add_awgn(synthesize_samples(truth, schedule), config.snr_db, g)
    est = estimate_from_samples(samples, schedule, DEMO_TONES, _real_system(config.N, config.p))
    return DemoRun(truth, est, samples)


def run_spectrum_demo(config: ExperimentConfig) -> tuple[DemoRun, TrialTable]:
    """One noisy 10-tone estimate with per-tone amplitude errors."""
    run = _demo_run(config)
    found = {t.n: t for t in run.estimate.components}
    header = ["freq_index", "freq_hz", "true_amplitude", "true_phase_rad",
              "est_amplitude", "est_phase_rad", "abs_amplitude_error"]
    rows = []
    for t in sorted(run.truth.components, key=lambda t: t.n):
        e = found.get(t.n, Tone(t.n, 0.0, 0.0))
        rows.append((t.n, t.n * F0, t.amplitude, t.phase, e.amplitude, e.phase,
                     abs(e.amplitude - t.amplitude)))
    spurious = sorted(set(found) - set(run.truth.indexes))
    trailer = [f"residual_norm={format(run.estimate.residual_norm, '.17g')}"]
    if spurious:
        trailer.append("spurious=" + ";".join(map(str, spurious)))
    return run, TrialTable(header, rows, trailer)


def reconstruction_times() -> np.ndarray:
    return RECON_START_S + np.arange(RECON_POINTS) / RECON_RATE_HZ


def run_reconstruct_demo(config: ExperimentConfig) -> tuple[float, TrialTable]:
    """Rebuild 50 points at 100 Hz from the estimate; error against the clean signal."""
    run = _demo_run(config)
    t = reconstruction_times()
    original = reconstruct_signal(run.truth, F0, t)
    rebuilt = reconstruct_signal(run.estimate, F0, t)
    err = relative_accumulated_error(rebuilt, original)
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(t, original, rebuilt)]
    table = TrialTable(["t", "original", "reconstructed"], rows,
                       [f"relative_accumulated_error={format(err, '.17g')}"])
    return err, table


def run_experiment(config: ExperimentConfig, workers: int = 1) -> TrialTable:
    config.validate()
    if config.experiment == "rip-sweep":
        return run_rip_sweep(config, workers)
    if config.experiment == "omp-sweep":
        return run_omp_sweep(config, workers)
    if config.experiment == "harmonic-sweep":
        return run_harmonic_sweep(config, workers)
    if config.experiment == "spectrum-demo":
        return run_spectrum_demo(config)[1]
    return run_reconstruct_demo(config)[1]


def with_seed(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    return replace(config, seed=seed)
