import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrsense.harmonic import (HarmonicSpec, SpectrumEstimate, Tone, add_awgn, assemble_measurement,
                              build_real_system, estimate_from_samples, estimate_spectrum,
                              fold_coefficients, make_schedule, normalize_phase,
                              reconstruct_signal, relative_accumulated_error, synthesize_samples)
from qrsense.numtheory import InvalidParamsError, is_valid_modulus
from qrsense.sensing import SensingParams, build_sensing_matrix

SCHED = make_schedule(103, 100, 1.0)
SYSTEM = build_real_system(SCHED.params)


def circular_distance(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def random_spec(rng, k, top=50):
    idx = rng.choice(top, size=k, replace=False) + 1
    return HarmonicSpec((int(n), rng.uniform(0.1, 1.0), rng.uniform(0, 2 * math.pi)) for n in idx)


def assert_same_spectrum(est, spec, tol=1e-6):
    assert est.indexes == sorted(spec.indexes)
    truth = {t.n: t for t in spec.components}
    for t in est.components:
        assert t.amplitude == pytest.approx(truth[t.n].amplitude, abs=tol)
        assert circular_distance(t.phase, truth[t.n].phase) <= tol


def test_schedule_examples():
    assert make_schedule(11, 1, 1.0).slots == [1, 3, 4, 5, 9]
    assert make_schedule(11, 7, 3.0).slots == [1, 3, 4, 5, 9]
    s = make_schedule(103, 100, 1.0)
    assert s.fS == pytest.approx(1.03)
    assert s.fN == pytest.approx(103.0)
    assert len(s.slots) == 51
    s7 = make_schedule(7, 1, 1.0)
    assert s7.fS == 7.0 and s7.slots == [1, 2, 4]
    assert s7.dt == pytest.approx(1 / 7)


def test_schedule_errors():
    with pytest.raises(InvalidParamsError, match="107"):
        make_schedule(104, 1, 1.0)
    with pytest.raises(InvalidParamsError):
        make_schedule(103, 103, 1.0)
    with pytest.raises(ValueError):
        make_schedule(103, 1, 0.0)


def test_schedule_identity():
    # sampling at l = m^2 mod N with rate N f0 / p reproduces row m of A
    for N in [n for n in range(7, 104) if is_valid_modulus(n)]:
        for p in (1, 2, 5, 100):
            if N % p == 0:
                continue
            s = make_schedule(N, p, 2.5)
            a = build_sensing_matrix(s.params)
            n = np.arange(1, N + 1)
            phases = np.exp(2j * np.pi * np.outer(s.times(), n * s.f0))
            np.testing.assert_allclose(phases, a, atol=1e-12 * N * p)


def test_harmonic_spec_validation():
    with pytest.raises(ValueError):
        HarmonicSpec([(3, 1.0, 0.0), (3, 0.5, 1.0)])
    with pytest.raises(ValueError):
        HarmonicSpec([(3, 0.0, 0.0)])
    with pytest.raises(ValueError):
        HarmonicSpec([(3, 1.0, 2 * math.pi)])
    with pytest.raises(ValueError):
        synthesize_samples(HarmonicSpec([(52, 1.0, 0.0)]), SCHED)


def test_synthesize():
    assert np.all(synthesize_samples(HarmonicSpec(), SCHED) == 0)
    s = synthesize_samples(HarmonicSpec([(7, 0.8, 0.0)]), SCHED)
    np.testing.assert_allclose(s, 0.8 * np.cos(2 * np.pi * 7 * SCHED.times()))


def test_awgn():
    rng = np.random.default_rng(0)
    x = np.ones(10)
    np.testing.assert_array_equal(add_awgn(x, math.inf, rng), x)
    with pytest.raises(ValueError):
        add_awgn(np.zeros(4), 30.0, rng)
    big = np.full(10**6, 2.0)
    noise = add_awgn(big, 30.0, rng) - big
    measured = 10 * math.log10(np.mean(big**2) / np.mean(noise**2))
    assert abs(measured - 30.0) <= 0.2
    unit = np.sqrt(2) * np.cos(np.linspace(0, 20 * np.pi, 10**5, endpoint=False))
    assert np.var(add_awgn(unit, 30.0, rng) - unit) == pytest.approx(1e-3, rel=0.02)


def test_real_system_structure():
    params = SensingParams(23, 2)
    sysm = build_real_system(params)
    M = params.M
    a = build_sensing_matrix(params)
    np.testing.assert_allclose(a[:, -1], 1.0, atol=1e-12)  # the dropped DC column
    assert sysm.Bprime.shape == (2 * M, 4 * M)
    br, bi = sysm.B.real, sysm.B.imag
    bp = sysm.Bprime
    for blk, expected in [((0, 0), br), ((0, 1), -bi), ((0, 2), br), ((0, 3), bi),
                          ((1, 0), bi), ((1, 1), br), ((1, 2), -bi), ((1, 3), br)]:
        r, c = blk
        np.testing.assert_array_equal(bp[r * M:(r + 1) * M, c * M:(c + 1) * M], expected)
    np.testing.assert_array_equal(bp[:M, 3], bp[:M, 2 * M + 3])
    np.testing.assert_allclose(np.abs(sysm.B), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(sysm.unit, axis=0), 1.0, atol=1e-12)


def test_assemble_measurement():
    a = assemble_measurement([1.0, -1.0])
    np.testing.assert_array_equal(a.y_prime, [2.0, -2.0, 0.0, 0.0])
    np.testing.assert_array_equal(assemble_measurement(np.zeros(3)).y_prime, np.zeros(6))
    y = np.random.default_rng(0).normal(size=51)
    assert np.linalg.norm(assemble_measurement(y).y_prime) == pytest.approx(2 * np.linalg.norm(y))
    with pytest.raises(ValueError):
        assemble_measurement(np.ones(4), M=5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_real_system_consistency(seed, k):
    # y' = B' x' exactly for x' = (x1r; x1i; x1r; -x1i)
    spec = random_spec(np.random.default_rng(seed), k, top=51)
    x1 = np.zeros(51, dtype=complex)
    for t in spec.components:
        x1[t.n - 1] = t.amplitude * np.exp(1j * t.phase)
    xp = np.concatenate([x1.real, x1.imag, x1.real, -x1.imag])
    y = assemble_measurement(synthesize_samples(spec, SCHED)).y_prime
    lhs = SYSTEM.Bprime @ xp
    np.testing.assert_allclose(lhs, y, atol=1e-9)
    np.testing.assert_allclose(lhs[51:], 0.0, atol=1e-12)
    np.testing.assert_allclose(fold_coefficients(SYSTEM, xp / SYSTEM.column_scales), x1, atol=1e-12)


def test_single_tone_roundtrip():
    spec = HarmonicSpec([(5, 1.0, 0.0)])
    est = estimate_from_samples(synthesize_samples(spec, SCHED), SCHED, 1, SYSTEM)
    assert est.indexes == [5]
    assert est.components[0].amplitude == pytest.approx(1.0, abs=1e-6)
    assert circular_distance(est.components[0].phase, 0.0) <= 1e-6


def test_ten_tone_paper_amplitudes_roundtrip():
    rng = np.random.default_rng(42)
    idx = rng.choice(50, 10, replace=False) + 1
    spec = HarmonicSpec((int(n), a / 10, rng.uniform(0, 2 * math.pi)) for n, a in zip(idx, range(1, 11)))
    est = estimate_from_samples(synthesize_samples(spec, SCHED), SCHED, 10, SYSTEM)
    assert_same_spectrum(est, spec)


def test_noisy_ten_tone_finds_all_frequencies():
    rng = np.random.default_rng(7)
    idx = rng.choice(50, 10, replace=False) + 1
    spec = HarmonicSpec((int(n), a / 10, rng.uniform(0, 2 * math.pi)) for n, a in zip(idx, range(1, 11)))
    noisy = add_awgn(synthesize_samples(spec, SCHED), 30.0, rng)
    est = estimate_from_samples(noisy, SCHED, 10, SYSTEM)
    assert est.indexes == sorted(spec.indexes)
    truth = {t.n: t.amplitude for t in spec.components}
    assert max(abs(t.amplitude - truth[t.n]) for t in est.components) < 0.05


def test_noiseless_roundtrip_many():
    rng = np.random.default_rng(123)
    for trial in range(500):
        k = 1 + trial % 6
        spec = random_spec(rng, k)
        est = estimate_from_samples(synthesize_samples(spec, SCHED), SCHED, k, SYSTEM)
        assert_same_spectrum(est, spec)
        assert all(0 <= t.phase < 2 * math.pi and t.amplitude >= 0 for t in est.components)


def test_noiseless_success_rate_larger_k():
    # greedy selection occasionally misses one of a tone's four real columns
    rng = np.random.default_rng(321)
    for k, min_found, min_exact in [(7, 0.97, 0.95), (10, 0.9, 0.75)]:
        found = exact = 0
        for _ in range(200):
            spec = random_spec(rng, k)
            est = estimate_from_samples(synthesize_samples(spec, SCHED), SCHED, k, SYSTEM)
            found += est.indexes == sorted(spec.indexes)
            try:
                assert_same_spectrum(est, spec)
                exact += 1
            except AssertionError:
                pass
        assert found >= 200 * min_found
        assert exact >= 200 * min_exact


def test_roundtrip_reconstructs_samples():
    rng = np.random.default_rng(5)
    spec = random_spec(rng, 6)
    samples = synthesize_samples(spec, SCHED)
    est = estimate_from_samples(samples, SCHED, 6, SYSTEM)
    np.testing.assert_allclose(reconstruct_signal(est, SCHED.f0, SCHED.times()), samples, atol=1e-6)


def test_rate_invariance():
    rng = np.random.default_rng(9)
    for _ in range(20):
        spec = random_spec(rng, 6)
        results = []
        for p in (2, 10, 100):
            s = make_schedule(103, p, 1.0)
            results.append(estimate_from_samples(synthesize_samples(spec, s), s, 6))
        for other in results[1:]:
            assert other.indexes == results[0].indexes
            for a, b in zip(other.components, results[0].components):
                assert a.amplitude == pytest.approx(b.amplitude, abs=1e-9)
                assert circular_distance(a.phase, b.phase) <= 1e-9


def test_estimate_errors():
    y = assemble_measurement(np.zeros(51))
    with pytest.raises(ValueError):
        estimate_spectrum(SYSTEM, y, 0)
    with pytest.raises(ValueError):
        estimate_spectrum(SYSTEM, y, 52)
    with pytest.raises(ValueError):
        estimate_spectrum(SYSTEM, assemble_measurement(np.zeros(5)), 1)


def test_normalize_phase():
    assert normalize_phase(-1e-17) == 0.0
    assert normalize_phase(-math.pi / 2) == pytest.approx(1.5 * math.pi)
    assert normalize_phase(5 * math.pi) == pytest.approx(math.pi)


def test_reconstruct_signal():
    np.testing.assert_array_equal(reconstruct_signal(SpectrumEstimate([], 0.0), 1.0, [0.0, 0.5]), [0.0, 0.0])
    est = SpectrumEstimate([Tone(2, 1.5, 0.0)], 0.0)
    assert abs(reconstruct_signal(est, 1.0, [1 / 8])[0]) < 1e-12  # cos(pi/2)


def test_relative_accumulated_error():
    truth = np.array([1.0, 2.0, 0.5])
    assert relative_accumulated_error(truth, truth) == 0.0
    assert relative_accumulated_error(1.01 * truth, truth) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        relative_accumulated_error(truth, np.zeros(3))
    with pytest.raises(ValueError):
        relative_accumulated_error(truth, truth[:2])
