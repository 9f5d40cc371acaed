import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import amdf_direct, autocorr_direct
from voicecrypt.audio import Signal, resample
from voicecrypt.channel import awgn
from voicecrypt.errors import InvalidConfig, LagTooLarge, LengthMismatch, PeakAtBoundary, TooShort
from voicecrypt.pitch import (
    FrameConfig,
    amdf,
    analyze_frame,
    autocorr,
    center_clip,
    extract_pitch,
    frame_signal,
    refine_peak,
    weighted_score,
)
from voicecrypt.synth import random_periodic, sawtooth

CFG = FrameConfig()
frames_st = arrays(np.float64, st.integers(2, 80), elements=st.floats(-1, 1))


class TestConfig:
    def test_defaults(self):
        assert CFG.lag_band == (25, 200)

    @pytest.mark.parametrize("kw", [
        {"f_min": 400.0, "f_max": 50.0},
        {"max_lag": 150},
        {"max_lag": 300},
        {"epsilon": 0.0},
        {"clip_ratio": 1.0},
        {"window": "hann"},
        {"score": "cepstrum"},
        {"voicing_ratio_threshold": 1.5},
        {"hop": 0},
    ])
    def test_rejects(self, kw):
        with pytest.raises(InvalidConfig):
            FrameConfig(**kw)


class TestFraming:
    def test_counts(self):
        f = frame_signal(Signal(np.arange(500.0)), CFG)
        assert f.shape == (3, 300)
        assert f[:, 0].tolist() == [0, 100, 200]

    def test_exact_length(self):
        assert frame_signal(Signal(np.zeros(300)), CFG).shape == (1, 300)

    def test_too_short(self):
        with pytest.raises(TooShort):
            frame_signal(Signal(np.zeros(299)), CFG)


class TestCenterClip:
    def test_rule(self):
        out = center_clip([1.0, 0.2, 0.5, -0.5], 0.3)
        np.testing.assert_allclose(out, [0.7, 0.0, 0.2, -0.2])

    def test_identity_at_zero_ratio(self):
        x = np.array([0.1, -0.4, 0.9])
        assert np.array_equal(center_clip(x, 0.0), x)

    def test_all_zero(self):
        assert np.all(center_clip(np.zeros(8), 0.3) == 0)


class TestAutocorr:
    def test_hand_example(self):
        np.testing.assert_allclose(4 * autocorr([1, 0, 1, 0], 3), [2, 0, 1, 0], atol=1e-15)

    @given(frames_st)
    @settings(max_examples=60)
    def test_matches_direct_sum(self, x):
        m = x.size - 1
        np.testing.assert_allclose(autocorr(x, m), autocorr_direct(x, m), atol=1e-9)

    @given(frames_st)
    @settings(max_examples=60)
    def test_zero_lag_dominates(self, x):
        r = autocorr(x, x.size - 1)
        assert np.all(r[0] + 1e-12 >= r)

    def test_periodic_peak(self):
        x = random_periodic(80, 300, np.random.default_rng(1))
        r = autocorr(x, 200)
        assert abs(1 + int(np.argmax(r[1:])) - 80) <= 1

    def test_lag_too_large(self):
        with pytest.raises(LagTooLarge):
            autocorr(np.ones(10), 10)


class TestAmdf:
    def test_hand_example(self):
        d = amdf([1, 0, 1, 0], 3)
        assert d[0] == 0 and d[1] == 1 and d[2] == 0

    @given(frames_st)
    @settings(max_examples=60)
    def test_matches_direct_sum(self, x):
        m = x.size - 1
        np.testing.assert_allclose(amdf(x, m), amdf_direct(x, m), atol=1e-9)

    @given(frames_st, st.floats(0.01, 100))
    @settings(max_examples=40)
    def test_homogeneous(self, x, c):
        m = x.size - 1
        np.testing.assert_allclose(amdf(c * x, m), c * amdf(x, m), rtol=1e-9, atol=1e-12)

    def test_lag_too_large(self):
        with pytest.raises(LagTooLarge):
            amdf(np.ones(10), 12)


class TestWeightedScore:
    def test_reduces_to_autocorr(self):
        r = np.array([3.0, 1.0, 2.0])
        assert np.array_equal(weighted_score(r, np.zeros(3), 1.0), r)

    def test_arithmetic(self):
        np.testing.assert_allclose(weighted_score([4, 1, 3], [0, 1, 0.5], 1.0), [4, 0.5, 2])

    def test_shape_mismatch(self):
        with pytest.raises(LengthMismatch):
            weighted_score([1, 2], [1], 1.0)

    def test_periodic_frame_peaks_at_period(self):
        x = random_periodic(73, 300, np.random.default_rng(0))
        w = weighted_score(autocorr(x, 200), amdf(x, 200), 1e-6)
        assert 25 + int(np.argmax(w[25:201])) == 73


class TestRefine:
    def test_symmetric(self):
        assert refine_peak([1.0, 2.0, 1.0], 1) == 1.0

    def test_quadratic_fit(self):
        assert refine_peak([1.0, 2.0, 1.5], 1) == pytest.approx(1 + 1 / 6)

    def test_flat(self):
        assert refine_peak([2.0, 2.0, 2.0], 1) == 1.0

    def test_clamped(self):
        # a local maximum always gives |delta| <= 0.5; only a non-peak triple hits the clamp
        assert refine_peak([0.0, 1.0, 5.0], 1) == 0.5
        assert refine_peak([5.0, 1.0, 0.0], 1) == 1.5

    @pytest.mark.parametrize("tau", [0, 2])
    def test_boundary(self, tau):
        with pytest.raises(PeakAtBoundary):
            refine_peak([1.0, 2.0, 1.0], tau)

    def test_recovers_parabola_vertex(self):
        t = np.arange(10.0)
        assert refine_peak(-(t - 4.3) ** 2, 4) == pytest.approx(4.3)


class TestExtract:
    def test_clean_sawtooth_100hz(self):
        track = extract_pitch(sawtooth(100.0), CFG)
        assert track.voiced.all()
        assert np.all(np.abs(track.f0 - 100.0) <= 0.5)

    def test_noisy_sawtooth_median(self):
        x = sawtooth(100.0)
        noisy = Signal(awgn(x.samples, 5.0, 1), x.sample_rate)
        assert np.nanmedian(extract_pitch(noisy, CFG).f0) == pytest.approx(100.0, abs=2.0)

    def test_silence_unvoiced(self):
        track = extract_pitch(Signal(np.zeros(2000)), CFG)
        assert not track.voiced.any()
        assert np.all(np.isnan(track.f0))

    def test_white_noise_mostly_unvoiced(self):
        x = np.random.default_rng(0).standard_normal(10_000)
        assert extract_pitch(Signal(x / np.abs(x).max()), CFG).voiced.mean() < 0.1

    def test_other_sample_rate(self):
        x = sawtooth(150.0, fs=16_000)
        track = extract_pitch(x, CFG)
        assert track.sample_rate == 10_000
        assert np.nanmedian(track.f0) == pytest.approx(150.0, rel=0.01)

    def test_frame_records(self):
        track = extract_pitch(sawtooth(220.0, duration=0.1), CFG)
        assert [f.start_sample for f in track] == [0, 100, 200, 300, 400, 500, 600, 700]
        for f in track:
            assert 0.0 <= f.confidence <= 1.0
            assert (f.f0 is not None) == f.voiced

    @pytest.mark.parametrize("f0", [50.0, 55.0, 395.0, 400.0])
    def test_refined_f0_stays_in_band(self, f0):
        f = extract_pitch(sawtooth(f0), CFG).f0
        f = f[~np.isnan(f)]
        assert np.all((f >= CFG.f_min * 0.98) & (f <= CFG.f_max * 1.02))

    @pytest.mark.parametrize("c", [0.5, 2.0])
    def test_scale_invariance(self, voice, c):
        base = extract_pitch(voice, CFG)
        scaled_sig = Signal(c * voice.samples, voice.sample_rate)
        scaled = extract_pitch(scaled_sig, CFG.with_overrides(epsilon=c * CFG.epsilon))
        assert np.array_equal(base.voiced, scaled.voiced)
        np.testing.assert_allclose(base.f0, scaled.f0, atol=0.1, equal_nan=True)
        fixed = extract_pitch(scaled_sig, CFG)
        assert np.array_equal(base.voiced, fixed.voiced)
        np.testing.assert_allclose(base.f0, fixed.f0, atol=1.0, equal_nan=True)

    def test_acf_baseline_available(self):
        track = extract_pitch(sawtooth(150.0), CFG.with_overrides(score="acf"))
        assert np.nanmedian(track.f0) == pytest.approx(150.0, rel=0.005)


class TestInvariants:
    def test_periodicity_rectangular_window(self):
        # the exact periodicity argument applies to the unwindowed frame
        cfg = CFG.with_overrides(window="rectangular")
        rng = np.random.default_rng(3)
        for period in range(25, 201):
            a = analyze_frame(random_periodic(period, 300, rng), cfg)
            assert abs(a.coarse_lag - period) <= 1, period

    def test_periodicity_default_window(self):
        # with the Hamming taper the lag-P overlap fades once fewer than two
        # periods fit in the frame, so the check covers P <= frame_len / 2
        rng = np.random.default_rng(3)
        for period in range(25, 151):
            a = analyze_frame(random_periodic(period, 300, rng), CFG)
            assert abs(a.peak_lag - period) <= 1, period

    def test_duality(self):
        rng = np.random.default_rng(8)
        agree = 0
        for _ in range(50):
            period = int(rng.integers(25, 201))
            x = random_periodic(period, 300, rng)
            r, d = autocorr(x, 200), amdf(x, 200)
            agree += abs(int(np.argmax(r[25:201])) - int(np.argmin(d[25:201]))) <= 1
        assert agree >= 48

    def test_noise_robustness_on_corpus(self, corpus):
        # lags are integers while the corpus periods are not, so "unchanged"
        # is taken to within one lag step
        same = total = 0
        for k, (enroll, test) in enumerate(corpus.values()):
            for j, x in enumerate(enroll + test):
                noisy = Signal(awgn(x.samples, 10.0, 100 * k + j), x.sample_rate)
                for a, b in zip(frame_signal(x, CFG), frame_signal(noisy, CFG)):
                    same += abs(analyze_frame(a, CFG).coarse_lag - analyze_frame(b, CFG).coarse_lag) <= 1
                    total += 1
        assert same / total >= 0.95


def test_resample_then_extract_matches_direct(voice):
    up = resample(voice, 20_000)
    a = extract_pitch(voice, CFG).f0
    b = extract_pitch(up, CFG).f0
    assert np.nanmedian(np.abs(a - b)) < 1.0
