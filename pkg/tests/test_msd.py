import numpy as np
import pytest

from semrheo.errors import InsufficientDataError, InvariantError
from semrheo.msd import (
    MsdCurve,
    Trajectory,
    _msd_direct,
    _msd_fft,
    analyze_trajectory,
    classify_regime,
    default_fit_window,
    detect_plateau,
    displacement,
    fit_power_law,
    msd,
    msd_to_csv,
    report_to_json,
    segment_phases,
    step_lengths,
    tail_exponent,
)
from semrheo.synthetic import SyntheticSpec, generate


def brute_force_msd(pts: np.ndarray) -> np.ndarray:
    """Independent double-loop oracle for the MSD definition."""
    n = len(pts)
    out = np.zeros(n - 1)
    for delay in range(1, n):
        acc = 0.0
        for i in range(n - delay):
            acc += float(np.sum((pts[i + delay] - pts[i]) ** 2))
        out[delay - 1] = acc / (n - delay)
    return out


def power_curve(alpha: float, amp: float = 1.0, n: int = 60) -> MsdCurve:
    delays = np.arange(1, n)
    return MsdCurve(delays, amp * delays.astype(float) ** alpha, n - delays)


class TestDisplacement:
    def test_adjacent_pair(self):
        traj = Trajectory(np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert displacement(traj, 0, 1).tolist() == [-1.0, -1.0]

    def test_equal_indices_rejected(self):
        traj = Trajectory(np.array([[0.0], [1.0]]))
        with pytest.raises(IndexError):
            displacement(traj, 1, 1)
        with pytest.raises(IndexError):
            displacement(traj, 0, 2)

    def test_matches_subtraction_oracle(self):
        pts = np.random.default_rng(3).normal(size=(5, 3))
        traj = Trajectory(pts)
        for i in range(4):
            for j in range(i + 1, 5):
                expected = [pts[i][d] - pts[j][d] for d in range(3)]
                assert displacement(traj, i, j).tolist() == expected


class TestMsd:
    def test_constant_trajectory_is_zero(self):
        traj = Trajectory(np.ones((20, 3)) * 2.5)
        assert np.all(msd(traj).values == 0.0)

    def test_ballistic_line_exact(self):
        v = np.array([0.5, -0.25, 1.0])
        pts = np.arange(40)[:, None] * v
        curve = msd(Trajectory(pts))
        expected = curve.delays.astype(float) ** 2 * float(v @ v)
        assert np.array_equal(curve.values, expected)

    def test_matches_brute_force(self):
        pts = np.random.default_rng(9).normal(size=(50, 5))
        curve = msd(Trajectory(pts))
        oracle = brute_force_msd(pts)
        assert np.max(np.abs(curve.values - oracle) / oracle) <= 1e-12

    def test_counts_and_delays(self):
        curve = msd(Trajectory(np.random.default_rng(0).normal(size=(30, 2))))
        assert curve.delays.tolist() == list(range(1, 30))
        assert curve.counts.tolist() == [30 - n for n in range(1, 30)]

    def test_translation_invariance(self):
        pts = np.random.default_rng(4).normal(size=(60, 4))
        base = msd(Trajectory(pts)).values
        shifted = msd(Trajectory(pts + np.array([3.7, -12.0, 0.5, 8.0]))).values
        assert np.max(np.abs(shifted - base) / base) <= 1e-12

    def test_quadratic_scaling(self):
        pts = np.random.default_rng(5).normal(size=(40, 3))
        base = msd(Trajectory(pts)).values
        scaled = msd(Trajectory(2.5 * pts)).values
        assert np.max(np.abs(scaled - 2.5 ** 2 * base) / base) <= 1e-9

    def test_fft_path_agrees_with_direct(self):
        pts = np.random.default_rng(6).normal(size=(700, 3)) + 40.0
        direct = _msd_direct(pts)
        fft = _msd_fft(pts)
        assert np.max(np.abs(fft - direct) / direct) <= 1e-10

    def test_fft_path_used_for_long_trajectories(self):
        # public API on a long constant trajectory: centered FFT gives exact 0
        traj = Trajectory(np.full((1000, 2), 7.0))
        assert np.all(msd(traj).values == 0.0)

    def test_too_short(self):
        with pytest.raises(InvariantError):
            Trajectory(np.zeros((1, 3)))


class TestStepLengths:
    def test_unit_staircase(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [2, 1], [2, 2]], dtype=float)
        assert step_lengths(Trajectory(pts)).tolist() == [1.0] * 4

    def test_constant(self):
        assert step_lengths(Trajectory(np.ones((5, 2)))).tolist() == [0.0] * 4

    def test_matches_norm_oracle(self):
        pts = np.random.default_rng(7).normal(size=(30, 4))
        got = step_lengths(Trajectory(pts))
        oracle = [float(np.sqrt(np.sum((pts[i + 1] - pts[i]) ** 2)))
                  for i in range(29)]
        assert got.tolist() == oracle


class TestFitPowerLaw:
    def test_ballistic(self):
        fit = fit_power_law(power_curve(2.0, amp=3.0), (1, 59))
        assert fit.alpha == pytest.approx(2.0, abs=1e-9)
        assert fit.r2 == pytest.approx(1.0, abs=1e-9)

    def test_flat(self):
        fit = fit_power_law(power_curve(0.0, amp=4.2), (1, 59))
        assert fit.alpha == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
    def test_noiseless_recovery(self, alpha):
        fit = fit_power_law(power_curve(alpha, amp=0.7, n=200), (1, 199))
        assert fit.alpha == pytest.approx(alpha, abs=1e-9)
        assert fit.log_amplitude == pytest.approx(np.log(0.7), abs=1e-9)

    def test_window_restricts_points(self):
        delays = np.arange(1, 40)
        values = np.where(delays <= 20, delays ** 2.0, 400.0).astype(float)
        fit = fit_power_law(MsdCurve(delays, values, 40 - delays), (1, 20))
        assert fit.alpha == pytest.approx(2.0, abs=1e-9)

    def test_zero_values_dropped(self):
        delays = np.arange(1, 10)
        values = np.array([1.0, 0.0, 3.0, 0.0, 5.0, 0.0, 7.0, 0.0, 9.0])
        fit = fit_power_law(MsdCurve(delays, values, 10 - delays), (1, 9))
        assert fit.alpha == pytest.approx(1.0, abs=1e-9)

    def test_insufficient_points(self):
        curve = power_curve(1.0)
        with pytest.raises(InsufficientDataError):
            fit_power_law(curve, (58.5, 59.5))

    def test_brownian_ensemble_alpha_near_one(self):
        alphas = []
        for seed in range(20):
            spec = SyntheticSpec("brownian", dims=16, steps=10000, seed=seed)
            curve = msd(generate(spec))
            alphas.append(fit_power_law(curve, (1, 100)).alpha)
        assert 0.9 <= float(np.mean(alphas)) <= 1.1


class TestSegmentPhases:
    def test_pure_ballistic_single_segment(self):
        segments = segment_phases(power_curve(2.0, n=120), max_breakpoints=2)
        assert len(segments) == 1
        assert segments[0][1] == pytest.approx(2.0, abs=1e-9)

    def test_spliced_ballistic_plateau(self):
        delays = np.arange(1, 101)
        values = np.where(delays <= 30, delays ** 2.0, 900.0).astype(float)
        curve = MsdCurve(delays, values, 101 - delays)
        segments = segment_phases(curve, max_breakpoints=2)
        assert len(segments) == 2
        (w1, a1), (w2, a2) = segments
        assert a1 == pytest.approx(2.0, abs=0.05)
        assert abs(a2) < 0.05
        # breakpoint lands within grid resolution of the true splice at 30
        assert 25 <= w1[1] <= 40
        assert w1[0] == 1.0 and w2[1] == 100.0

    def test_ou_trajectory_two_phase(self):
        spec = SyntheticSpec("ou_confined", dims=4, steps=20000, seed=3,
                             theta=0.01, sigma=1.0)
        curve = msd(generate(spec))
        segments = segment_phases(curve, max_breakpoints=2)
        assert len(segments) == 2
        assert 0.8 <= segments[0][1] <= 2.2   # early rise
        assert segments[-1][1] < 0.2          # late flat phase

    def test_ou_fast_reversion_has_flat_late_phase(self):
        spec = SyntheticSpec("ou_confined", dims=4, steps=20000, seed=3,
                             theta=0.05, sigma=1.0)
        segments = segment_phases(msd(generate(spec)), max_breakpoints=2)
        assert len(segments) >= 2
        assert segments[-1][1] < 0.2

    def test_windows_are_contiguous_ordered_covering(self):
        delays = np.arange(1, 500)
        values = np.where(delays <= 40, delays ** 1.8, np.nan)
        values = np.where(delays > 40, 40 ** 1.8 * (delays / 40) ** 0.3, values)
        curve = MsdCurve(delays, values, 500 - delays)
        window = default_fit_window(curve)
        segments = segment_phases(curve, max_breakpoints=2, window=window)
        assert segments[0][0][0] == window[0]
        assert segments[-1][0][1] == window[1]
        for (w_prev, _), (w_next, _) in zip(segments, segments[1:]):
            assert w_prev[1] < w_next[0]

    def test_breakpoints_never_hurt_sse(self):
        rng = np.random.default_rng(11)
        delays = np.arange(1, 300)
        values = delays ** 1.3 * np.exp(rng.normal(0, 0.3, size=299))
        curve = MsdCurve(delays, values, 300 - delays)

        def sse(segs):
            total = 0.0
            for (lo, hi), _ in segs:
                fit = fit_power_law(curve, (lo, hi))
                sel = (curve.delays >= lo) & (curve.delays <= hi)
                x = np.log(curve.delays[sel].astype(float))
                y = np.log(curve.values[sel])
                total += float(np.sum(
                    (y - fit.log_amplitude - fit.alpha * x) ** 2))
            return total

        single = sse([((1.0, 299.0), 0.0)])
        chosen = sse(segment_phases(curve, max_breakpoints=2, window=(1, 299)))
        assert chosen <= single + 1e-9

    def test_insufficient_points(self):
        with pytest.raises(InsufficientDataError):
            segment_phases(power_curve(1.0, n=8), max_breakpoints=2)


class TestClassify:
    def test_ballistic(self):
        curve = power_curve(2.0, n=200)
        fit = fit_power_law(curve, (1, 199))
        regime, plateau = classify_regime(fit, curve)
        assert regime == "ballistic"
        assert plateau is None

    def test_alpha_bands(self):
        from semrheo.msd import PowerLawFit
        curve = power_curve(2.0, n=200)  # rising: plateau never triggers
        mk = lambda a: PowerLawFit(a, 0.0, 1.0, (1.0, 199.0))
        assert classify_regime(mk(2.0), curve)[0] == "ballistic"
        assert classify_regime(mk(1.8), curve)[0] == "ballistic"
        assert classify_regime(mk(1.5), curve)[0] == "superdiffusive"
        assert classify_regime(mk(1.1), curve)[0] == "diffusive"
        assert classify_regime(mk(1.0), curve)[0] == "diffusive"
        assert classify_regime(mk(0.9), curve)[0] == "diffusive"
        assert classify_regime(mk(0.5), curve)[0] == "subdiffusive"

    def test_brownian_trajectory_diffusive(self):
        spec = SyntheticSpec("brownian", dims=16, steps=10000, seed=12)
        curve = msd(generate(spec))
        fit = fit_power_law(curve, (1, 100))
        regime, plateau = classify_regime(fit, curve)
        assert regime == "diffusive"
        assert plateau is None

    def test_ou_trajectory_confined(self):
        spec = SyntheticSpec("ou_confined", dims=8, steps=20000, seed=1,
                             theta=0.05, sigma=1.0)
        curve = msd(generate(spec))
        fit = fit_power_law(curve, default_fit_window(curve))
        regime, plateau = classify_regime(fit, curve)
        assert regime == "confined"
        # plateau near 2 * dims * sigma^2 = 16
        assert plateau == pytest.approx(16.0, rel=0.15)

    def test_plateau_absent_on_rising_curve(self):
        assert detect_plateau(power_curve(1.0, n=300)) is None

    def test_plateau_on_flat_curve(self):
        level = detect_plateau(power_curve(0.0, amp=5.0, n=300))
        assert level == pytest.approx(5.0, rel=1e-9)


class TestTailExponent:
    def test_pareto_sample(self):
        # inverse-CDF sampling oracle, independent uniform source
        u = np.random.default_rng(42).uniform(size=100000)
        lengths = 1.0 * u ** (-1.0 / 1.5)
        est = tail_exponent(lengths, tail_fraction=0.1)
        assert 1.2 <= est <= 1.8

    def test_exponential_control_reads_thin(self):
        lengths = np.random.default_rng(43).exponential(size=100000)
        assert tail_exponent(lengths, tail_fraction=0.1) > 3.0

    def test_all_equal_degenerate(self):
        with pytest.raises(InsufficientDataError):
            tail_exponent([2.0] * 100)

    def test_too_few_positive(self):
        with pytest.raises(InsufficientDataError):
            tail_exponent([1.0] * 10 + [0.0] * 50)

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            tail_exponent([1.0] * 100, tail_fraction=0.9)


class TestAnalyzeAndSerialize:
    def test_default_window_policy(self):
        short = power_curve(1.0, n=80)
        assert default_fit_window(short) == (1.0, 79.0)
        long = power_curve(1.0, n=801)
        assert default_fit_window(long) == (1.0, 200.0)

    def test_degenerate_constant_trajectory(self):
        with pytest.raises(InsufficientDataError):
            analyze_trajectory(Trajectory(np.ones((30, 2))))

    def test_report_fields(self):
        spec = SyntheticSpec("brownian", dims=4, steps=2000, seed=5)
        report, curve = analyze_trajectory(generate(spec))
        assert report.regime in ("diffusive", "subdiffusive", "superdiffusive")
        assert report.tail_exponent is not None
        assert report.segments
        doc = report_to_json(report)
        assert '"regime"' in doc and '"tail_exponent"' in doc

    def test_msd_csv_format(self):
        curve = MsdCurve(np.array([1, 2]), np.array([0.5, 1.25]),
                         np.array([3, 2]))
        assert msd_to_csv(curve) == "delay,msd,count\n1,0.5,3\n2,1.25,2\n"
