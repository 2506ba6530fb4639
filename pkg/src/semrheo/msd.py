"""Mean-squared-displacement analysis of trajectories.

For a trajectory e_0..e_{N-1} the curve holds, for every delay n in 1..N-1,
the time average

    MSD(n) = 1/(N-n) * sum_i |e_{i+n} - e_i|^2,   i = 0..N-n-1

computed exactly by per-delay summation for short trajectories and via the
FFT autocorrelation identity for long ones (points are centered first, which
the translation invariance of MSD permits and which keeps the cancellation
error tiny). On top of the curve: log-log power-law fits, piecewise phase
segmentation with a BIC-style penalty, plateau detection, regime labels,
and a Hill estimator for step-length tails.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .errors import InsufficientDataError, InvariantError

PROVENANCES = ("walk", "document", "synthetic")

REGIMES = ("ballistic", "superdiffusive", "diffusive", "subdiffusive",
           "confined")

# direct summation below this many points, FFT autocorrelation above
_DIRECT_LIMIT = 512

# plateau = terminal-decade log-log slope below this and relative rise below 10%
_PLATEAU_SLOPE = 0.1
_PLATEAU_RISE = 0.10


@dataclass(frozen=True)
class Trajectory:
    """Ordered D-dimensional points with a provenance tag."""
    points: np.ndarray
    provenance: str = "synthetic"

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise InvariantError(f"trajectory shape {pts.shape} invalid; "
                                 "need at least 2 points of dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvariantError("trajectory contains NaN or Inf")
        if self.provenance not in PROVENANCES:
            raise InvariantError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class MsdCurve:
    delays: np.ndarray
    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=np.int64)
        v = np.asarray(self.values, dtype=np.float64)
        c = np.asarray(self.counts, dtype=np.int64)
        if not (len(d) == len(v) == len(c)) or len(d) == 0:
            raise InvariantError("delays/values/counts length mismatch")
        if np.any(np.diff(d) <= 0):
            raise InvariantError("delays must be strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvariantError("MSD values must be finite and >= 0")
        if np.any(c < 1):
            raise InvariantError("counts must be >= 1")
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "counts", c)


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    log_amplitude: float
    r2: float
    window: tuple[float, float]


@dataclass(frozen=True)
class DiffusionReport:
    fit: PowerLawFit
    segments: list[tuple[tuple[float, float], float]]
    regime: str
    plateau_level: float | None
    tail_exponent: float | None


def displacement(traj: Trajectory, i: int, j: int) -> np.ndarray:
    """Componentwise e_i - e_j for 0 <= i < j < N; the delay is j - i."""
    n = len(traj)
    if not (0 <= i < j < n):
        raise IndexError(f"need 0 <= i < j < {n}, got i={i}, j={j}")
    return traj.points[i] - traj.points[j]


def msd(traj: Trajectory) -> MsdCurve:
    """Time-averaged MSD at every delay 1..N-1."""
    pts = traj.points
    n = len(pts)
    delays = np.arange(1, n, dtype=np.int64)
    counts = n - delays
    if n <= _DIRECT_LIMIT:
        values = _msd_direct(pts)
    else:
        values = _msd_fft(pts)
    return MsdCurve(delays, values, counts)


def _msd_direct(pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    out = np.empty(n - 1, dtype=np.float64)
    for lag in range(1, n):
        d = pts[lag:] - pts[:-lag]
        out[lag - 1] = np.einsum("ij,ij->i", d, d).mean()
    return out


def _msd_fft(pts: np.ndarray) -> np.ndarray:
    # centering leaves MSD unchanged and keeps the S - 2C cancellation benign
    x = pts - pts.mean(axis=0)
    n = len(x)
    nfft = next_fast_len(2 * n)
    f = np.fft.rfft(x, n=nfft, axis=0)
    acf = np.fft.irfft(f * np.conj(f), n=nfft, axis=0)[:n].sum(axis=1)
    s = np.einsum("ij,ij->i", x, x)
    css = np.concatenate(([0.0], np.cumsum(s)))
    lags = np.arange(1, n)
    head = css[n - lags]            # sum of S_i, i = 0..N-lag-1
    tail = css[n] - css[lags]       # sum of S_{i+lag}
    values = (head + tail - 2.0 * acf[1:n]) / (n - lags)
    return np.maximum(values, 0.0)


def step_lengths(traj: Trajectory) -> np.ndarray:
    """|e_{i+1} - e_i| for each consecutive pair, order preserved."""
    return np.linalg.norm(np.diff(traj.points, axis=0), axis=1)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line y = a + b x; returns (b, a, r2)."""
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    sxy = ((x - xm) * (y - ym)).sum()
    slope = sxy / sxx if sxx > 0 else 0.0
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = (resid ** 2).sum()
    ss_tot = ((y - ym) ** 2).sum()
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-24 * max(1.0, n) else 0.0
    return slope, intercept, r2


def default_fit_window(curve: MsdCurve) -> tuple[float, float]:
    """Full range for short curves; delays 1..N/4 for long ones.

    Long-delay values average very few displacement samples (counts = N-n)
    and are too noisy to anchor a fit.
    """
    n_delays = len(curve.delays)
    if n_delays <= 100:
        return (float(curve.delays[0]), float(curve.delays[-1]))
    return (float(curve.delays[0]), float(max(2, (n_delays + 1) // 4)))


def _usable(curve: MsdCurve, window: tuple[float, float]):
    lo, hi = window
    if lo >= hi:
        raise ValueError(f"bad window {window}")
    sel = (curve.delays >= lo) & (curve.delays <= hi) & (curve.values > 0)
    return curve.delays[sel], curve.values[sel]


def fit_power_law(curve: MsdCurve, window: tuple[float, float]) -> PowerLawFit:
    """OLS of ln(MSD) on ln(delay) over the window; alpha is the slope.

    Zero values are dropped before the log transform.
    """
    d, v = _usable(curve, window)
    if len(d) < 2:
        raise InsufficientDataError(
            f"window {window} has {len(d)} usable points, need >= 2")
    slope, intercept, r2 = _ols(np.log(d.astype(np.float64)), np.log(v))
    return PowerLawFit(alpha=float(slope), log_amplitude=float(intercept),
                       r2=float(r2), window=(float(window[0]), float(window[1])))


class _SegmentStats:
    """O(1) least-squares SSE on any index range via prefix sums."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        z = np.zeros(1)
        self.sx = np.concatenate((z, np.cumsum(x)))
        self.sy = np.concatenate((z, np.cumsum(y)))
        self.sxy = np.concatenate((z, np.cumsum(x * y)))
        self.sxx = np.concatenate((z, np.cumsum(x * x)))
        self.syy = np.concatenate((z, np.cumsum(y * y)))

    def fit(self, i: int, j: int) -> tuple[float, float, float]:
        """Slope, intercept, SSE over the half-open index range [i, j)."""
        n = j - i
        sx = self.sx[j] - self.sx[i]
        sy = self.sy[j] - self.sy[i]
        sxy = self.sxy[j] - self.sxy[i]
        sxx = self.sxx[j] - self.sxx[i]
        syy = self.syy[j] - self.syy[i]
        denom = n * sxx - sx * sx
        if denom > 0:
            slope = (n * sxy - sx * sy) / denom
        else:
            slope = 0.0
        intercept = (sy - slope * sx) / n
        sse = (syy + slope * slope * sxx + n * intercept * intercept
               - 2.0 * slope * sxy - 2.0 * intercept * sy
               + 2.0 * slope * intercept * sx)
        return slope, intercept, max(sse, 0.0)


def segment_phases(curve: MsdCurve, max_breakpoints: int = 2,
                   window: tuple[float, float] | None = None,
                   ) -> list[tuple[tuple[float, float], float]]:
    """Piecewise log-log fit with 0..max_breakpoints breaks.

    Breakpoints are searched exhaustively on a log-spaced grid of at most 50
    candidate delays; the breakpoint count is chosen by penalized SSE
    (penalty 2 * n_segments * ln(n_points)). Long curves are log-resampled
    (<= 200 points) before the SSE is evaluated so that the short-delay
    decades, which hold most of the shape, are not swamped by the many
    long-delay points. Returns contiguous (delay window, alpha) segments
    covering the fit range.
    """
    if not (0 <= max_breakpoints <= 2):
        raise ValueError("max_breakpoints must be 0, 1, or 2")
    if window is None:
        window = default_fit_window(curve)
    d, v = _usable(curve, window)
    if len(d) < (max_breakpoints + 1) * 3:
        raise InsufficientDataError(
            f"{len(d)} usable points cannot support {max_breakpoints} "
            "breakpoints")
    if len(d) > 200:
        grid = np.geomspace(d[0], d[-1], 200)
        keep = np.unique(np.searchsorted(d, grid, side="left")
                         .clip(0, len(d) - 1))
        d, v = d[keep], v[keep]
    m = len(d)
    x = np.log(d.astype(np.float64))
    y = np.log(v)
    stats = _SegmentStats(x, y)

    # candidate break indices: last point of the left-hand segment, snapped
    # from a log-spaced delay grid
    grid = np.geomspace(d[0], d[-1], num=min(50, m))
    cand = sorted({int(np.searchsorted(d, g, side="right")) for g in grid})
    cand = [c for c in cand if 3 <= c <= m - 3]

    def evaluate(cuts: tuple[int, ...]) -> float:
        bounds = [0, *cuts, m]
        return sum(stats.fit(bounds[s], bounds[s + 1])[2]
                   for s in range(len(bounds) - 1))

    best: dict[int, tuple[float, tuple[int, ...]]] = {0: (evaluate(()), ())}
    if max_breakpoints >= 1:
        options = [(evaluate((c,)), (c,)) for c in cand]
        if options:
            best[1] = min(options)
    if max_breakpoints >= 2:
        options = []
        for a_i, a in enumerate(cand):
            for b in cand[a_i + 1:]:
                if b - a >= 3:
                    options.append((evaluate((a, b)), (a, b)))
        if options:
            best[2] = min(options)

    def penalized(k: int) -> float:
        sse, _ = best[k]
        return sse + 2.0 * (k + 1) * math.log(m)

    k_best = min(best, key=lambda k: (penalized(k), k))
    _, cuts = best[k_best]
    bounds = [0, *cuts, m]
    segments = []
    for s in range(len(bounds) - 1):
        i, j = bounds[s], bounds[s + 1]
        slope, _, _ = stats.fit(i, j)
        lo = float(window[0]) if s == 0 else float(d[i])
        hi = float(window[1]) if s == len(bounds) - 2 else float(d[j - 1])
        segments.append(((lo, hi), float(slope)))
    return segments


def detect_plateau(curve: MsdCurve) -> float | None:
    """Mean MSD over the terminal decade if the curve has flattened there.

    Flat means: log-log slope below 0.1 across the last decade of delays
    and a relative rise below 10% between the decade's halves.
    """
    d_max = float(curve.delays[-1])
    lo = d_max / 10.0
    sel = (curve.delays >= lo) & (curve.values > 0)
    d = curve.delays[sel].astype(np.float64)
    v = curve.values[sel]
    if len(d) < 4:
        return None
    slope, _, _ = _ols(np.log(d), np.log(v))
    if abs(slope) >= _PLATEAU_SLOPE:
        return None
    mid = math.sqrt(lo * d_max)
    first = v[d <= mid]
    second = v[d > mid]
    if len(first) == 0 or len(second) == 0:
        return None
    base = first.mean()
    if base <= 0 or (second.mean() / base - 1.0) >= _PLATEAU_RISE:
        return None
    return float(v.mean())


def classify_regime(fit: PowerLawFit,
                    curve: MsdCurve) -> tuple[str, float | None]:
    """Regime label for a fitted curve; returns (regime, plateau_level)."""
    plateau = detect_plateau(curve)
    if plateau is not None:
        return "confined", plateau
    a = fit.alpha
    if a >= 1.8:
        return "ballistic", None
    if a > 1.1:
        return "superdiffusive", None
    if a >= 0.9:
        return "diffusive", None
    return "subdiffusive", None


def tail_exponent(lengths, tail_fraction: float = 0.1) -> float:
    """Hill estimate of the power-law tail index of step lengths.

    Uses the k = ceil(tail_fraction * M) largest of the M positive lengths:
    alpha = k / sum_i ln(x_(i) / x_(k+1)).
    """
    if not (0.0 < tail_fraction <= 0.5):
        raise ValueError("tail_fraction must be in (0, 0.5]")
    xs = np.asarray(lengths, dtype=np.float64)
    xs = xs[xs > 0]
    m = len(xs)
    if m < 20:
        raise InsufficientDataError(f"{m} positive lengths, need >= 20")
    k = min(int(math.ceil(tail_fraction * m)), m - 1)
    xs = np.sort(xs)[::-1]
    pivot = xs[k]
    total = np.log(xs[:k] / pivot).sum()
    if total <= 0.0:
        raise InsufficientDataError("degenerate tail: top lengths all equal")
    return float(k / total)


def analyze_trajectory(traj: Trajectory, max_breakpoints: int = 2,
                       window: tuple[float, float] | None = None,
                       tail_fraction: float = 0.1,
                       ) -> tuple[DiffusionReport, MsdCurve]:
    """MSD, full-window fit, phase segments, regime, and tail estimate."""
    curve = msd(traj)
    if not np.any(curve.values > 0):
        raise InsufficientDataError(
            "degenerate constant trajectory: MSD is zero everywhere")
    if window is None:
        window = default_fit_window(curve)
    fit = fit_power_law(curve, window)
    try:
        segments = segment_phases(curve, max_breakpoints, window)
    except InsufficientDataError:
        segments = [(fit.window, fit.alpha)]
    regime, plateau = classify_regime(fit, curve)
    tail: float | None
    try:
        tail = tail_exponent(step_lengths(traj), tail_fraction)
    except InsufficientDataError:
        tail = None
    report = DiffusionReport(fit=fit, segments=segments, regime=regime,
                             plateau_level=plateau, tail_exponent=tail)
    return report, curve


def msd_to_csv(curve: MsdCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["delay", "msd", "count"])
    for d, v, c in zip(curve.delays, curve.values, curve.counts):
        writer.writerow([int(d), repr(float(v)), int(c)])
    return buf.getvalue()


def report_to_json(report: DiffusionReport) -> str:
    doc = {
        "fit": {
            "alpha": report.fit.alpha,
            "log_amplitude": report.fit.log_amplitude,
            "r2": report.fit.r2,
            "window": list(report.fit.window),
        },
        "segments": [
            {"window": list(win), "alpha": alpha}
            for win, alpha in report.segments
        ],
        "regime": report.regime,
        "plateau_level": report.plateau_level,
        "tail_exponent": report.tail_exponent,
    }
    return json.dumps(doc, indent=2) + "\n"
