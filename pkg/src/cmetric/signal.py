"""Local polynomial smoothing, derivatives and extremum analysis of centrality rows.

Each frame gets a least-squares polynomial fitted over a window of
neighbouring frames; the value and analytic first/second derivatives of that
polynomial at the frame are reported, in per-second units.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ParameterError, SeriesTooShortError

DEFAULT_WINDOW = 11
DEFAULT_POLY_DEGREE = 2
DEFAULT_EPSILON = 5
DEFAULT_ZERO_TOL = 1e-3


@dataclass(frozen=True)
class SmoothedSeries:
    frames: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    window: int
    poly_degree: int
    frame_rate_hz: float

    @property
    def first_frame(self) -> int:
        return int(self.frames[0])

    @property
    def low_confidence(self) -> np.ndarray:
        """Mask of the first and last ``poly_degree`` frames."""
        mask = np.zeros(len(self.frames), dtype=bool)
        mask[:self.poly_degree] = True
        mask[len(mask) - self.poly_degree:] = True
        return mask

    def index_of(self, frame: int) -> int:
        return int(frame) - self.first_frame


@dataclass(frozen=True)
class ExtremePoint:
    frame: int
    kind: str
    sharpness: float

    def to_dict(self) -> dict:
        return {"frame": self.frame, "kind": self.kind, "sharpness": self.sharpness}


@lru_cache(maxsize=None)
def _fit_weights(window: int, degree: int, position: int) -> np.ndarray:
    """Rows map window samples to (value, d/dt, d2/dt2) at ``position``, per frame."""
    u = np.arange(window, dtype=float) - position
    vander = np.vander(u, degree + 1, increasing=True)
    coef = np.linalg.pinv(vander)
    weights = np.zeros((3, window))
    for k in range(min(3, degree + 1)):
        weights[k] = coef[k] * (1.0 if k < 2 else 2.0)
    weights.setflags(write=False)
    return weights


def smooth_and_differentiate(values, window: int = DEFAULT_WINDOW,
                             poly_degree: int = DEFAULT_POLY_DEGREE,
                             frame_rate_hz: float = 10.0, first_frame: int = 0) -> SmoothedSeries:
    """Fit a degree-``poly_degree`` polynomial around every frame.

    Interior frames use a window centred on the frame. Near the ends the
    window keeps its length but is shifted to stay inside the series, and the
    fit is evaluated off-centre.
    """
    y = np.asarray(values, dtype=float)
    if window % 2 == 0 or window < 1:
        raise ParameterError(f"window must be a positive odd integer, got {window}")
    if poly_degree < 0:
        raise ParameterError("poly_degree must be non-negative")
    if window < poly_degree + 2:
        raise ParameterError(f"window {window} too small for degree {poly_degree} (need >= degree + 2)")
    if not frame_rate_hz > 0:
        raise ParameterError("frame_rate_hz must be positive")
    n = len(y)
    if n < window:
        raise SeriesTooShortError(f"series of length {n} shorter than window {window}")

    half = window // 2
    out = np.empty((3, n))
    centred = _fit_weights(window, poly_degree, half)
    out[:, half:n - half] = centred @ sliding_window_view(y, window).T
    head, tail = y[:window], y[n - window:]
    for i in range(half):
        out[:, i] = _fit_weights(window, poly_degree, i) @ head
        out[:, n - 1 - i] = _fit_weights(window, poly_degree, window - 1 - i) @ tail

    frames = np.arange(first_frame, first_frame + n)
    return SmoothedSeries(frames, out[0], out[1] * frame_rate_hz, out[2] * frame_rate_hz ** 2,
                          window, poly_degree, float(frame_rate_hz))


def sle(series: SmoothedSeries) -> np.ndarray:
    """Style likelihood estimate: magnitude of the first derivative."""
    return np.abs(series.d1)


def sie(series: SmoothedSeries) -> np.ndarray:
    """Style intensity estimate: magnitude of the second derivative."""
    return np.abs(series.d2)


def sharpness_at(likelihood: np.ndarray, i: int, epsilon: int) -> float:
    lo, hi = max(0, i - epsilon), min(len(likelihood), i + epsilon + 1)
    return float(likelihood[lo:hi].max() - likelihood[i])


def find_extreme_points(series: SmoothedSeries, epsilon: int = DEFAULT_EPSILON,
                        zero_tol: float = DEFAULT_ZERO_TOL) -> list:
    """Local extrema of the smoothed row, located at sign changes of its slope.

    Slopes within ``zero_tol`` of zero count as flat; a flat run between two
    opposite-signed stretches is one extremum, placed at the frame of smallest
    slope magnitude. Extrema whose epsilon-sharpness does not exceed
    ``zero_tol`` are dropped.
    """
    if epsilon < 1:
        raise ParameterError("epsilon must be >= 1")
    d1 = series.d1
    likelihood = np.abs(d1)
    sign = np.where(likelihood <= zero_tol, 0, np.sign(d1)).astype(int)
    points = []
    last_idx, last_sign = None, 0
    for i, s in enumerate(sign):
        if s == 0:
            continue
        if last_sign and s != last_sign:
            span = likelihood[last_idx:i + 1]
            at = last_idx + int(np.argmin(span))
            kind = "maximum" if last_sign > 0 else "minimum"
            sharp = sharpness_at(likelihood, at, epsilon)
            if sharp > zero_tol:
                points.append(ExtremePoint(int(series.frames[at]), kind, sharp))
        last_idx, last_sign = i, s
    return points


def argmax_sle(series: SmoothedSeries, interval=None, exclude_low_confidence: bool = True) -> int:
    """Frame of maximum likelihood within ``interval`` (inclusive), earliest on ties.

    Low-confidence boundary frames are skipped unless nothing else remains.
    """
    t_a, t_b = (series.frames[0], series.frames[-1]) if interval is None else interval
    if t_b < t_a:
        raise ParameterError(f"empty interval [{t_a}, {t_b}]")
    if t_a < series.frames[0] or t_b > series.frames[-1]:
        raise ParameterError(f"interval [{t_a}, {t_b}] outside series range "
                             f"[{series.frames[0]}, {series.frames[-1]}]")
    lo, hi = series.index_of(t_a), series.index_of(t_b) + 1
    likelihood = sle(series)[lo:hi]
    if exclude_low_confidence:
        usable = ~series.low_confidence[lo:hi]
        if usable.any():
            likelihood = np.where(usable, likelihood, -np.inf)
    return int(series.frames[lo + int(np.argmax(likelihood))])
