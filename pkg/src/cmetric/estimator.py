"""scikit-learn style front end: one sample per agent, labels are global behaviours."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .centrality import compute_series
from .config import Config
from .errors import ValidationError
from .ingest import DEFAULT_FRAME_RATE_HZ, TrajectoryDataset, TrajectoryPoint
from .styles import STYLES, analyze_series, smooth_rows
from .signal import sie, sle

FEATURE_NAMES = ("closeness_sle_max", "degree_sle_max", "closeness_sie_max", "degree_sie_max",
                 "closeness_t_sle", "degree_t_sle") + tuple(f"has_{s}" for s in STYLES)

_COLUMNS = ("agent_id", "frame", "x", "y")


def check_trajectories(X, frame_rate_hz: float | None = None) -> TrajectoryDataset:
    """Coerce ``X`` into a :class:`TrajectoryDataset`.

    Accepts a dataset (returned as is unless a different rate is requested),
    a DataFrame with ``agent_id, frame, x, y`` columns, or any array-like of
    rows in that column order.
    """
    if isinstance(X, TrajectoryDataset):
        if frame_rate_hz is None or frame_rate_hz == X.frame_rate_hz:
            return X
        tracks = {a: (X.frames_of(a)[0], X.positions(a)) for a in X.agents}
        return TrajectoryDataset(tracks, frame_rate_hz)
    rate = DEFAULT_FRAME_RATE_HZ if frame_rate_hz is None else frame_rate_hz
    columns = getattr(X, "columns", None)
    if columns is not None:
        missing = [c for c in _COLUMNS if c not in columns]
        if missing:
            raise ValidationError(f"trajectory frame is missing columns {missing}")
        rows = zip(*(X[c].tolist() for c in _COLUMNS))
    else:
        arr = np.asarray(X, dtype=object)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValidationError(f"expected rows of (agent_id, frame, x, y), got shape {arr.shape}")
        rows = arr.tolist()
    points = []
    for agent, frame, x, y in rows:
        try:
            frame_f = float(frame)
            if frame_f != int(frame_f):
                raise ValueError
            points.append(TrajectoryPoint(_agent_str(agent), int(frame_f), float(x), float(y)))
        except (TypeError, ValueError):
            raise ValidationError(f"bad trajectory row {(agent, frame, x, y)!r}") from None
    return TrajectoryDataset.from_points(points, rate)


def _agent_str(agent) -> str:
    if isinstance(agent, (float, np.floating)) and float(agent).is_integer():
        return str(int(agent))
    return str(agent)


class CMetricClassifier(TransformerMixin, BaseEstimator):
    """Per-agent driving-style classifier over a set of trajectories.

    ``fit`` runs the full pipeline on ``X`` (there is nothing to learn; all
    parameters are fixed thresholds) and stores the report. ``predict``
    returns one global-behaviour label per agent in ``agents_`` order, and
    ``transform`` returns the per-agent feature matrix described by
    ``get_feature_names_out``. Passing the fitted object again reuses the
    stored results instead of recomputing them.

    ``frame_rate_hz=None`` uses the dataset's own rate.
    """

    def __init__(self, mu=10.0, window=11, poly_degree=2, epsilon=5, zero_tol=1e-3,
                 threshold_overtake=0.1, threshold_overspeed=2.0, sharp_tol=0.03,
                 min_extrema=3, frame_rate_hz=None, interval=None):
        self.mu = mu
        self.window = window
        self.poly_degree = poly_degree
        self.epsilon = epsilon
        self.zero_tol = zero_tol
        self.threshold_overtake = threshold_overtake
        self.threshold_overspeed = threshold_overspeed
        self.sharp_tol = sharp_tol
        self.min_extrema = min_extrema
        self.frame_rate_hz = frame_rate_hz
        self.interval = interval

    def _config(self, rate: float) -> Config:
        params = self.get_params()
        params["frame_rate_hz"] = rate
        return Config(**params)

    def _run(self, X):
        ds = check_trajectories(X, self.frame_rate_hz)
        config = self._config(ds.frame_rate_hz)
        series = compute_series(ds, config.mu)
        return ds, config, series, analyze_series(series, config, ds.frame_rate_hz)

    def fit(self, X, y=None):
        self._fit_input = X
        ds, self.config_, self.series_, self.report_ = self._run(X)
        self.agents_ = np.array(ds.agents, dtype=object)
        self.n_features_in_ = len(_COLUMNS)
        return self

    def _check_fitted(self):
        if not hasattr(self, "report_"):
            raise NotFittedError("CMetricClassifier is not fitted yet; call fit first")

    def _outputs(self, X):
        self._check_fitted()
        if X is self._fit_input:
            return self.config_, self.series_, self.report_
        _, config, series, report = self._run(X)
        return config, series, report

    def predict(self, X):
        """Global behaviour per agent, in dataset agent order."""
        _, _, report = self._outputs(X)
        return np.array([r.global_behavior for r in report.agents], dtype=object)

    def fit_predict(self, X, y=None):
        return self.fit(X).predict(X)

    def transform(self, X):
        config, series, report = self._outputs(X)
        rows = []
        for result in report.agents:
            row = np.full(len(FEATURE_NAMES), np.nan)
            try:
                c, d = smooth_rows(series[result.agent_id], config, config.frame_rate_hz,
                                   config.interval)
            except ValueError:
                c = d = None
            if c is not None:
                interior_c, interior_d = ~c.low_confidence, ~d.low_confidence
                lc, ld = sle(c), sle(d)
                row[0] = lc[interior_c].max()
                row[1] = ld[interior_d].max()
                row[2] = sie(c)[interior_c].max()
                row[3] = sie(d)[interior_d].max()
                row[4] = c.frames[interior_c][np.argmax(lc[interior_c])]
                row[5] = d.frames[interior_d][np.argmax(ld[interior_d])]
            styles = set(result.styles)
            row[6:] = [float(s in styles) for s in STYLES]
            rows.append(row)
        return np.vstack(rows) if rows else np.empty((0, len(FEATURE_NAMES)))

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)
