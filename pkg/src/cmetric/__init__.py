"""Driving-style classification from trajectories via centrality of a proximity graph."""
from .centrality import CentralitySeries, NeighborHistory, closeness_at, compute_series, degree_step
from .config import Config
from .errors import (AgentNotPresentError, CMetricError, ConfigError, ConsistencyError,
                     FrameRangeError, ParameterError, ParseError, SeriesTooShortError,
                     ValidationError)
from .estimator import CMetricClassifier, check_trajectories
from .evaluation import AnnotationSet, TdeResult, compute_tde, expected_frame
from .graph import (FrameGraph, LaplacianState, build_frame_graph, degree_matrix, laplacian,
                    update_laplacian)
from .ingest import (TrajectoryDataset, TrajectoryPoint, VelocityEstimate, estimate_velocities,
                     parse_trajectories, write_csv, write_json)
from .signal import (ExtremePoint, SmoothedSeries, argmax_sle, find_extreme_points, sie, sle,
                     smooth_and_differentiate)
from .styles import (AgentResult, StyleDetection, StyleReport, classify, detect_conservative,
                     detect_overspeeding, detect_overtaking, detect_weaving)
from .synth import GroundTruthEvent, Scenario, generate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
