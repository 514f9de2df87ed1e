"""Activity prediction in link streams.

Predicts how many times each node pair will interact during a future window
by extrapolating the global link volume and sharing it out proportionally to
a learned linear combination of structural, hybrid and temporal pair metrics.
"""
__version__ = "0.1.0"

from ._accel import get_backend, set_backend
from .classes import CLASS_NAMES, ClassPartition, assign_classes, classed_predict, classed_train
from .errors import (ConfigError, DegenerateIndexError, ParseError, PipelineError,
                     StreamPredictError)
from .evaluation import (Confusion, EvaluationReport, categorize_pairs, confusion, evaluate,
                         macro_f, prf)
from .learner import (LearnerConfig, ObjectiveProblem, PeriodSchedule, objective, optimize,
                      split_periods, train)
from .metrics import (ALL_METRICS, REDUCED_METRICS, MetricId, ScoreTable, correlation_matrix,
                      hybrid_score, normalize, parse_metric, score_all, structural_score,
                      temporal_score)
from .predictor import ActivityPrediction, PairMap, allocate, extrapolate_total, prediction_index
from .stream import Interval, Link, LinkStream, NodePair, load_stream, read_stream
from .sweep import SweepSpec, run_sweep
