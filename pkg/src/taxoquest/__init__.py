"""Budget-constrained interactive search in label hierarchies."""

from .hierarchy import Hierarchy, load_hierarchy
from .oracle import Answer, NoisyOracleConfig, TargetSet, TruthfulOracle
from .penalty import SelectionSet, pairwise_penalty, set_penalty
from .session import init_session, apply_answer, finalize_selection
from .engines import make_engine, run_session, ALGORITHMS

__all__ = [
    "Hierarchy", "load_hierarchy",
    "Answer", "NoisyOracleConfig", "TargetSet", "TruthfulOracle",
    "SelectionSet", "pairwise_penalty", "set_penalty",
    "init_session", "apply_answer", "finalize_selection",
    "make_engine", "run_session", "ALGORITHMS",
]

__version__ = "0.1.0"
