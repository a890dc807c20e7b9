"""Early turn-taking prediction on multivariate sensor streams."""

from .config import PipelineConfig
from .datamodel import (
    Recording,
    Segment,
    StateSpan,
    extract_segments,
    load_recording,
    save_recording,
)
from .dtw import DtwTemplates, fit_templates, md_dtw_distance
from .evaluation import (
    EvalReport,
    FractionGrid,
    confusion_and_f1,
    pof_poc,
    run_loso,
    sweep,
)
from .filters import FilterBank, build_default_bank, encode
from .fusion import Bba, ContextConfig, bba_from_probs, combine, context_bba, fuse_decision
from .lstm import LstmParams, TrainConfig, forward, gradient_check, train
from .preprocess import NormStats, ewma, fit_norm_stats, normalize
from .schema import ChannelSchema, default_channel_schema
from .selection import FeatureSet, binarize, chi2_stat, select
from .synthgen import GenConfig, difficulty_presets, generate

__version__ = "0.1.0"

__all__ = [
    "Bba",
    "ChannelSchema",
    "ContextConfig",
    "DtwTemplates",
    "EvalReport",
    "FeatureSet",
    "FilterBank",
    "FractionGrid",
    "GenConfig",
    "LstmParams",
    "NormStats",
    "PipelineConfig",
    "Recording",
    "Segment",
    "StateSpan",
    "TrainConfig",
    "bba_from_probs",
    "binarize",
    "build_default_bank",
    "chi2_stat",
    "combine",
    "confusion_and_f1",
    "context_bba",
    "default_channel_schema",
    "difficulty_presets",
    "encode",
    "ewma",
    "extract_segments",
    "fit_norm_stats",
    "fit_templates",
    "forward",
    "fuse_decision",
    "generate",
    "gradient_check",
    "load_recording",
    "md_dtw_distance",
    "normalize",
    "pof_poc",
    "run_loso",
    "save_recording",
    "select",
    "sweep",
    "train",
]
