"""Adaptive placeholder completion: cost calculus, alignment, reward and evaluation."""

from .align import (
    CURSOR,
    CURSOR_TEXT,
    DiffSegment,
    Kind,
    diff_segments,
    lcs_len,
    levenshtein,
    make_pc_instance,
    pc_spans,
    tokenize,
)
from .costmodel import (
    CostOptimalAbstainer,
    CostParams,
    TokenDistribution,
    benefit,
    entropy_threshold,
    expected_cost_apc,
    expected_cost_hc,
    optimal_mask,
    per_position_benefit,
    shannon_entropy,
    step_cost,
    verify_theorem,
)
from .data import CompletionRecord, DatasetSplit, build_dataset, ingest, write_records
from .exceptions import APCError, AssumptionViolation, CursorError, DataError
from .lm import NgramLM, PositionProfile, load_distributions, profiles_from_distributions
from .metrics import MetricsReport, RecordScore, aggregate, f1_score, score_record
from .reward import RewardConfig, cost_counts, edit_similarity, exact_match, reward, saturate, score_reward
from .sim import ThresholdPlaceholderer, ThresholdPolicy, apply_threshold, cumulative_entropy, sweep

__version__ = "0.1.0"
