"""Discrete-event simulator of a trending topic under comment poisoning.

A topic's lifecycle is driven by a smooth three-stage access density;
LLM-backed user agents browse, comment, and reflect in time-ordered
sessions while prototype-based attackers inject poisoning comments, and
an optional moderation pass flags malicious text before it is seen.
Providers are pluggable, with a deterministic mock for offline work.
"""

from .agents import (
    FlashMemory,
    LongTermMemory,
    ShortTermMemory,
    UserAgent,
    decide,
    distill_profile,
    perceive,
    reflect,
)
from .attackers import AttackerAgent, AttackerPrototype, build_roster, generate_poison
from .censorship import CensorVerdict, censor
from .config import ConfigError, ProfileRecord, RunConfig, load_profiles, load_topics
from .engine import RunResult, simulate
from .environment import (
    ActionKind,
    AgentAction,
    Comment,
    PageState,
    Reply,
    Session,
    TrendingTopic,
    apply_action,
    rank_comments,
    render,
)
from .evaluation import EvalConfig, evaluate_log
from .eventlog import EventLogRecord, read_event_log
from .events import EventQueue, SimEvent
from .lifecycle import (
    AccessSampler,
    LifecycleParams,
    density,
    density_unnormalized,
    normalizer,
    verify_smoothness,
)
from .metrics import (
    JudgeScore,
    PsychSnapshot,
    aggregate_end,
    group_breakdown,
    judge_attacker,
    judge_system,
    judge_user,
    timeline,
)
from .prompts import PromptSet
from .provider import (
    CompletionRequest,
    MockBackend,
    MockRule,
    ParseError,
    Provider,
    ProviderConfig,
    ProviderError,
    parse_choice,
    parse_fraction,
    parse_score_100,
)
from .reporting import build_report

__version__ = "0.1.0"
