"""LLM-backed user agents: perception, three-tier memory, actions.

Each agent carries an immutable profile (long-term memory), a dynamic
psychological state (short-term memory: emotion, social confidence,
opinion, summary), and the latest impression (flash memory).  Every
interaction step runs perceive -> decide -> reflect, all through prompt
templates filled from the agent state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .environment import ActionKind, AgentAction, PageKind, PageState
from .prompts import PromptSet, fmt_score
from .provider import (
    CompletionRequest,
    ParseError,
    Provider,
    ProviderError,
    RequestSeeder,
    TAG_TEMPERATURES,
    DEFAULT_TEMPERATURE,
    parse_choice,
    parse_fraction,
)

logger = logging.getLogger(__name__)

PREFERENCE_GROUPS = (
    "Entertainment",
    "Sports",
    "Lifestyle",
    "Society",
    "Culture",
    "Technology",
)

INITIAL_SCORE = 0.5  # neutral midpoint of the [0, 1] scale

DEGRADED_IMPRESSION_WORDS = 60


@dataclass
class LongTermMemory:
    """Immutable profile distilled from a user's posting history."""

    profile_text: str
    source_post_count: int = 0

    def __post_init__(self):
        if not self.profile_text:
            raise ValueError("profile_text must be non-empty")


@dataclass
class ShortTermMemory:
    emotion: float = INITIAL_SCORE
    social_confidence: float = INITIAL_SCORE
    opinion: str = ""
    summary: str = ""

    def __post_init__(self):
        self.emotion = min(1.0, max(0.0, self.emotion))
        self.social_confidence = min(1.0, max(0.0, self.social_confidence))


@dataclass
class FlashMemory:
    impression: str = ""


@dataclass
class UserAgent:
    id: str
    long_term: LongTermMemory
    preference_group: str
    short_term: ShortTermMemory = field(default_factory=ShortTermMemory)
    flash: FlashMemory = field(default_factory=FlashMemory)

    def __post_init__(self):
        if self.preference_group not in PREFERENCE_GROUPS:
            raise ValueError(f"unknown preference group {self.preference_group!r}")


_ACTION_TEXT = {
    "en": {
        ActionKind.VIEW_DETAILS: "Viewed the details of the trending topic",
        ActionKind.LIKE: "Liked it",
        ActionKind.COMMENT: "Commented on the trending topic: {text}",
        ActionKind.REPOST: "Reposted the trending topic",
        ActionKind.VIEW_MORE: "Viewed more comments",
        ActionKind.VIEW_COMMENT: "Opened the details of a comment",
        ActionKind.REPLY: "Replied to a comment: {text}",
        ActionKind.BACK: "Went back to the main page",
        ActionKind.LEAVE: "Left the social media session",
    },
    "zh": {
        ActionKind.VIEW_DETAILS: "查看了热门话题的详情",
        ActionKind.LIKE: "点了赞",
        ActionKind.COMMENT: "评论了热门话题：{text}",
        ActionKind.REPOST: "转发了热门话题",
        ActionKind.VIEW_MORE: "查看了更多评论",
        ActionKind.VIEW_COMMENT: "查看了一条评论的详情",
        ActionKind.REPLY: "回复了一条评论：{text}",
        ActionKind.BACK: "返回了主页面",
        ActionKind.LEAVE: "离开了社交媒体",
    },
}


def describe_action(action: AgentAction, language: str = "en") -> str:
    template = _ACTION_TEXT[language][action.kind]
    return template.format(text=action.text or "")


def _persona_fields(agent: UserAgent) -> dict:
    return {
        "profile": agent.long_term.profile_text,
        "summary": agent.short_term.summary,
        "opinion": agent.short_term.opinion,
        "emotion": fmt_score(agent.short_term.emotion),
        "social_confidence": fmt_score(agent.short_term.social_confidence),
    }


def _request(prompts: PromptSet, tag: str, text: str, seed: int) -> CompletionRequest:
    kind = "judge" if tag in ("judge", "censor") else "agent"
    return CompletionRequest(
        system_text=prompts.system_text(kind),
        user_text=text,
        temperature=TAG_TEMPERATURES.get(tag, DEFAULT_TEMPERATURE),
        seed=seed,
        tag=tag,
    )


def truncate_words(text: str, limit: int) -> str:
    words = text.split()
    if len(words) <= limit:
        return text
    return " ".join(words[:limit])


def distill_profile(posts: list[str], provider: Provider, prompts: PromptSet,
                    seed: int = 0) -> LongTermMemory:
    """Condense a post history into one immutable profile paragraph."""
    if not posts:
        raise ValueError("cannot distill a profile from zero posts")
    numbered = "\n".join(f"[{i}] {post}" for i, post in enumerate(posts))
    text = prompts.render("distill", posts=numbered)
    profile = provider.complete(_request(prompts, "distill", text, seed))
    return LongTermMemory(profile_text=profile.strip(), source_post_count=len(posts))


def perceive(agent: UserAgent, observation: str, provider: Provider,
             prompts: PromptSet, seeder: RequestSeeder, on_violation=None) -> str:
    """Form an impression of the observation and store it as flash memory."""
    if not observation:
        raise ValueError("observation must be non-empty")
    text = prompts.render("perceive", observation=observation, **_persona_fields(agent))
    try:
        impression = provider.complete(
            _request(prompts, "perceive", text, seeder.next("perceive"))
        ).strip()
    except ProviderError as exc:
        impression = truncate_words(observation, DEGRADED_IMPRESSION_WORDS)
        logger.warning("%s: perception degraded to raw observation (%s)", agent.id, exc)
        if on_violation:
            on_violation("perceive", f"degraded to raw observation: {exc}")
    agent.flash.impression = impression
    return impression


_PAGE_CHOICES = {
    PageKind.BROWSING: ("act_browsing", (ActionKind.VIEW_DETAILS, ActionKind.LEAVE)),
    PageKind.MAIN: (
        "act_main",
        (
            ActionKind.LIKE,
            ActionKind.COMMENT,
            ActionKind.REPOST,
            ActionKind.VIEW_MORE,
            ActionKind.VIEW_COMMENT,
            ActionKind.LEAVE,
        ),
    ),
    PageKind.COMMENT: ("act_comment_page", (ActionKind.LIKE, ActionKind.REPLY, ActionKind.BACK)),
}


def _fallback_action(page: PageState) -> AgentAction:
    if page.kind == PageKind.COMMENT:
        return AgentAction(kind=ActionKind.BACK)
    return AgentAction(kind=ActionKind.LEAVE)


def _complete_choice(provider, prompts, tag, text, seeder, n_options, on_violation, where):
    """One provider round plus one retry; returns index or None."""
    for attempt in range(2):
        try:
            raw = provider.complete(_request(prompts, tag, text, seeder.next(tag)))
            return parse_choice(raw, n_options)
        except (ParseError, ProviderError) as exc:
            detail = f"{where}: attempt {attempt + 1} failed: {exc}"
            logger.warning(detail)
            if attempt == 1 and on_violation:
                on_violation(where, detail)
    return None


def choose_reply_target(comment_texts: list[str], agent: UserAgent, provider: Provider,
                        prompts: PromptSet, seeder: RequestSeeder,
                        template_key: str = "choose_reply", on_violation=None) -> int:
    """Pick one comment out of the rendered list; index 0 on any failure."""
    if not comment_texts:
        raise ValueError("no comments to choose from")
    if len(comment_texts) == 1:
        return 0
    listing = "\n".join(f"[{i}] {text}" for i, text in enumerate(comment_texts))
    text = prompts.render(template_key, comments=listing, **_persona_fields(agent))
    choice = _complete_choice(
        provider, prompts, "decide", text, seeder, len(comment_texts), on_violation,
        "choose_comment",
    )
    return 0 if choice is None else choice


def _generate_text(agent, provider, prompts, seeder, key, on_violation) -> str | None:
    text = prompts.render(key, impression=agent.flash.impression, **_persona_fields(agent))
    try:
        return provider.complete(_request(prompts, "decide", text, seeder.next("decide"))).strip()
    except ProviderError as exc:
        detail = f"{key}: text generation failed: {exc}"
        logger.warning("%s: %s", agent.id, detail)
        if on_violation:
            on_violation(key, detail)
        return None


def decide(agent: UserAgent, page: PageState, comment_texts: list[str],
           provider: Provider, prompts: PromptSet, seeder: RequestSeeder,
           on_violation=None) -> AgentAction:
    """Pick the next action for the current page.

    comment_texts is the display text of the comments on the current
    page, in render order; it backs both reply targeting and
    view-details targeting.
    """
    template_key, options = _PAGE_CHOICES[page.kind]
    text = prompts.render(
        template_key, impression=agent.flash.impression, **_persona_fields(agent)
    )
    choice = _complete_choice(
        provider, prompts, "decide", text, seeder, len(options), on_violation, "decide"
    )
    if choice is None:
        return _fallback_action(page)
    kind = options[choice]

    if kind == ActionKind.COMMENT:
        body = _generate_text(agent, provider, prompts, seeder, "write_comment", on_violation)
        if body is None:
            return _fallback_action(page)
        return AgentAction(kind=kind, text=body)

    if kind == ActionKind.REPLY:
        if not comment_texts:
            if on_violation:
                on_violation("decide", "reply chosen with no visible comment")
            return _fallback_action(page)
        index = choose_reply_target(
            comment_texts, agent, provider, prompts, seeder, "choose_reply", on_violation
        )
        body = _generate_text(agent, provider, prompts, seeder, "write_reply", on_violation)
        if body is None:
            return _fallback_action(page)
        return AgentAction(kind=kind, text=body, index=index)

    if kind == ActionKind.VIEW_COMMENT:
        if not comment_texts:
            if on_violation:
                on_violation("decide", "view-comment chosen with no visible comment")
            return _fallback_action(page)
        index = choose_reply_target(
            comment_texts, agent, provider, prompts, seeder, "choose_view", on_violation
        )
        return AgentAction(kind=kind, index=index)

    return AgentAction(kind=kind)


def _reflect_score(agent, provider, prompts, seeder, tag, key, action_text,
                   prior: float, on_violation) -> float:
    text = prompts.render(
        key,
        impression=agent.flash.impression,
        action=action_text,
        **_persona_fields(agent),
    )
    for attempt in range(2):
        try:
            raw = provider.complete(_request(prompts, tag, text, seeder.next(tag)))
            return parse_fraction(raw)
        except (ParseError, ProviderError) as exc:
            detail = f"{key}: attempt {attempt + 1} failed: {exc}"
            logger.warning("%s: %s", agent.id, detail)
            if attempt == 1 and on_violation:
                on_violation(key, f"{detail}; keeping prior value")
    return prior


def reflect(agent: UserAgent, impression: str, action: AgentAction, provider: Provider,
            prompts: PromptSet, seeder: RequestSeeder, on_violation=None) -> ShortTermMemory:
    """Update short-term memory from the step's impression and action.

    Four provider rounds: emotion percentage, social-confidence
    percentage, a fresh 40-word summary, and a fresh personal opinion.
    Scores are clamped into [0, 1]; on unparseable output the prior
    value is kept.
    """
    agent.flash.impression = impression
    action_text = describe_action(action, prompts.language)
    prior = agent.short_term
    emotion = _reflect_score(
        agent, provider, prompts, seeder, "reflect_emotion", "reflect_emotion",
        action_text, prior.emotion, on_violation,
    )
    confidence = _reflect_score(
        agent, provider, prompts, seeder, "reflect_sc", "reflect_sc",
        action_text, prior.social_confidence, on_violation,
    )

    def fresh_text(tag: str, key: str, fallback: str) -> str:
        text = prompts.render(
            key, impression=agent.flash.impression, action=action_text,
            **_persona_fields(agent),
        )
        try:
            return provider.complete(_request(prompts, tag, text, seeder.next(tag))).strip()
        except ProviderError as exc:
            logger.warning("%s: %s failed, keeping prior (%s)", agent.id, key, exc)
            if on_violation:
                on_violation(key, f"kept prior text: {exc}")
            return fallback

    summary = fresh_text("reflect_summary", "reflect_summary", prior.summary)
    opinion = fresh_text("reflect_opinion", "reflect_opinion", prior.opinion)

    agent.short_term = ShortTermMemory(
        emotion=emotion, social_confidence=confidence, opinion=opinion, summary=summary
    )
    return replace(agent.short_term)
