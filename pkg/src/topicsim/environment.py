"""Centralized trending-topic hub and its three-page interactive system.

All participants read and write one shared topic: a public description,
a like-ranked comment list, and per-comment replies.  Observation pages
come in three kinds (browsing, main, comment detail), with time-based
visibility so nothing written during a later minute shows up earlier.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from .lifecycle import LifecycleParams

logger = logging.getLogger(__name__)

SENTIMENTS = ("positive", "negative", "neutral")

DEFAULT_PAGE_SIZE = 5
DEFAULT_MAX_ACTIONS = 6


class NavigationError(Exception):
    """Comment page requested for a missing or filtered comment."""


class ProtocolError(Exception):
    """Action not legal on the current page."""


@dataclass
class Reply:
    id: str
    author_id: str
    text: str
    created_at: float
    like_count: int = 0
    flagged: bool = False
    is_poison: bool = False


@dataclass
class Comment:
    id: str
    author_id: str
    text: str
    created_at: float
    like_count: int = 0
    replies: list[Reply] = field(default_factory=list)
    flagged: bool = False
    is_poison: bool = False


@dataclass
class TrendingTopic:
    id: str
    title: str
    summary: str
    full_content: str
    sentiment: str = "neutral"
    like_count: int = 0
    repost_count: int = 0
    params: LifecycleParams = field(default_factory=LifecycleParams)
    comments: list[Comment] = field(default_factory=list)
    _next_comment: int = 0
    _next_reply: int = 0

    def __post_init__(self):
        if not self.title or not self.summary:
            raise ValueError("topic title and summary must be non-empty")
        if self.sentiment not in SENTIMENTS:
            raise ValueError(f"sentiment must be one of {SENTIMENTS}")

    def add_comment(self, author_id: str, text: str, created_at: float, is_poison: bool = False) -> Comment:
        comment = Comment(
            id=f"c{self._next_comment:05d}",
            author_id=author_id,
            text=text,
            created_at=created_at,
            is_poison=is_poison,
        )
        self._next_comment += 1
        self.comments.append(comment)
        return comment

    def add_reply(self, comment: Comment, author_id: str, text: str, created_at: float,
                  is_poison: bool = False) -> Reply:
        if created_at < comment.created_at:
            raise ValueError("reply cannot predate its parent comment")
        reply = Reply(
            id=f"r{self._next_reply:05d}",
            author_id=author_id,
            text=text,
            created_at=created_at,
            is_poison=is_poison,
        )
        self._next_reply += 1
        comment.replies.append(reply)
        return reply

    def find_comment(self, comment_id: str) -> Comment | None:
        for comment in self.comments:
            if comment.id == comment_id:
                return comment
        return None


class PageKind(Enum):
    BROWSING = "browsing"
    MAIN = "main"
    COMMENT = "comment"


@dataclass(frozen=True)
class PageState:
    kind: PageKind
    offset: int = 0
    comment_id: str | None = None

    @staticmethod
    def browsing() -> "PageState":
        return PageState(PageKind.BROWSING)

    @staticmethod
    def main(offset: int = 0) -> "PageState":
        return PageState(PageKind.MAIN, offset=offset)

    @staticmethod
    def comment(comment_id: str) -> "PageState":
        return PageState(PageKind.COMMENT, comment_id=comment_id)


@dataclass
class Session:
    actor_id: str
    start_time: float
    clock: float
    page: PageState
    max_actions: int = DEFAULT_MAX_ACTIONS
    actions_taken: int = 0
    # ids of the comments shown by the most recent render, used to map
    # index-carrying actions back onto the hub
    window: list[str] = field(default_factory=list)
    main_offset: int = 0


class ActionKind(Enum):
    VIEW_DETAILS = "view_details"
    LIKE = "like"
    COMMENT = "comment"
    REPOST = "repost"
    VIEW_MORE = "view_more"
    VIEW_COMMENT = "view_comment"
    REPLY = "reply"
    BACK = "back"
    LEAVE = "leave"


@dataclass(frozen=True)
class AgentAction:
    kind: ActionKind
    text: str | None = None
    index: int | None = None

    def __post_init__(self):
        needs_text = self.kind in (ActionKind.COMMENT, ActionKind.REPLY)
        if needs_text != (self.text is not None):
            raise ValueError(f"text must be present iff kind is comment/reply, got {self.kind}")


@dataclass(frozen=True)
class ActionDurations:
    """Minutes each action takes; commenting dominates at two minutes."""

    view_details: float = 0.5
    like: float = 0.2
    comment: float = 2.0
    reply: float = 2.0
    repost: float = 0.5
    view_more: float = 0.5
    view_comment: float = 0.3
    back: float = 0.2
    leave: float = 0.0

    def of(self, kind: ActionKind) -> float:
        return getattr(self, kind.value)


LEGAL_ACTIONS = {
    PageKind.BROWSING: (ActionKind.VIEW_DETAILS, ActionKind.LEAVE),
    PageKind.MAIN: (
        ActionKind.LIKE,
        ActionKind.COMMENT,
        ActionKind.REPOST,
        ActionKind.VIEW_MORE,
        ActionKind.VIEW_COMMENT,
        ActionKind.LEAVE,
    ),
    PageKind.COMMENT: (ActionKind.LIKE, ActionKind.REPLY, ActionKind.BACK),
}


def rank_comments(comments: list[Comment], now: float) -> list[Comment]:
    """Visible comments ordered by likes desc, then age, then id."""
    visible = [c for c in comments if c.created_at <= now and not c.flagged]
    return sorted(visible, key=lambda c: (-c.like_count, c.created_at, c.id))


def rank_replies(replies: list[Reply], now: float) -> list[Reply]:
    visible = [r for r in replies if r.created_at <= now and not r.flagged]
    return sorted(visible, key=lambda r: (-r.like_count, r.created_at, r.id))


def page_window(topic: TrendingTopic, page: PageState, now: float,
                k: int = DEFAULT_PAGE_SIZE) -> list[Comment]:
    """Comments shown on this page, in display order."""
    if page.kind == PageKind.BROWSING:
        return []
    if page.kind == PageKind.MAIN:
        ranked = rank_comments(topic.comments, now)
        return ranked[page.offset : page.offset + k]
    comment = topic.find_comment(page.comment_id or "")
    if comment is None or comment.flagged or comment.created_at > now:
        raise NavigationError(f"comment {page.comment_id!r} is not viewable")
    return [comment]


def render(topic: TrendingTopic, page: PageState, now: float,
           k: int = DEFAULT_PAGE_SIZE) -> str:
    """Deterministic text observation for one page at minute ``now``."""
    if now > topic.params.horizon:
        raise ValueError("render past the topic horizon")
    if page.kind == PageKind.BROWSING:
        return f"[Trending] {topic.title}\n{topic.summary}"

    if page.kind == PageKind.MAIN:
        window = page_window(topic, page, now, k)
        total = len(rank_comments(topic.comments, now))
        lines = [
            f"[Trending] {topic.title}",
            topic.full_content,
            f"Likes: {topic.like_count} | Reposts: {topic.repost_count}",
        ]
        if not window:
            lines.append("Comments: none on this page." if total else "Comments: none yet.")
        else:
            lines.append(
                f"Comments {page.offset + 1}-{page.offset + len(window)} of {total}:"
            )
            for i, comment in enumerate(window):
                lines.append(f"[{i}] ({comment.like_count} likes) {comment.text}")
        return "\n".join(lines)

    comment = page_window(topic, page, now, k)[0]
    shown = rank_replies(comment.replies, now)[:k]
    total = len(rank_replies(comment.replies, now))
    lines = [
        f"Comment ({comment.like_count} likes): {comment.text}",
        f"Replies shown: {len(shown)} of {total}",
    ]
    for i, reply in enumerate(shown):
        lines.append(f"[{i}] ({reply.like_count} likes) {reply.text}")
    return "\n".join(lines)


@dataclass
class ActionOutcome:
    terminal: bool
    dt: float
    mutation: dict | None = None
    applied: ActionKind = ActionKind.LEAVE
    violation: str | None = None


def apply_action(
    session: Session,
    action: AgentAction,
    topic: TrendingTopic,
    durations: ActionDurations = ActionDurations(),
    k: int = DEFAULT_PAGE_SIZE,
    censor_fn=None,
    is_poison: bool = False,
) -> ActionOutcome:
    """Apply one action: mutate the hub, advance the clock, transition.

    ``censor_fn``, when given, is called on every freshly created
    comment or reply before it can become visible.  Returns whether the
    session is over, the time the action took, and a description of the
    state mutation for the event log.
    """
    page = session.page
    violation: str | None = None
    if action.kind not in LEGAL_ACTIONS[page.kind]:
        fallback = ActionKind.BACK if page.kind == PageKind.COMMENT else ActionKind.LEAVE
        violation = (
            f"illegal action {action.kind.value} on {page.kind.value} page; "
            f"substituted {fallback.value}"
        )
        logger.warning("%s: %s", session.actor_id, violation)
        action = AgentAction(kind=fallback)

    dt = durations.of(action.kind)
    mutation: dict | None = None
    kind = action.kind

    if kind == ActionKind.VIEW_DETAILS:
        session.main_offset = 0
        session.page = PageState.main(0)

    elif kind == ActionKind.LIKE:
        if page.kind == PageKind.MAIN:
            topic.like_count += 1
            mutation = {"op": "like_topic", "like_count": topic.like_count}
        else:
            comment = topic.find_comment(page.comment_id or "")
            if comment is None:
                raise NavigationError(f"comment {page.comment_id!r} disappeared")
            comment.like_count += 1
            mutation = {"op": "like_comment", "comment_id": comment.id,
                        "like_count": comment.like_count}
            # comment-page actions return to the main page
            session.page = PageState.main(session.main_offset)

    elif kind == ActionKind.COMMENT:
        created_at = session.clock + dt
        comment = topic.add_comment(session.actor_id, action.text or "", created_at,
                                    is_poison=is_poison)
        verdict = censor_fn(comment) if censor_fn is not None else None
        mutation = {
            "op": "comment",
            "comment_id": comment.id,
            "author_id": comment.author_id,
            "text": comment.text,
            "created_at": comment.created_at,
            "is_poison": comment.is_poison,
            "flagged": comment.flagged,
        }
        if verdict is not None:
            mutation["malice"] = verdict.malice

    elif kind == ActionKind.REPOST:
        topic.repost_count += 1
        mutation = {"op": "repost", "repost_count": topic.repost_count}

    elif kind == ActionKind.VIEW_MORE:
        session.main_offset = page.offset + k
        session.page = PageState.main(session.main_offset)

    elif kind == ActionKind.VIEW_COMMENT:
        idx = action.index if action.index is not None else 0
        if not 0 <= idx < len(session.window):
            raise ProtocolError(f"view index {idx} outside rendered window")
        session.page = PageState.comment(session.window[idx])

    elif kind == ActionKind.REPLY:
        comment = topic.find_comment(page.comment_id or "")
        if comment is None:
            raise NavigationError(f"comment {page.comment_id!r} disappeared")
        created_at = session.clock + dt
        reply = topic.add_reply(comment, session.actor_id, action.text or "", created_at,
                                is_poison=is_poison)
        verdict = censor_fn(reply) if censor_fn is not None else None
        mutation = {
            "op": "reply",
            "reply_id": reply.id,
            "comment_id": comment.id,
            "author_id": reply.author_id,
            "text": reply.text,
            "created_at": reply.created_at,
            "is_poison": reply.is_poison,
            "flagged": reply.flagged,
        }
        if verdict is not None:
            mutation["malice"] = verdict.malice
        session.page = PageState.main(session.main_offset)

    elif kind == ActionKind.BACK:
        session.page = PageState.main(session.main_offset)

    session.clock += dt
    session.actions_taken += 1
    terminal = kind == ActionKind.LEAVE or session.actions_taken >= session.max_actions
    return ActionOutcome(terminal=terminal, dt=dt, mutation=mutation,
                         applied=kind, violation=violation)
