"""Content moderation: score a fresh comment's malice and maybe flag it.

The filter runs once per posted comment or reply, before the text can
enter anyone's observation.  Judging errors fail open (the comment
passes) so a flaky scorer can never deadlock a running simulation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .prompts import PromptSet
from .provider import (
    CompletionRequest,
    ParseError,
    Provider,
    ProviderError,
    parse_score_100,
)

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class CensorVerdict:
    comment_id: str
    malice: float
    flagged: bool
    judged_at: float


def censor(comment, topic, threshold: float, provider: Provider, prompts: PromptSet,
           seed: int = 0, judged_at: float = 0.0, on_violation=None) -> CensorVerdict:
    """Score one just-created comment and flag it iff malice >= threshold."""
    text = prompts.render(
        "judge_malice",
        topic=f"{topic.title}\n{topic.full_content}",
        comment=comment.text,
    )
    malice = 0.0
    for attempt in range(2):
        request = CompletionRequest(
            system_text=prompts.system_text("judge"),
            user_text=text,
            temperature=0.0,
            seed=seed + attempt,
            tag="censor",
        )
        try:
            malice = parse_score_100(provider.complete(request))
            break
        except (ParseError, ProviderError) as exc:
            if attempt == 1:
                logger.warning("censor failed open on %s: %s", comment.id, exc)
                if on_violation:
                    on_violation("censor", f"failed open on {comment.id}: {exc}")
                malice = 0.0
    verdict = CensorVerdict(
        comment_id=comment.id,
        malice=malice,
        flagged=malice >= threshold,
        judged_at=judged_at,
    )
    comment.flagged = verdict.flagged
    return verdict
