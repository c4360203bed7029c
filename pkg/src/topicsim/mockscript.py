"""Built-in scripts for the deterministic mock backend.

The default script gives offline runs plausible dynamics: agents browse
and sometimes engage, hostile wording drags reflected scores down, the
moderation scorer reacts to the same wording, and judges return stable
mid-range numbers.  Every reply is a pure function of the request
digest, so identical runs stay byte-identical.
"""

from __future__ import annotations

import re

from .provider import CompletionRequest, MockRule, stable_u64

# Wording that reads as hostile to both the default reflection rules and
# the default moderation scorer.
TOXIC_MARKERS = (
    "corrupt",
    "rotten",
    "scam",
    "fraud",
    "rigged",
    "liar",
    "lies",
    "fake",
    "hate",
    "cover-up",
    "paid to look away",
    "hostile and misleading",  # how the default impression flags poisoned pages
    "腐败",
    "骗局",
    "谣言",
)

_OPTION_RE = re.compile(r"^\[(\d+)\]", re.MULTILINE)
_SCORE_RE = {
    "emotion": re.compile(r"(?:emotional positiveness score is|情绪积极性得分为)\s*(\d+(?:\.\d+)?)"),
    "social_confidence": re.compile(r"(?:social confidence score is|社会信心得分为)\s*(\d+(?:\.\d+)?)"),
}
_TITLE_RE = re.compile(r"\[Trending\]\s*(.+)")


def _unit(request: CompletionRequest, *salt) -> float:
    """Deterministic uniform draw in [0, 1) tied to this request."""
    return stable_u64(request.digest(), *salt) % 10**9 / 10**9


def _has_toxic(text: str) -> bool:
    lowered = text.lower()
    return any(marker in lowered for marker in TOXIC_MARKERS)


def _option_count(text: str) -> int:
    numbers = [int(m) for m in _OPTION_RE.findall(text)]
    return max(numbers) + 1 if numbers else 0


def _pick_weighted(request: CompletionRequest, weights: list[float]) -> int:
    u = _unit(request, "choice") * sum(weights)
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    return len(weights) - 1


def _prior_score(request: CompletionRequest, which: str) -> float:
    match = _SCORE_RE[which].search(request.user_text)
    return float(match.group(1)) if match else 0.5


_COMMENT_BANK = [
    "I can relate to this one; stories like this are exactly why I keep checking the feed.",
    "Good to see this getting attention, I hope the follow-up coverage stays accurate.",
    "My neighborhood had something similar happen, so I understand both sides here.",
    "I want more details before celebrating or complaining, headlines rarely tell it all.",
    "This matters for ordinary people, not just the folks quoted in the article.",
    "Sharing this with friends, we were just talking about this exact issue yesterday.",
]

_REPLY_BANK = [
    "Fair point, though I suspect the full story is more complicated than that.",
    "I had the opposite experience, so I would not generalize so quickly.",
    "Agreed, and I hope the people responsible actually follow through.",
    "Where did you read that? I saw different numbers earlier today.",
]

_OPINION_BANK = [
    "I think the attention is deserved and the discussion has been mostly reasonable.",
    "I stay cautious about this topic until more confirmed details are published.",
    "The topic matters, but some commenters are louder than the facts justify.",
    "I feel mildly positive about where this is heading for people like me.",
]


def _decide_response(request: CompletionRequest) -> str:
    text = request.user_text
    if "select a comment" in text or "选择一条" in text:
        n = _option_count(text.split("Please select")[0] if "Please select" in text else text)
        return str(stable_u64(request.digest(), "target") % max(1, n))
    if "indicate the selected action" in text or "表示所选行动" in text:
        n = _option_count(text)
        if n == 2:  # browsing page: mostly continue into the topic
            return str(_pick_weighted(request, [0.85, 0.15]))
        if n == 6:  # main page
            return str(_pick_weighted(request, [0.18, 0.30, 0.06, 0.12, 0.14, 0.20]))
        if n == 3:  # comment page
            return str(_pick_weighted(request, [0.30, 0.40, 0.30]))
        return "0"
    if "reply to this comment" in text or "回复这条评论" in text:
        return _REPLY_BANK[stable_u64(request.digest(), "reply") % len(_REPLY_BANK)]
    # comment writing (and anything else decide-tagged)
    return _COMMENT_BANK[stable_u64(request.digest(), "comment") % len(_COMMENT_BANK)]


def _perceive_response(request: CompletionRequest) -> str:
    text = request.user_text
    title_match = _TITLE_RE.search(text)
    subject = title_match.group(1).strip() if title_match else "this topic"
    if _has_toxic(text):
        return (
            f"I read about {subject}, but several comments under it feel hostile and "
            "misleading, which makes me uneasy about the whole discussion."
        )
    mood = _unit(request, "mood")
    if mood < 0.5:
        return (
            f"I read about {subject}; it feels relevant to people like me and the "
            "discussion seems mostly constructive so far."
        )
    return (
        f"I skimmed {subject} and the comments; nothing surprising yet, though I "
        "want to see how it develops before forming a firm view."
    )


def _reflect_score_response(request: CompletionRequest, which: str) -> str:
    prior = _prior_score(request, which)
    if _has_toxic(request.user_text):
        value = prior - 0.08
    else:
        value = prior + 0.02
    value += (_unit(request, "jitter", which) - 0.5) * 0.04
    value = min(1.0, max(0.0, value))
    return f"{int(round(value * 100))}%"


def _reflect_summary_response(request: CompletionRequest) -> str:
    if _has_toxic(request.user_text):
        return (
            "I followed this trending story, but the aggressive comments under it "
            "soured the experience; I acted on it and will watch where this goes."
        )
    return (
        "I followed this trending story, took a small action on it, and will keep "
        "an eye on how the discussion develops during the day."
    )


def _reflect_opinion_response(request: CompletionRequest) -> str:
    if _has_toxic(request.user_text):
        return "Parts of this discussion feel manipulated, and that makes me trust the topic less."
    return _OPINION_BANK[stable_u64(request.digest(), "opinion") % len(_OPINION_BANK)]


_ATTACK_LINES = {
    "antisocial": (
        "Commented on the trending topic: the institutions behind {subject} are rotten "
        "to the core, and trusting any official word on this is for fools."
    ),
    "trolling": (
        "Commented on the trending topic: anyone cheering for {subject} is a gullible "
        "liar, and people like you are exactly what is wrong with this place."
    ),
    "rumor": (
        "Commented on the trending topic: insiders already admitted {subject} is a "
        "cover-up and the real numbers are fake; screenshots are being deleted "
        "as we speak."
    ),
}


def _attack_response(request: CompletionRequest) -> str:
    text = request.user_text
    title_match = _TITLE_RE.search(text)
    subject = title_match.group(1).strip() if title_match else "this story"
    lowered = text.lower()
    if "provoke" in lowered or "harass" in lowered or "挑衅" in text or "骚扰" in text:
        kind = "trolling"
    elif "rumor" in lowered or "made-up" in lowered or "谣言" in text or "编造" in text:
        kind = "rumor"
    else:
        kind = "antisocial"
    return _ATTACK_LINES[kind].format(subject=subject)


def _judge_response(request: CompletionRequest) -> str:
    return str(55 + stable_u64(request.digest(), "judge") % 41)


def _censor_response(request: CompletionRequest) -> str:
    return "85" if _has_toxic(request.user_text) else "10"


def _distill_response(request: CompletionRequest) -> str:
    words = re.findall(r"[A-Za-z]{5,}", request.user_text)
    seen: list[str] = []
    for word in words:
        lowered = word.lower()
        if lowered not in seen:
            seen.append(lowered)
    picks = seen[:3] if seen else ["everyday", "life", "news"]
    return (
        "An active social media user who often posts about "
        + ", ".join(picks)
        + ", keeps a personal tone, and engages with daily news."
    )


def default_rules() -> list[MockRule]:
    return [
        MockRule(tag="perceive", respond=_perceive_response),
        MockRule(tag="decide", respond=_decide_response),
        MockRule(tag="reflect_emotion", respond=lambda r: _reflect_score_response(r, "emotion")),
        MockRule(tag="reflect_sc", respond=lambda r: _reflect_score_response(r, "social_confidence")),
        MockRule(tag="reflect_summary", respond=_reflect_summary_response),
        MockRule(tag="reflect_opinion", respond=_reflect_opinion_response),
        MockRule(tag="attack", respond=_attack_response),
        MockRule(tag="judge", respond=_judge_response),
        MockRule(tag="censor", respond=_censor_response),
        MockRule(tag="distill", respond=_distill_response),
    ]


_SCRIPTS = {
    "default": default_rules,
}


def build_script(name: str) -> list[MockRule]:
    if name not in _SCRIPTS:
        raise ValueError(f"unknown mock script {name!r}; have {sorted(_SCRIPTS)}")
    return _SCRIPTS[name]()
