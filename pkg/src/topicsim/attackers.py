"""Prototype-driven attacker agents and roster construction.

Attackers replace a configured fraction of the participants.  Each one
carries a fixed intent prototype (antisocial, trolling, or rumor) and,
per visit, turns the current main page into a single poisoning comment;
they keep no psychological state and never like, reply, or reflect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .agents import UserAgent, truncate_words
from .prompts import PromptSet
from .provider import CompletionRequest, Provider, TAG_TEMPERATURES, DEFAULT_TEMPERATURE

ATTACKER_KINDS = ("antisocial", "trolling", "rumor")

ATTACK_DEGREES = {"SE": 0.0, "PA-10": 0.1, "PA-30": 0.3, "PA-50": 0.5}

POISON_WORD_LIMIT = 60


@dataclass(frozen=True)
class AttackerPrototype:
    kind: str
    prototype_text: str

    def __post_init__(self):
        if self.kind not in ATTACKER_KINDS:
            raise ValueError(f"unknown attacker kind {self.kind!r}")
        if not self.prototype_text:
            raise ValueError("prototype_text must be non-empty")


@dataclass
class AttackerAgent:
    id: str
    prototype: AttackerPrototype


def load_prototypes(directory=None) -> dict[str, AttackerPrototype]:
    """Read the per-kind prototype text files (bundled ones by default)."""
    out = {}
    for kind in ATTACKER_KINDS:
        if directory is None:
            text = (
                resources.files("topicsim.data")
                .joinpath(f"prototypes/{kind}.txt")
                .read_text(encoding="utf-8")
            )
        else:
            with open(f"{directory}/{kind}.txt", encoding="utf-8") as fh:
                text = fh.read()
        out[kind] = AttackerPrototype(kind=kind, prototype_text=text.strip())
    return out


def generate_poison(prototype: AttackerPrototype, observation: str,
                    provider: Provider, prompts: PromptSet, seed: int = 0) -> str:
    """One poisoning comment for the observed main page, capped at 60 words."""
    if not observation:
        raise ValueError("observation must be non-empty")
    text = prompts.render("attack", observation=observation,
                          prototype=prototype.prototype_text)
    request = CompletionRequest(
        system_text=prompts.system_text("agent"),
        user_text=text,
        temperature=TAG_TEMPERATURES.get("attack", DEFAULT_TEMPERATURE),
        seed=seed,
        tag="attack",
    )
    return truncate_words(provider.complete(request).strip(), POISON_WORD_LIMIT)


def normalize_degree(degree: str) -> str:
    """Accept SE / PA10 / PA-10 / pa-10 spellings."""
    label = degree.strip().upper()
    if label.startswith("PA") and not label.startswith("PA-"):
        label = "PA-" + label[2:]
    if label in ATTACK_DEGREES:
        return label
    raise ValueError(f"unknown attack degree {degree!r}")


def attacker_count(n_total: int, degree: str) -> int:
    """Half-up rounding of the degree fraction."""
    fraction = ATTACK_DEGREES[normalize_degree(degree)]
    return int(math.floor(fraction * n_total + 0.5))


def split_by_largest_remainder(n: int, mix: dict[str, float]) -> dict[str, int]:
    """Integer kind counts summing to n; ties go to earlier kinds."""
    if any(kind not in ATTACKER_KINDS for kind in mix):
        raise ValueError(f"kinds_mix keys must be among {ATTACKER_KINDS}")
    weights = [mix.get(kind, 0.0) for kind in ATTACKER_KINDS]
    total = sum(weights)
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValueError(f"kinds_mix must sum to 1, got {total}")
    quotas = [w * n for w in weights]
    counts = [int(math.floor(q)) for q in quotas]
    remainders = [q - c for q, c in zip(quotas, counts)]
    short = n - sum(counts)
    order = sorted(range(len(ATTACKER_KINDS)), key=lambda i: (-remainders[i], i))
    for i in order[:short]:
        counts[i] += 1
    return dict(zip(ATTACKER_KINDS, counts))


def build_roster(
    users: list[UserAgent],
    degree: str,
    kinds_mix: dict[str, float],
    rng: np.random.Generator,
    prototypes: dict[str, AttackerPrototype],
) -> list[UserAgent | AttackerAgent]:
    """Replace a seed-chosen fraction of the users with attackers.

    The returned roster keeps the original positions; replaced slots get
    attacker agents whose kinds follow the largest-remainder split of
    kinds_mix, shuffled across the chosen slots.
    """
    n_total = len(users)
    if n_total == 0:
        raise ValueError("roster requires at least one participant")
    n_attackers = attacker_count(n_total, degree)
    roster: list[UserAgent | AttackerAgent] = list(users)
    if n_attackers == 0:
        return roster
    positions = rng.choice(n_total, size=n_attackers, replace=False)
    counts = split_by_largest_remainder(n_attackers, kinds_mix)
    kinds = [kind for kind in ATTACKER_KINDS for _ in range(counts[kind])]
    rng.shuffle(kinds)
    for position, kind in zip(sorted(int(p) for p in positions), kinds):
        roster[position] = AttackerAgent(
            id=f"a{position:04d}", prototype=prototypes[kind]
        )
    return roster
