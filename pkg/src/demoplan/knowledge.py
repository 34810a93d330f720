"""Verb-object co-occurrence knowledge from a plain-text sentence corpus.

Sentences like "pick the apple" or "push the pear to the white plate"
describe how people act on household objects. Counting which objects appear
in sentences about each action gives a conditional model P(object | action)
that lets a planner decide, for example, that the banana goes into the plate
and not the other way around.

Counting is by sentence presence: one sentence contributes at most one count
per (action, object) pair no matter how often the object is repeated.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .actions import ActionPrimitive

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")

SINGLE_OBJECT_ACTIONS = (ActionPrimitive.PICK, ActionPrimitive.PLACE, ActionPrimitive.ROTATE)
PAIR_ACTIONS = (ActionPrimitive.PUSH, ActionPrimitive.TILT)


class EmptyModelError(ValueError):
    """Raised when a corpus yields no parseable (action, object) pairs."""


class SelectionError(RuntimeError):
    """Raised when a selection query cannot produce the required objects."""


@dataclass(frozen=True)
class Lexicon:
    """Surface-verb mapping plus the object vocabulary the parser can match.

    Object names may span several tokens ("white plate") or carry internal
    hyphens ("black-bottle"); matching is greedy, longest phrase first.
    """

    verbs: Mapping[str, ActionPrimitive]
    objects: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "verbs", dict(self.verbs))
        object.__setattr__(self, "objects", frozenset(self.objects))
        for verb, prim in self.verbs.items():
            if not isinstance(prim, ActionPrimitive):
                raise ValueError(f"verb {verb!r} maps to non-primitive {prim!r}")

    @property
    def max_phrase_len(self) -> int:
        return max((len(o.split()) for o in self.objects), default=1)


@dataclass
class CooccurrenceModel:
    """Sentence-presence counts N(action, object) with per-action totals."""

    counts: dict[ActionPrimitive, dict[str, int]] = field(default_factory=dict)
    sentence_count: int = 0
    skipped_sentences: int = 0

    def action_total(self, action: ActionPrimitive) -> int:
        return sum(self.counts.get(action, {}).values())

    def count(self, action: ActionPrimitive, obj: str) -> int:
        return self.counts.get(action, {}).get(obj, 0)

    def objects(self) -> frozenset[str]:
        seen: set[str] = set()
        for table in self.counts.values():
            seen.update(table)
        return frozenset(seen)

    @classmethod
    def from_counts(cls, counts: Mapping[ActionPrimitive, Mapping[str, int]]) -> "CooccurrenceModel":
        table = {a: dict(objs) for a, objs in counts.items()}
        for a, objs in table.items():
            for o, n in objs.items():
                if n < 0:
                    raise ValueError(f"negative count for ({a.value}, {o})")
        return cls(counts=table, sentence_count=0, skipped_sentences=0)


def parse_sentence(line: str, lex: Lexicon) -> list[tuple[ActionPrimitive, str]]:
    """Extract (action, object) pairs from one sentence.

    The line is lowercased and tokenized; recognized verbs set the current
    action, and every vocabulary object mentioned after a verb (up to the
    next verb) pairs with it. Lines with no recognized verb or object yield
    an empty list.
    """
    tokens = _TOKEN_RE.findall(line.lower())
    pairs: list[tuple[ActionPrimitive, str]] = []
    current: ActionPrimitive | None = None
    i = 0
    n = len(tokens)
    max_len = lex.max_phrase_len
    while i < n:
        token = tokens[i]
        if token in lex.verbs:
            current = lex.verbs[token]
            i += 1
            continue
        matched = None
        if current is not None:
            for length in range(min(max_len, n - i), 0, -1):
                phrase = " ".join(tokens[i : i + length])
                if phrase in lex.objects:
                    matched = phrase
                    break
        if matched is not None:
            pairs.append((current, matched))
            i += len(matched.split())
        else:
            i += 1
    return pairs


def build_model(corpus: Sequence[str], lex: Lexicon) -> CooccurrenceModel:
    """Accumulate sentence-presence counts over a corpus.

    Each (action, object) pair found in a sentence increments its count at
    most once for that sentence. Unparseable sentences are skipped and
    tallied; a corpus with zero parseable sentences raises EmptyModelError.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    model = CooccurrenceModel()
    for line in corpus:
        pairs = set(parse_sentence(line, lex))
        model.sentence_count += 1
        if not pairs:
            model.skipped_sentences += 1
            continue
        for action, obj in pairs:
            table = model.counts.setdefault(action, {})
            table[obj] = table.get(obj, 0) + 1
    if model.skipped_sentences == model.sentence_count:
        raise EmptyModelError("no sentence in the corpus produced an (action, object) pair")
    return model


def conditional_probability(model: CooccurrenceModel, obj: str, action: ActionPrimitive) -> float:
    """P(obj | action) = N(action, obj) / N(action); 0 when the action is unseen."""
    total = model.action_total(action)
    if total == 0:
        return 0.0
    return model.count(action, obj) / total


def rank_objects(model: CooccurrenceModel, action: ActionPrimitive) -> list[str]:
    """Objects with positive count for the action, most frequent first.

    Ties are ordered lexicographically so the ranking is deterministic.
    """
    table = model.counts.get(action, {})
    positive = [(o, n) for o, n in table.items() if n > 0]
    positive.sort(key=lambda item: (-item[1], item[0]))
    return [o for o, _ in positive]


@dataclass(frozen=True)
class SingleChoice:
    name: str
    low_confidence: bool = False


@dataclass(frozen=True)
class PairChoice:
    primary: str
    target: str
    low_confidence: bool = False


def select_single_object(
    model: CooccurrenceModel,
    action: ActionPrimitive,
    detected: Iterable[str],
) -> SingleChoice:
    """Argmax of P(obj | action) over the detected set for one-object actions.

    Ties break toward the higher raw count and then the lexicographically
    smaller name. When every detected object has zero probability the
    lexicographically smallest is returned flagged low confidence, so a
    plan can proceed rather than deadlock.
    """
    if action not in SINGLE_OBJECT_ACTIONS:
        raise ValueError(f"{action.value} is not a one-object action")
    candidates = sorted(set(detected))
    if not candidates:
        raise ValueError("detected set must be non-empty")
    best = max(
        candidates,
        key=lambda o: (conditional_probability(model, o, action), model.count(action, o)),
    )
    if model.count(action, best) == 0:
        return SingleChoice(name=candidates[0], low_confidence=True)
    return SingleChoice(name=best, low_confidence=False)


def select_object_pair(
    model: CooccurrenceModel,
    action: ActionPrimitive,
    detected: Iterable[str],
) -> PairChoice:
    """Pick (manipulated, target) objects for two-object actions.

    Corpus objects are ranked by N(action, obj) descending (ties
    lexicographic); the first ranked object present in the detected set
    becomes the manipulated one and the next distinct ranked object present
    becomes the target. Slots the ranking cannot fill fall back to
    lexicographic order over the remaining detected objects and mark the
    choice low confidence.
    """
    if action not in PAIR_ACTIONS:
        raise ValueError(f"{action.value} is not a two-object action")
    pool = sorted(set(detected))
    if len(pool) < 2:
        raise SelectionError(f"{action.value} needs two detected objects, got {len(pool)}")
    ranked_hits = [o for o in rank_objects(model, action) if o in set(pool)]
    chosen: list[str] = []
    for name in ranked_hits:
        if name not in chosen:
            chosen.append(name)
        if len(chosen) == 2:
            break
    low_confidence = len(chosen) < 2
    for name in pool:
        if len(chosen) == 2:
            break
        if name not in chosen:
            chosen.append(name)
    return PairChoice(primary=chosen[0], target=chosen[1], low_confidence=low_confidence)


def load_corpus(path: str | Path) -> list[str]:
    """Read a sentence-per-line corpus; blank lines and '#' comments ignored."""
    sentences: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            sentences.append(line)
    return sentences


def load_lexicon(path: str | Path) -> Lexicon:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    verbs = {str(v).lower(): ActionPrimitive.parse(p) for v, p in doc["verbs"].items()}
    objects = frozenset(str(o).lower() for o in doc["objects"])
    return Lexicon(verbs=verbs, objects=objects)


def stats_tsv(model: CooccurrenceModel) -> str:
    """Render the count table as TSV rows: action, object, count."""
    lines = ["action\tobject\tcount"]
    for action in sorted(model.counts, key=lambda a: a.value):
        table = model.counts[action]
        for obj in sorted(table):
            lines.append(f"{action.value}\t{obj}\t{table[obj]}")
    return "\n".join(lines) + "\n"
