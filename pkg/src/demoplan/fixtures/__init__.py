"""Desk-scale fixture pack: scenarios, golden key sequences, masks, corpus.

Seven scenario files mirror the experimental task set (five simple tasks
plus two composite ones) with their workspace object lists; the golden key
sequences are the per-task demonstration decompositions; the corpus is a
small curated stand-in for a full knowledge base. Regenerate the geometry
files with scripts/make_fixtures.py.
"""

from importlib import resources
from pathlib import Path

TASKS = (
    "pick_place",
    "push_away",
    "open_bottle",
    "pour",
    "deliver",
    "composite_1",
    "composite_2",
)


def fixture_path(name: str) -> Path:
    """Absolute path of a packaged fixture file."""
    path = Path(str(resources.files(__package__).joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return path


def scenario_path(task: str) -> Path:
    return fixture_path(f"scenario_{task}.json")


def keys_path(task: str) -> Path:
    return fixture_path(f"keys_{task}.json")


def masks_path(task: str) -> Path:
    return fixture_path(f"masks_{task}.json")


def labels_path(task: str) -> Path:
    return fixture_path(f"labels_{task}.jsonl")


def corpus_path() -> Path:
    return fixture_path("corpus.txt")


def lexicon_path() -> Path:
    return fixture_path("lexicon.json")


def calibration_path() -> Path:
    return fixture_path("calibration.json")
