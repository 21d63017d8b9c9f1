"""Synthetic multi-author corpus generation for end-to-end tests.

Each synthetic "author" owns a disjoint word pool and a distinct punctuation
habit. Within a document the author index only ever advances, so a linear
scorer over concatenated per-side features can represent the change labels
(an author who could both precede and follow every other author would make
the pair task a XOR over side identities, which no linear model separates).
"""

from __future__ import annotations

import json
import random
from pathlib import Path

AUTHOR_POOLS = [
    # archivist: plain declarative sentences, periods only
    [
        "ledger", "archive", "record", "entry", "quarter", "folio", "catalog",
        "margin", "binding", "manuscript", "survey", "district", "protocol",
        "review", "appendix", "committee", "finding", "report", "analysis",
        "pattern", "section", "source", "volume", "registry",
    ],
    # skeptic: questions and contractions
    [
        "honestly", "nonsense", "whatever", "nobody", "bother", "trust",
        "doubt", "rumor", "gossip", "excuse", "blame", "lazy", "wrong",
        "fake", "silly", "bored", "tired", "waste", "joke", "mess", "noise",
        "fuss", "grudge", "spite",
    ],
    # engineer: parenthetical asides
    [
        "sensor", "turbine", "calibration", "interval", "fracture", "blade",
        "housing", "gasket", "bolt", "torque", "spindle", "bearing",
        "manifold", "valve", "rotor", "flange", "coupling", "tolerance",
        "micrometer", "alignment", "lubricant", "inspection", "cycle", "gauge",
    ],
    # lyricist: exclamatory, no other quirks
    [
        "meadow", "lantern", "dusk", "ember", "sparrow", "orchard", "river",
        "harvest", "frost", "petal", "twilight", "murmur", "moss", "brook",
        "heather", "willow", "amber", "glow", "hollow", "fern", "thicket",
        "bloom", "shade", "cinder",
    ],
]


def _sentence(rng: random.Random, author: int) -> str:
    pool = AUTHOR_POOLS[author]
    words = [rng.choice(pool) for _ in range(rng.randint(5, 9))]
    if author == 2 and rng.random() < 0.6:
        mid = rng.randrange(1, len(words))
        words[mid] = f"({words[mid]})"
    text = " ".join(words).capitalize()
    if author == 1:
        if rng.random() < 0.5:
            text += ", isn't it?"
        else:
            text += ", don't you think."
    elif author == 3 and rng.random() < 0.5:
        text += "!"
    else:
        text += "."
    return text


def _paragraph(rng: random.Random, author: int) -> str:
    return " ".join(_sentence(rng, author) for _ in range(rng.randint(2, 4)))


def _document(rng: random.Random) -> tuple[list[str], list[int], int]:
    n_paragraphs = rng.randint(2, 6)
    author = rng.randint(0, 1)
    sequence = [author]
    for _ in range(n_paragraphs - 1):
        if author < len(AUTHOR_POOLS) - 1 and rng.random() < 0.5:
            author = min(author + rng.randint(1, 2), len(AUTHOR_POOLS) - 1)
        sequence.append(author)
    paragraphs = [_paragraph(rng, a) for a in sequence]
    changes = [int(b != a) for a, b in zip(sequence, sequence[1:])]
    return paragraphs, changes, len(set(sequence))


def write_split(directory: Path, n_docs: int, rng: random.Random) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for doc_id in range(1, n_docs + 1):
        paragraphs, changes, n_authors = _document(rng)
        (directory / f"problem-{doc_id}.txt").write_text(
            "\n".join(paragraphs) + "\n", encoding="utf-8"
        )
        (directory / f"truth-problem-{doc_id}.json").write_text(
            json.dumps({"authors": n_authors, "changes": changes}), encoding="utf-8"
        )


def generate_corpus(
    root: Path,
    difficulty: str = "easy",
    n_train: int = 100,
    n_validation: int = 50,
    seed: int = 77,
) -> Path:
    """Write a train/validation corpus under `root/<difficulty>/`; returns root."""
    pools = [set(pool) for pool in AUTHOR_POOLS]
    assert len(set().union(*pools)) == sum(len(p) for p in pools), "author pools must be disjoint"
    rng = random.Random(seed)
    write_split(root / difficulty / "train", n_train, rng)
    write_split(root / difficulty / "validation", n_validation, rng)
    return root
