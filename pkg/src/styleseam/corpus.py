"""Dataset ingestion: documents, truth records, and labeled paragraph pairs.

Expected on-disk layout (shared-task convention)::

    <root>/<difficulty>/{train,validation,test}/
        problem-<N>.txt         UTF-8 text, one paragraph per line
        truth-problem-<N>.json  {"authors": int, "changes": [0/1, ...]}

Documents are split into paragraphs on single newlines; a trailing
carriage return is trimmed from each segment and empty segments are
dropped, so CRLF files load identically to LF files.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, UsageError

logger = logging.getLogger(__name__)

_PROBLEM_RE = re.compile(r"^problem-(\d+)\.txt$")
_TRUTH_RE = re.compile(r"^truth-problem-(\d+)\.json$")

SPLITS = ("train", "validation", "test")


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"

    def __str__(self) -> str:  # usable directly in paths and messages
        return self.value


@dataclass(frozen=True)
class Document:
    """One problem file: ordered nonempty paragraphs plus provenance."""

    id: int
    difficulty: Difficulty
    paragraphs: tuple[str, ...]


@dataclass(frozen=True)
class TruthRecord:
    """Gold annotation for one document.

    Only the length invariant (len(changes) == paragraphs - 1) is ever
    enforced against documents; author/changes consistency is taken on
    faith since gold files are authoritative.
    """

    doc_id: int
    authors: int
    changes: tuple[int, ...]


@dataclass(frozen=True)
class ParagraphPair:
    """One consecutive-paragraph instance; label is None for test data."""

    doc_id: int
    pair_index: int
    left: str
    right: str
    label: int | None = None


@dataclass(frozen=True)
class SplitStats:
    document_count: int
    pair_count: int
    zeros_count: int
    ones_count: int


def split_paragraphs(text: str) -> tuple[str, ...]:
    """Split file content into paragraphs: one per line, CRLF-safe."""
    segments = (seg[:-1] if seg.endswith("\r") else seg for seg in text.split("\n"))
    return tuple(seg for seg in segments if seg)


def split_directory(
    root: str | Path,
    difficulty: Difficulty,
    split: str,
    difficulty_names: Mapping[Difficulty, str] | None = None,
) -> Path:
    """Resolve the directory of one (difficulty, split) under a dataset root.

    `difficulty_names` overrides the on-disk directory name per difficulty
    for datasets that do not use the plain lowercase names.
    """
    if split not in SPLITS:
        raise UsageError(f"unknown split {split!r}; expected one of {SPLITS}")
    name = (difficulty_names or {}).get(difficulty, difficulty.value)
    return Path(root) / name / split


def _scan_directory(directory: Path) -> tuple[dict[int, Path], dict[int, Path]]:
    """Map doc ids to problem and truth files; warn about stray files."""
    if not directory.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {directory}")
    problems: dict[int, Path] = {}
    truths: dict[int, Path] = {}
    for entry in sorted(directory.iterdir()):
        if not entry.is_file():
            continue
        m = _PROBLEM_RE.match(entry.name)
        if m:
            problems[int(m.group(1))] = entry
            continue
        m = _TRUTH_RE.match(entry.name)
        if m:
            truths[int(m.group(1))] = entry
            continue
        logger.warning("ignoring stray file %s", entry)
    return problems, truths


def load_documents(directory: str | Path, difficulty: Difficulty) -> list[Document]:
    """Load all problem-<N>.txt files in `directory`, ordered by ascending N.

    Raises FormatError for undecodable or paragraph-free files; OSError
    propagates for unreadable files.
    """
    problems, _ = _scan_directory(Path(directory))
    documents = []
    for doc_id in sorted(problems):
        path = problems[doc_id]
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{path} is not valid UTF-8: {exc}") from exc
        paragraphs = split_paragraphs(text)
        if not paragraphs:
            raise FormatError(f"{path} contains no nonempty paragraphs")
        documents.append(Document(id=doc_id, difficulty=difficulty, paragraphs=paragraphs))
    return documents


def _parse_truth(path: Path, doc_id: int) -> TruthRecord:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"truth file for document {doc_id} is unparseable: {exc}") from exc
    if not isinstance(raw, dict) or "changes" not in raw:
        raise FormatError(f"truth file for document {doc_id} is missing the \"changes\" key")
    changes = raw["changes"]
    if not isinstance(changes, list) or any(
        isinstance(c, bool) or not isinstance(c, int) or c not in (0, 1) for c in changes
    ):
        raise FormatError(f"truth file for document {doc_id} has non-binary \"changes\" entries")
    authors = raw.get("authors", 1)
    if isinstance(authors, bool) or not isinstance(authors, int) or authors < 1:
        raise FormatError(f"truth file for document {doc_id} has invalid \"authors\": {authors!r}")
    return TruthRecord(doc_id=doc_id, authors=authors, changes=tuple(changes))


def load_truth(directory: str | Path) -> list[TruthRecord]:
    """Load all truth-problem-<N>.json files, ordered by ascending N.

    When the sibling problem-<N>.txt exists, the changes length is checked
    against its paragraph count.
    """
    problems, truth_files = _scan_directory(Path(directory))
    records = []
    for doc_id in sorted(truth_files):
        record = _parse_truth(truth_files[doc_id], doc_id)
        sibling = problems.get(doc_id)
        if sibling is not None:
            n_paragraphs = len(split_paragraphs(sibling.read_text(encoding="utf-8")))
            if len(record.changes) != n_paragraphs - 1:
                raise FormatError(
                    f"document {doc_id}: {len(record.changes)} changes for "
                    f"{n_paragraphs} paragraphs (expected {n_paragraphs - 1})"
                )
        records.append(record)
    return records


def build_pairs(
    docs: Sequence[Document],
    truths: Sequence[TruthRecord] | None = None,
) -> list[ParagraphPair]:
    """Emit the (paragraphs - 1) consecutive pairs of every document, in order.

    With `truths` given, each pair carries the gold label for its transition;
    without, labels are None (explicit unlabeled mode, nothing defaults to 0).
    Truth records for unknown documents are ignored; a document without a
    truth record, or a length mismatch, is a FormatError.
    """
    by_id: dict[int, TruthRecord] = {}
    if truths is not None:
        for t in truths:
            by_id[t.doc_id] = t
    pairs = []
    for doc in docs:
        changes: Sequence[int | None]
        if truths is None:
            changes = [None] * (len(doc.paragraphs) - 1)
        else:
            truth = by_id.get(doc.id)
            if truth is None:
                raise FormatError(f"document {doc.id} has no matching truth record")
            if len(truth.changes) != len(doc.paragraphs) - 1:
                raise FormatError(
                    f"document {doc.id}: {len(truth.changes)} changes for "
                    f"{len(doc.paragraphs)} paragraphs"
                )
            changes = truth.changes
        for i in range(len(doc.paragraphs) - 1):
            pairs.append(
                ParagraphPair(
                    doc_id=doc.id,
                    pair_index=i,
                    left=doc.paragraphs[i],
                    right=doc.paragraphs[i + 1],
                    label=changes[i],
                )
            )
    return pairs


def compute_stats(
    pairs: Iterable[ParagraphPair],
    document_count: int | None = None,
) -> SplitStats:
    """Count pairs and labels; all pairs must be labeled.

    `document_count` overrides the count derived from distinct doc ids,
    which misses documents that produced zero pairs.
    """
    zeros = ones = 0
    doc_ids = set()
    for pair in pairs:
        if pair.label is None:
            raise UsageError(f"unlabeled pair (doc {pair.doc_id}, index {pair.pair_index})")
        doc_ids.add(pair.doc_id)
        if pair.label == 1:
            ones += 1
        else:
            zeros += 1
    return SplitStats(
        document_count=len(doc_ids) if document_count is None else document_count,
        pair_count=zeros + ones,
        zeros_count=zeros,
        ones_count=ones,
    )
