"""Rule-based tokenization, token-budget truncation, and pair input assembly.

Tokenization is deliberately simple and vocabulary-free: alphanumeric runs
become word tokens, every other non-whitespace character is a token of its
own, and whitespace is discarded. The truncation strategies only care about
token counts, so they work unchanged with any tokenizer that honours the
budget semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import UsageError

CLS = "[CLS]"
SEP = "[SEP]"

# Alphanumeric runs first (unicode letters/digits, underscore excluded),
# otherwise one non-whitespace character per token.
_TOKEN_RE = re.compile(r"[^\W_]+|\S")

TokenSeq = tuple[str, ...]


class TruncationStrategy(str, Enum):
    TRANSITION = "transition"
    LONGEST_FIRST = "longest_first"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TruncationConfig:
    """Token budget shared by both sides of a pair, and how to spend it."""

    budget: int = 512
    strategy: TruncationStrategy = TruncationStrategy.TRANSITION

    def __post_init__(self) -> None:
        if self.budget < 2:
            raise UsageError(f"truncation budget must be >= 2, got {self.budget}")


@dataclass(frozen=True)
class PairInput:
    """Marker-framed token sequence for one paragraph pair.

    Layout is [CLS] left [SEP] right [SEP]; spans are half-open index
    ranges into `tokens` covering each side, never the markers.
    """

    tokens: TokenSeq
    left_span: tuple[int, int]
    right_span: tuple[int, int]


def tokenize(text: str) -> TokenSeq:
    """Deterministic segmentation of text into tokens, case preserved."""
    return tuple(_TOKEN_RE.findall(text))


def truncate_transition(left: TokenSeq, right: TokenSeq, cfg: TruncationConfig) -> tuple[TokenSeq, TokenSeq]:
    """Keep the end of `left` and the start of `right` around the seam.

    Each side is capped at half the budget (odd budgets give the spare
    token to the right side); budget unused by one side is never
    transferred to the other, so the kept window always straddles the
    transition the same way.
    """
    if cfg.strategy is not TruncationStrategy.TRANSITION:
        raise UsageError(f"config strategy is {cfg.strategy}, not transition")
    keep_left = cfg.budget // 2
    keep_right = cfg.budget - keep_left
    if len(left) > keep_left:
        left = left[-keep_left:]
    if len(right) > keep_right:
        right = right[:keep_right]
    return left, right


def truncate_longest_first(left: TokenSeq, right: TokenSeq, cfg: TruncationConfig) -> tuple[TokenSeq, TokenSeq]:
    """Trim tokens from the end of the currently longer side until within budget.

    Equivalent to removing one token at a time from whichever side is longer
    (ties trim the right side, favouring the earlier paragraph). Both sides
    keep a prefix of themselves; the shorter side is untouched while the
    longer one still exceeds it.
    """
    if cfg.strategy is not TruncationStrategy.LONGEST_FIRST:
        raise UsageError(f"config strategy is {cfg.strategy}, not longest_first")
    if len(left) + len(right) <= cfg.budget:
        return left, right
    half = cfg.budget // 2
    keep_left = min(len(left), max(cfg.budget - half, cfg.budget - len(right)))
    keep_right = min(len(right), max(half, cfg.budget - len(left)))
    return left[:keep_left], right[:keep_right]


def truncate(left: TokenSeq, right: TokenSeq, cfg: TruncationConfig) -> tuple[TokenSeq, TokenSeq]:
    """Dispatch to the configured truncation strategy."""
    if cfg.strategy is TruncationStrategy.TRANSITION:
        return truncate_transition(left, right, cfg)
    return truncate_longest_first(left, right, cfg)


def assemble_pair_input(left: TokenSeq, right: TokenSeq, budget: int = 512) -> PairInput:
    """Frame a (left, right) token pair as [CLS] left [SEP] right [SEP].

    The combined side length must already respect `budget`; run truncation
    first. Side tokens may not collide with the marker strings.
    """
    if len(left) + len(right) > budget:
        raise UsageError(
            f"combined length {len(left) + len(right)} exceeds budget {budget}; truncate first"
        )
    for token in (*left, *right):
        if token in (CLS, SEP) or not token:
            raise UsageError(f"invalid side token {token!r}")
    tokens = (CLS, *left, SEP, *right, SEP)
    left_span = (1, 1 + len(left))
    right_span = (2 + len(left), 2 + len(left) + len(right))
    return PairInput(tokens=tokens, left_span=left_span, right_span=right_span)
