"""Rule-based sentence splitting with an abbreviation guard list.

The boundary rule: a sentence ends after '.', '!' or '?' when the
terminator is followed by whitespace and the next non-whitespace
character is an uppercase letter or a digit. A '.' is suppressed when
the token immediately before it is a guarded abbreviation (shipped as a
versioned data file) or a single uppercase letter (an initial).

Spans never include leading or trailing whitespace, so a passage is
always reconstructible as whitespace + sentence + whitespace + ... and
splitting any produced sentence returns that sentence unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

TERMINATORS = ".!?"


@dataclass(frozen=True)
class SentenceSpan:
    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length


@lru_cache(maxsize=1)
def default_abbreviations() -> tuple[str, ...]:
    """Guard entries from the packaged data file, comments stripped."""
    text = resources.files("chempipe").joinpath("data/abbreviations.txt").read_text("utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    return tuple(entries)


def _guarded(text: str, dot: int, abbreviations: tuple[str, ...]) -> bool:
    """True when the token ending at text[dot] suppresses a '.' boundary."""
    prefix = text[:dot]
    if not prefix:
        return False
    for abbr in abbreviations:
        if prefix.endswith(abbr):
            before = dot - len(abbr)
            if before == 0 or not prefix[before - 1].isalnum():
                return True
    # Initials: "J. Smith" never splits.
    if prefix[-1].isupper() and (len(prefix) == 1 or not prefix[-2].isalnum()):
        return True
    return False


def _is_boundary(text: str, i: int, abbreviations: tuple[str, ...]) -> bool:
    if i + 1 >= len(text) or not text[i + 1].isspace():
        return False
    j = i + 1
    while j < len(text) and text[j].isspace():
        j += 1
    if j >= len(text):
        return False
    nxt = text[j]
    if not (nxt.isupper() or nxt.isdigit()):
        return False
    if text[i] == "." and _guarded(text, i, abbreviations):
        return False
    return True


def split_sentences(text: str, abbreviations: tuple[str, ...] | None = None) -> list[SentenceSpan]:
    """Deterministically split text into whitespace-trimmed sentence spans."""
    if abbreviations is None:
        abbreviations = default_abbreviations()
    spans: list[SentenceSpan] = []

    def emit(raw_start: int, raw_end: int) -> None:
        s, e = raw_start, raw_end
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if e > s:
            spans.append(SentenceSpan(s, e - s))

    start = 0
    for i, ch in enumerate(text):
        if ch in TERMINATORS and _is_boundary(text, i, abbreviations):
            emit(start, i + 1)
            start = i + 1
    emit(start, len(text))
    return spans


def document_sentences(doc) -> list[SentenceSpan]:
    """Sentence spans for every passage, in document coordinates."""
    spans: list[SentenceSpan] = []
    for passage in doc.passages:
        for s in split_sentences(passage.text):
            spans.append(SentenceSpan(s.start + passage.offset, s.length))
    return spans


def boundary_conflicts(doc, spans: list[SentenceSpan] | None = None) -> list:
    """Annotations that do not fall inside exactly one sentence span.

    These are counted and reported by callers rather than silently
    truncated; the corpus does not guess how a split-spanning mention
    should be assigned.
    """
    if spans is None:
        spans = document_sentences(doc)
    conflicted = []
    for ann in doc.annotations:
        inside = sum(1 for s in spans if s.start <= ann.start and ann.end <= s.end)
        if inside != 1:
            conflicted.append(ann)
    return conflicted
