"""Prompt/target codec for generative models, plus span recovery.

Sentences and their annotations become (prompt, target) pairs in one of
two frozen styles: natural-language questions, or a bare context closed
by a task-specific token. Generated answers are parsed back into item
lists, and entity strings are re-located in the original context to
reconstruct character spans. Template strings are part of the file
format; changing one is a breaking change.

Prompt files are JSONL:

    {"task": str, "style": str, "doc_id": str, "start": int, "length": int,
     "prompt": str, "target": str}

Generated-answer files mirror this with "answer" in place of "target".
For sentence-scoped tasks (start, length) is the context's document
span; for indexing, start is the window index and length the number of
abstract sentences in the window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import Annotation

TASKS = ("ner", "linking", "indexing")
STYLES = ("question", "special-token")

END_TOKEN = "<|END|>"
TASK_TOKENS = {"ner": "<|NER|>", "indexing": "<|INDEX|>"}
SEPARATOR = "; "
EMPTY_ANSWER = "none"

NER_QUESTION = "question: which chemicals are mentioned? context: "
LINKING_QUESTION = 'question: what is the MeSH identifier of "{mention}"? context: '


class UnsupportedTaskStyleError(ValueError):
    pass


@dataclass(frozen=True)
class PromptExample:
    task: str
    style: str
    context: str
    prompt: str
    target: str
    doc_id: str = ""
    start: int = 0
    length: int = 0


@dataclass(frozen=True)
class IndexWindow:
    """One prompt-sized slice of an article: title, at most two abstract
    sentences, and the keyword list."""

    title: str
    sentences: tuple[str, ...]
    keywords: tuple[str, ...]
    window_index: int


@dataclass(frozen=True)
class RecoveryReport:
    recovered: tuple[Annotation, ...]
    dropped: tuple[tuple[str, str], ...]
    case_fallbacks: int

    def to_obj(self) -> dict:
        return {
            "recovered": len(self.recovered),
            "dropped": [{"item": item, "reason": reason} for item, reason in self.dropped],
            "case_fallbacks": self.case_fallbacks,
        }


def _join_items(items) -> str:
    cleaned = [s for s in items if s]
    return SEPARATOR.join(cleaned) if cleaned else EMPTY_ANSWER


def _ordered_entities(context: str, entities) -> list[str]:
    """Deduplicate entity surfaces and order them by first occurrence."""
    seen: set[str] = set()
    unique = []
    for e in entities or ():
        if e and e not in seen:
            seen.add(e)
            unique.append(e)

    def first_pos(e: str) -> int:
        pos = context.find(e)
        return pos if pos >= 0 else len(context)

    return sorted(unique, key=first_pos)  # stable: input order breaks ties


def make_prompt(task: str, style: str, context: str, gold=None, *,
                mention: str | None = None, doc_id: str = "",
                start: int = 0, length: int = 0) -> PromptExample:
    """Render one (prompt, target) pair from a context.

    gold is task-dependent: entity surface strings for ner, MeSH IDs for
    linking (the mention itself is a separate argument and must occur in
    the context), topic IDs for indexing. For indexing, pass the
    rendered window text as the context (see render_index_window).
    """
    if task not in TASKS or style not in STYLES:
        raise UnsupportedTaskStyleError(f"unknown task/style ({task!r}, {style!r})")
    if not context:
        raise ValueError("context must be non-empty")

    if task == "linking":
        if style == "special-token":
            raise UnsupportedTaskStyleError(
                "special-token linking prompts are not supported"
            )
        if not mention or mention not in context:
            raise ValueError(f"linking needs a mention inside the context, got {mention!r}")
        prompt = LINKING_QUESTION.format(mention=mention) + context
        target = _join_items(gold or ())
    elif task == "ner":
        target = _join_items(_ordered_entities(context, gold))
        if style == "question":
            prompt = NER_QUESTION + context
        else:
            prompt = f"{context} {TASK_TOKENS['ner']}"
            target = f"{target} {END_TOKEN}"
    else:  # indexing
        target = _join_items(gold or ())
        if style == "question":
            prompt = context
        else:
            prompt = f"{context} {TASK_TOKENS['indexing']}"
            target = f"{target} {END_TOKEN}"

    return PromptExample(task=task, style=style, context=context, prompt=prompt,
                         target=target, doc_id=doc_id, start=start, length=length)


def render_index_window(window: IndexWindow) -> str:
    abstract = (" " + " ".join(window.sentences)) if window.sentences else ""
    keywords = (" " + SEPARATOR.join(window.keywords)) if window.keywords else ""
    return f"title: {window.title} abstract:{abstract} keywords:{keywords}"


def parse_answer(answer: str, task: str | None = None) -> list[str]:
    """Total parser for generated text (task currently does not alter the
    rules; it is accepted for interface stability).

    Strips a trailing end token, splits on ";", trims, drops empties,
    deduplicates keeping first occurrence. A bare "none" (any case) is
    the empty list.
    """
    text = answer.strip()
    if text.endswith(END_TOKEN):
        text = text[: -len(END_TOKEN)].strip()
    if text.lower() == EMPTY_ANSWER:
        return []
    items: list[str] = []
    seen: set[str] = set()
    for piece in text.split(";"):
        item = piece.strip()
        if item and item not in seen:
            seen.add(item)
            items.append(item)
    return items


def _find_unclaimed(context: str, item: str, claimed: list[tuple[int, int]],
                    *, fold_case: bool) -> int | None:
    """Leftmost occurrence of item whose span overlaps no claimed span."""
    n, m = len(context), len(item)
    pos = 0
    while pos + m <= n:
        if fold_case:
            found = context[pos:pos + m].lower() == item.lower()
            at = pos if found else None
        else:
            at = context.find(item, pos)
            at = None if at < 0 else at
        if at is None:
            if fold_case:
                pos += 1
                continue
            return None
        if all(at + m <= s or e <= at for s, e in claimed):
            return at
        pos = at + 1
    return None


def recover_spans(items, context: str, context_offset: int = 0) -> RecoveryReport:
    """Re-locate generated entity strings in their context.

    Each item claims its leftmost exact occurrence that does not overlap
    an already-claimed span; failing that, the leftmost case-insensitive
    occurrence (counted); failing that, the item is reported as dropped.
    Recovered spans are shifted into document coordinates.
    """
    claimed: list[tuple[int, int]] = []
    recovered: list[Annotation] = []
    dropped: list[tuple[str, str]] = []
    fallbacks = 0
    for item in items:
        if not item:
            dropped.append((item, "empty item"))
            continue
        at = _find_unclaimed(context, item, claimed, fold_case=False)
        if at is None:
            at = _find_unclaimed(context, item, claimed, fold_case=True)
            if at is not None:
                fallbacks += 1
        if at is None:
            dropped.append((item, "not found"))
            continue
        claimed.append((at, at + len(item)))
        recovered.append(Annotation(
            start=context_offset + at,
            length=len(item),
            surface=context[at:at + len(item)],
            entity_type="Chemical",
        ))
    return RecoveryReport(tuple(recovered), tuple(dropped), fallbacks)


def index_windows(title: str, abstract_sentences, keywords) -> list[IndexWindow]:
    """Non-overlapping consecutive sentence pairs covering the abstract.

    An odd sentence count leaves a final one-sentence window; with no
    sentences at all there is a single title+keywords window.
    """
    sentences = list(abstract_sentences)
    keywords = tuple(keywords)
    if not sentences:
        return [IndexWindow(title=title, sentences=(), keywords=keywords, window_index=0)]
    windows = []
    for w, i in enumerate(range(0, len(sentences), 2)):
        windows.append(IndexWindow(
            title=title,
            sentences=tuple(sentences[i:i + 2]),
            keywords=keywords,
            window_index=w,
        ))
    return windows


def aggregate_topics(window_predictions) -> list[str]:
    """Union of per-window ID lists, first occurrence first, exact-string
    deduplication."""
    seen: set[str] = set()
    merged: list[str] = []
    for ids in window_predictions:
        for mesh_id in ids:
            if mesh_id not in seen:
                seen.add(mesh_id)
                merged.append(mesh_id)
    return merged


# ---------------------------------------------------------------------------
# File formats


@dataclass(frozen=True)
class GeneratedAnswer:
    task: str
    style: str
    doc_id: str
    start: int
    length: int
    prompt: str
    answer: str


def write_prompt_file(examples, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ex in examples:
            obj = {
                "task": ex.task, "style": ex.style, "doc_id": ex.doc_id,
                "start": ex.start, "length": ex.length,
                "prompt": ex.prompt, "target": ex.target,
            }
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def load_answer_file(path) -> list[GeneratedAnswer]:
    path = str(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            try:
                out.append(GeneratedAnswer(
                    task=obj["task"], style=obj["style"], doc_id=obj["doc_id"],
                    start=obj["start"], length=obj["length"],
                    prompt=obj.get("prompt", ""), answer=obj["answer"],
                ))
            except KeyError as exc:
                raise ValueError(f"{path}: line {line_no}: missing key {exc}") from exc
    return out


def write_answer_file(answers, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in answers:
            obj = {
                "task": a.task, "style": a.style, "doc_id": a.doc_id,
                "start": a.start, "length": a.length,
                "prompt": a.prompt, "answer": a.answer,
            }
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
