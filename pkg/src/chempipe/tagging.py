"""IOB2 label encoding/decoding and probability-matrix ensembling.

Token probability files are JSONL, one object per document:

    {"doc_id": str, "labels": [str], "tokens": [{"start": int, "length": int}],
     "probs": [[float, ...], ...]}

The label vocabulary always starts with "O"; the remaining labels come in
"B-<type>"/"I-<type>" pairs. Tag files reuse the token layout with a
per-token "tags" list instead of the probability matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

OUTSIDE = "O"

ROW_SUM_TOL = 1e-6
ENTRY_TOL = 1e-9


class TaggingError(ValueError):
    pass


@dataclass(frozen=True)
class TaggedSpan:
    """A decoded entity span (no knowledge-base link yet)."""

    start: int
    length: int
    entity_type: str

    @property
    def end(self) -> int:
        return self.start + self.length


def _check_label_vocabulary(labels: tuple[str, ...]) -> None:
    if not labels or labels[0] != OUTSIDE:
        raise TaggingError(f"label vocabulary must start with {OUTSIDE!r}, got {list(labels)!r}")
    if len(set(labels)) != len(labels):
        raise TaggingError("duplicate labels in vocabulary")
    begins, insides = set(), set()
    for lab in labels[1:]:
        if lab.startswith("B-"):
            begins.add(lab[2:])
        elif lab.startswith("I-"):
            insides.add(lab[2:])
        else:
            raise TaggingError(f"label {lab!r} is neither {OUTSIDE!r} nor B-/I- prefixed")
    if begins != insides:
        odd = sorted(begins.symmetric_difference(insides))
        raise TaggingError(f"unpaired B-/I- labels for types {odd}")


def _check_tokens(tokens: tuple[tuple[int, int], ...]) -> None:
    prev_end = -1
    for start, length in tokens:
        if length <= 0:
            raise TaggingError(f"token at {start} has non-positive length {length}")
        if start < prev_end:
            raise TaggingError(f"tokens overlap or are unsorted near offset {start}")
        prev_end = start + length


@dataclass(frozen=True, eq=False)
class TokenProbMatrix:
    """Per-token label probabilities emitted by an external tagger."""

    doc_id: str
    labels: tuple[str, ...]
    tokens: tuple[tuple[int, int], ...]
    probs: np.ndarray  # (n_tokens, n_labels) float64

    def __post_init__(self):
        _check_label_vocabulary(self.labels)
        _check_tokens(self.tokens)
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape != (len(self.tokens), len(self.labels)):
            raise TaggingError(
                f"doc {self.doc_id!r}: probs shape {probs.shape} does not match "
                f"{len(self.tokens)} tokens x {len(self.labels)} labels"
            )
        if probs.size:
            if probs.min() < -ENTRY_TOL or probs.max() > 1 + ENTRY_TOL:
                raise TaggingError(f"doc {self.doc_id!r}: probabilities outside [0, 1]")
            sums = probs.sum(axis=1)
            bad = np.abs(sums - 1.0) > ROW_SUM_TOL
            if bad.any():
                row = int(np.argmax(bad))
                raise TaggingError(
                    f"doc {self.doc_id!r}: row {row} sums to {sums[row]:.8f}, expected 1"
                )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class EnsembleSpec:
    """Weighted ensemble members; weights are normalized at construction."""

    members: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.members:
            raise TaggingError("ensemble needs at least one member")
        total = 0.0
        for model_id, weight in self.members:
            if not weight > 0:
                raise TaggingError(f"model {model_id!r}: weight must be positive, got {weight}")
            total += float(weight)
        normalized = tuple((mid, float(w) / total) for mid, w in self.members)
        object.__setattr__(self, "members", normalized)

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(mid for mid, _ in self.members)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.members)


def encode_bio(tokens, annotations) -> list[str]:
    """IOB2 labels for token offsets against non-overlapping annotations.

    Annotation boundaries must coincide with token boundaries; a
    misaligned annotation raises, naming the annotation.
    """
    tokens = tuple((int(s), int(l)) for s, l in tokens)
    _check_tokens(tokens)
    anns = sorted(annotations, key=lambda a: (a.start, a.length))
    prev_end = -1
    for a in anns:
        if a.start < prev_end:
            raise TaggingError(f"annotations overlap near offset {a.start}")
        prev_end = a.start + a.length

    starts = {s: i for i, (s, _) in enumerate(tokens)}
    ends = {s + l: i for i, (s, l) in enumerate(tokens)}
    labels = [OUTSIDE] * len(tokens)
    for a in anns:
        first = starts.get(a.start)
        last = ends.get(a.start + a.length)
        if first is None or last is None or last < first:
            raise TaggingError(
                f"annotation [{a.start}, {a.start + a.length}) "
                f"({getattr(a, 'surface', '')!r}) is not aligned with token boundaries"
            )
        labels[first] = f"B-{a.entity_type}"
        for i in range(first + 1, last + 1):
            labels[i] = f"I-{a.entity_type}"
    return labels


def decode_spans(labels, tokens, *, lenient: bool = True) -> list[TaggedSpan]:
    """Turn a label sequence back into entity spans.

    Maximal B,I...I runs become one span. A stray I-<type> (not preceded
    by B/I of the same type) opens a new span when lenient, and is
    treated as O otherwise.
    """
    tokens = tuple((int(s), int(l)) for s, l in tokens)
    if len(labels) != len(tokens):
        raise TaggingError(f"{len(labels)} labels for {len(tokens)} tokens")

    spans: list[TaggedSpan] = []
    open_type: str | None = None
    first = last = -1

    def close():
        nonlocal open_type
        if open_type is not None:
            start = tokens[first][0]
            end = tokens[last][0] + tokens[last][1]
            spans.append(TaggedSpan(start, end - start, open_type))
            open_type = None

    for i, lab in enumerate(labels):
        if lab == OUTSIDE:
            close()
        elif lab.startswith("B-"):
            close()
            open_type, first, last = lab[2:], i, i
        elif lab.startswith("I-"):
            if open_type == lab[2:]:
                last = i
            else:
                close()
                if lenient:
                    open_type, first, last = lab[2:], i, i
        else:
            raise TaggingError(f"unrecognized label {lab!r} at position {i}")
    close()
    return spans


def argmax_decode(matrix: TokenProbMatrix) -> list[str]:
    """Most likely label per token; exact ties go to the lowest label index."""
    if not matrix.tokens:
        return []
    return [matrix.labels[i] for i in np.argmax(matrix.probs, axis=1)]


def ensemble_probs(matrices, spec: EnsembleSpec) -> TokenProbMatrix:
    """Convex combination of aligned probability matrices.

    All members must agree on doc_id, label vocabulary, and token
    offsets; a mismatch raises, naming the offending model.
    """
    matrices = list(matrices)
    if len(matrices) != len(spec.members):
        raise TaggingError(
            f"{len(matrices)} matrices for {len(spec.members)} ensemble members"
        )
    base = matrices[0]
    out = np.zeros_like(base.probs)
    for matrix, (model_id, weight) in zip(matrices, spec.members):
        if matrix.doc_id != base.doc_id:
            raise TaggingError(f"model {model_id!r}: doc_id {matrix.doc_id!r} != {base.doc_id!r}")
        if matrix.labels != base.labels:
            raise TaggingError(f"model {model_id!r}: label vocabulary differs")
        if matrix.tokens != base.tokens:
            raise TaggingError(f"model {model_id!r}: tokenization differs")
        out += weight * matrix.probs
    return TokenProbMatrix(base.doc_id, base.labels, base.tokens, out)


# ---------------------------------------------------------------------------
# File formats


def _tokens_to_obj(tokens) -> list[dict]:
    return [{"start": s, "length": l} for s, l in tokens]


def _tokens_from_obj(items, *, path: str, line: int) -> tuple[tuple[int, int], ...]:
    tokens = []
    for t in items:
        if not isinstance(t, dict) or not isinstance(t.get("start"), int) \
                or not isinstance(t.get("length"), int):
            raise TaggingError(f"{path}: line {line}: malformed token entry {t!r}")
        tokens.append((t["start"], t["length"]))
    return tuple(tokens)


def load_prob_file(path) -> list[TokenProbMatrix]:
    path = str(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise TaggingError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            try:
                out.append(TokenProbMatrix(
                    doc_id=obj["doc_id"],
                    labels=tuple(obj["labels"]),
                    tokens=_tokens_from_obj(obj["tokens"], path=path, line=line_no),
                    probs=np.asarray(obj["probs"], dtype=np.float64),
                ))
            except KeyError as exc:
                raise TaggingError(f"{path}: line {line_no}: missing key {exc}") from exc
            except TaggingError as exc:
                raise TaggingError(f"{path}: line {line_no}: {exc}") from exc
    return out


def write_prob_file(matrices, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for m in matrices:
            obj = {
                "doc_id": m.doc_id,
                "labels": list(m.labels),
                "tokens": _tokens_to_obj(m.tokens),
                "probs": [[float(v) for v in row] for row in m.probs],
            }
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def load_tag_file(path) -> list[tuple[str, tuple[tuple[int, int], ...], list[str]]]:
    """Read (doc_id, tokens, tags) triples from a tag JSONL file."""
    path = str(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise TaggingError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            try:
                tokens = _tokens_from_obj(obj["tokens"], path=path, line=line_no)
                tags = list(obj["tags"])
            except KeyError as exc:
                raise TaggingError(f"{path}: line {line_no}: missing key {exc}") from exc
            if len(tags) != len(tokens):
                raise TaggingError(f"{path}: line {line_no}: {len(tags)} tags for {len(tokens)} tokens")
            out.append((obj["doc_id"], tokens, tags))
    return out


def write_tag_file(entries, path) -> None:
    """Write (doc_id, tokens, tags) triples as tag JSONL."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id, tokens, tags in entries:
            obj = {"doc_id": doc_id, "tokens": _tokens_to_obj(tokens), "tags": list(tags)}
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
