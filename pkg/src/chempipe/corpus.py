"""Document and annotation data model with JSONL serialization.

All offsets count Unicode scalar values (Python string indices) from the
start of the document. Passages tile the document contiguously, so the
full text is the concatenation of passage texts. Corpus files are UTF-8
JSON Lines, one document per line:

    {"doc_id": str,
     "passages": [{"section": str, "offset": int, "text": str}],
     "annotations": [{"start": int, "length": int, "text": str,
                      "type": str, "mesh": [str]}]}

An annotation with no knowledge-base mapping is written with an empty
"mesh" list; the legacy "-" marker is normalized away on load.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

log = logging.getLogger(__name__)

MESH_ID_PATTERN = re.compile(r"^[A-Za-z]\d+$")
NO_MESH_MARKER = "-"

_DOCUMENT_KEYS = frozenset({"doc_id", "passages", "annotations"})
_PASSAGE_KEYS = frozenset({"section", "offset", "text"})
_ANNOTATION_KEYS = frozenset({"start", "length", "text", "type", "mesh"})


class CorpusFormatError(ValueError):
    """A corpus file line that cannot be parsed into a document."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)
        self.path = path
        self.line = line


class CorpusValidationError(ValueError):
    """A parsed document that violates the corpus invariants."""

    def __init__(self, doc_id: str, violations: list[str]):
        super().__init__(f"document {doc_id!r} is invalid: " + "; ".join(violations))
        self.doc_id = doc_id
        self.violations = list(violations)


@dataclass(frozen=True)
class Passage:
    """One contiguous section of a document."""

    section: str
    offset: int
    text: str

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


@dataclass(frozen=True)
class Annotation:
    """A typed character span, optionally linked to MeSH identifiers."""

    start: int
    length: int
    surface: str
    entity_type: str = "Chemical"
    mesh_ids: tuple[str, ...] = ()

    @property
    def end(self) -> int:
        return self.start + self.length

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.length)


@dataclass(frozen=True)
class Document:
    """A full-text article: contiguous passages plus span annotations."""

    doc_id: str
    passages: tuple[Passage, ...] = ()
    annotations: tuple[Annotation, ...] = ()

    def text(self) -> str:
        """Full document text (valid only for contiguous passages)."""
        return "".join(p.text for p in self.passages)

    def passage_containing(self, start: int, end: int) -> Passage | None:
        """The single passage fully containing [start, end), if any."""
        for p in self.passages:
            if p.offset <= start and end <= p.end:
                return p
        return None


Corpus = list[Document]


def validate_document(doc: Document) -> list[str]:
    """Check every document and annotation invariant.

    Returns a list of human-readable violations, empty when the document
    is well formed. Each violation names the offending field and, for
    annotation problems, the annotation index.
    """
    problems: list[str] = []

    expected = 0
    for i, p in enumerate(doc.passages):
        if p.offset < 0:
            problems.append(f"passages[{i}].offset: negative ({p.offset})")
        if i == 0 and p.offset != 0:
            problems.append(f"passages[0].offset: expected 0, got {p.offset}")
        elif i > 0 and p.offset != expected:
            problems.append(
                f"passages[{i}].offset: expected {expected} (contiguous), got {p.offset}"
            )
        expected = p.offset + len(p.text)

    for i, a in enumerate(doc.annotations):
        if a.length <= 0:
            problems.append(f"annotations[{i}].length: must be positive, got {a.length}")
            continue
        if a.start < 0:
            problems.append(f"annotations[{i}].start: negative ({a.start})")
            continue
        passage = doc.passage_containing(a.start, a.end)
        if passage is None:
            problems.append(
                f"annotations[{i}]: span [{a.start}, {a.end}) does not lie within one passage"
            )
        else:
            actual = passage.text[a.start - passage.offset : a.end - passage.offset]
            if actual != a.surface:
                problems.append(
                    f"annotations[{i}].surface: {a.surface!r} != document substring {actual!r}"
                )
        seen: set[str] = set()
        for mid in a.mesh_ids:
            if mid in seen:
                problems.append(f"annotations[{i}].mesh_ids: duplicate id {mid!r}")
            seen.add(mid)
            if not MESH_ID_PATTERN.match(mid):
                problems.append(
                    f"annotations[{i}].mesh_ids: {mid!r} does not match letter+digits"
                )

    return problems


def _require(obj: dict, key: str, types, *, path: str, line: int, where: str):
    if key not in obj:
        raise CorpusFormatError(f"{where}: missing key {key!r}", path=path, line=line)
    value = obj[key]
    # bool is an int subclass; JSON true/false is never a valid offset
    if not isinstance(value, types) or (types is int and isinstance(value, bool)):
        raise CorpusFormatError(
            f"{where}.{key}: expected {getattr(types, '__name__', types)}, got {type(value).__name__}",
            path=path,
            line=line,
        )
    return value


def _check_keys(obj: dict, allowed: frozenset, *, strict: bool, path: str, line: int,
                where: str, warned: set[str]) -> None:
    unknown = sorted(set(obj) - allowed)
    if not unknown:
        return
    if strict:
        raise CorpusFormatError(f"{where}: unknown keys {unknown}", path=path, line=line)
    for key in unknown:
        if key not in warned:
            warned.add(key)
            log.warning("%s: line %d: ignoring unknown key %r in %s", path, line, key, where)


def _parse_document(obj: dict, *, strict: bool, path: str, line: int, warned: set[str]) -> Document:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"expected a JSON object, got {type(obj).__name__}",
                                path=path, line=line)
    _check_keys(obj, _DOCUMENT_KEYS, strict=strict, path=path, line=line,
                where="document", warned=warned)
    doc_id = _require(obj, "doc_id", str, path=path, line=line, where="document")

    passages = []
    for j, pobj in enumerate(_require(obj, "passages", list, path=path, line=line, where="document")):
        if not isinstance(pobj, dict):
            raise CorpusFormatError(f"passages[{j}]: expected object", path=path, line=line)
        _check_keys(pobj, _PASSAGE_KEYS, strict=strict, path=path, line=line,
                    where=f"passages[{j}]", warned=warned)
        passages.append(Passage(
            section=_require(pobj, "section", str, path=path, line=line, where=f"passages[{j}]"),
            offset=_require(pobj, "offset", int, path=path, line=line, where=f"passages[{j}]"),
            text=_require(pobj, "text", str, path=path, line=line, where=f"passages[{j}]"),
        ))

    annotations = []
    for j, aobj in enumerate(_require(obj, "annotations", list, path=path, line=line, where="document")):
        if not isinstance(aobj, dict):
            raise CorpusFormatError(f"annotations[{j}]: expected object", path=path, line=line)
        _check_keys(aobj, _ANNOTATION_KEYS, strict=strict, path=path, line=line,
                    where=f"annotations[{j}]", warned=warned)
        mesh = _require(aobj, "mesh", list, path=path, line=line, where=f"annotations[{j}]")
        for mid in mesh:
            if not isinstance(mid, str):
                raise CorpusFormatError(f"annotations[{j}].mesh: entries must be strings",
                                        path=path, line=line)
        # "-" means "no mapping"; the empty list is the one canonical form.
        mesh_ids = tuple(m for m in mesh if m != NO_MESH_MARKER)
        annotations.append(Annotation(
            start=_require(aobj, "start", int, path=path, line=line, where=f"annotations[{j}]"),
            length=_require(aobj, "length", int, path=path, line=line, where=f"annotations[{j}]"),
            surface=_require(aobj, "text", str, path=path, line=line, where=f"annotations[{j}]"),
            entity_type=_require(aobj, "type", str, path=path, line=line, where=f"annotations[{j}]"),
            mesh_ids=mesh_ids,
        ))

    return Document(doc_id=doc_id, passages=tuple(passages), annotations=tuple(annotations))


def load_corpus(path, *, strict: bool = True, validate: bool = True) -> Corpus:
    """Read a corpus JSONL file, preserving document count and order.

    strict=False downgrades unknown JSON keys from errors to warnings.
    validate=False skips the invariant checks (used by the lint command,
    which reports violations itself).
    """
    path = str(path)
    docs: Corpus = []
    warned: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                raise CorpusFormatError("blank line", path=path, line=line_no)
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", path=path, line=line_no) from exc
            doc = _parse_document(obj, strict=strict, path=path, line=line_no, warned=warned)
            if validate:
                problems = validate_document(doc)
                if problems:
                    raise CorpusValidationError(doc.doc_id, problems)
            docs.append(doc)
    return docs


def document_to_obj(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "passages": [
            {"section": p.section, "offset": p.offset, "text": p.text} for p in doc.passages
        ],
        "annotations": [
            {"start": a.start, "length": a.length, "text": a.surface,
             "type": a.entity_type, "mesh": list(a.mesh_ids)}
            for a in doc.annotations
        ],
    }


def dumps_document(doc: Document) -> str:
    """Canonical single-line JSON for one document (fixed key order, compact)."""
    return json.dumps(document_to_obj(doc), ensure_ascii=False, separators=(",", ":"))


def write_corpus(docs: Corpus, path) -> None:
    """Write canonical JSONL; load_corpus followed by write_corpus is a byte
    round-trip for canonically formatted files."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(dumps_document(doc))
            fh.write("\n")
