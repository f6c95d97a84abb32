"""Strict and approximate precision/recall/F1 for spans, links, and topics.

Matching rules, fixed here so scores are reproducible:

* strict span match: identical (start, length, type), one-to-one;
* approximate span match: one-to-one matching between overlapping
  same-type spans, candidate pairs sorted by (overlap desc, pred start
  asc, gold start asc) and matched greedily;
* linking items are (span, mesh_id) pairs, matched with the same rules
  plus exact ID equality;
* indexing compares per-document ID sets, optionally after canonicalizing
  through an ID-equivalence map (identity = strict mode).

Scores are micro-averaged: counts are summed over documents before
computing precision/recall/F1. When both prediction and gold are empty,
all three measures are 1 by convention; otherwise a zero denominator
yields 0 for that measure.
"""

from __future__ import annotations

from dataclasses import dataclass

MODES = ("strict", "approximate")


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class MetricReport:
    task: str
    mode: str
    counts: MatchCounts
    precision: float
    recall: float
    f1: float

    def to_obj(self) -> dict:
        return {
            "task": self.task,
            "mode": self.mode,
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp, "fn": self.counts.fn},
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def harmonic_f1(precision: float, recall: float) -> float:
    """2PR/(P+R), defined as 0 when P+R is 0."""
    if not (0 <= precision <= 1 and 0 <= recall <= 1):
        raise ValueError(f"precision/recall must lie in [0, 1], got {precision}, {recall}")
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def prf(counts: MatchCounts) -> tuple[float, float, float]:
    """Precision, recall, F1 with the empty-vs-empty = perfect convention."""
    if min(counts.tp, counts.fp, counts.fn) < 0:
        raise ValueError(f"negative counts: {counts}")
    n_pred = counts.tp + counts.fp
    n_gold = counts.tp + counts.fn
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    precision = counts.tp / n_pred if n_pred else 0.0
    recall = counts.tp / n_gold if n_gold else 0.0
    return precision, recall, harmonic_f1(precision, recall)


def _overlap(p_start: int, p_len: int, g_start: int, g_len: int) -> int:
    return min(p_start + p_len, g_start + g_len) - max(p_start, g_start)


def _greedy_match(pred: list, gold: list, candidate) -> MatchCounts:
    """One-to-one greedy matching over candidate(p, g) sort keys.

    candidate returns None for non-matching pairs, otherwise the sort
    key. Ties keep enumeration order (pred index, then gold index).
    """
    pairs = []
    for pi, p in enumerate(pred):
        for gi, g in enumerate(gold):
            key = candidate(p, g)
            if key is not None:
                pairs.append((key, pi, gi))
    pairs.sort(key=lambda item: item[0])
    pred_used = [False] * len(pred)
    gold_used = [False] * len(gold)
    tp = 0
    for _, pi, gi in pairs:
        if not pred_used[pi] and not gold_used[gi]:
            pred_used[pi] = gold_used[gi] = True
            tp += 1
    return MatchCounts(tp, len(pred) - tp, len(gold) - tp)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def match_spans(pred, gold, mode: str) -> MatchCounts:
    """Match predicted against gold spans within one document.

    Spans are objects with start, length, and entity_type attributes.
    """
    _check_mode(mode)

    def candidate(p, g):
        if p.entity_type != g.entity_type:
            return None
        if mode == "strict":
            if (p.start, p.length) != (g.start, g.length):
                return None
            return (-p.length, p.start, g.start)
        ov = _overlap(p.start, p.length, g.start, g.length)
        if ov <= 0:
            return None
        return (-ov, p.start, g.start)

    return _greedy_match(list(pred), list(gold), candidate)


def linking_items(annotations) -> list[tuple[int, int, str, str]]:
    return [
        (a.start, a.length, a.entity_type, mid)
        for a in annotations
        for mid in a.mesh_ids
    ]


def match_linked_items(pred_items, gold_items, mode: str) -> MatchCounts:
    """Match (start, length, type, mesh_id) items one-to-one."""
    _check_mode(mode)

    def candidate(p, g):
        if p[2] != g[2] or p[3] != g[3]:
            return None
        if mode == "strict":
            if (p[0], p[1]) != (g[0], g[1]):
                return None
            return (-p[1], p[0], g[0])
        ov = _overlap(p[0], p[1], g[0], g[1])
        if ov <= 0:
            return None
        return (-ov, p[0], g[0])

    return _greedy_match(list(pred_items), list(gold_items), candidate)


def paired_documents(pred_docs, gold_docs) -> list[tuple]:
    pred_by_id, gold_by_id = {}, {}
    for doc in pred_docs:
        if doc.doc_id in pred_by_id:
            raise ValueError(f"duplicate doc_id {doc.doc_id!r} in predictions")
        pred_by_id[doc.doc_id] = doc
    for doc in gold_docs:
        if doc.doc_id in gold_by_id:
            raise ValueError(f"duplicate doc_id {doc.doc_id!r} in gold")
        gold_by_id[doc.doc_id] = doc
    missing_pred = sorted(set(gold_by_id) - set(pred_by_id))
    missing_gold = sorted(set(pred_by_id) - set(gold_by_id))
    if missing_pred or missing_gold:
        parts = []
        if missing_pred:
            parts.append(f"missing from predictions: {missing_pred}")
        if missing_gold:
            parts.append(f"missing from gold: {missing_gold}")
        raise ValueError("doc_id sets differ; " + "; ".join(parts))
    return [(pred_by_id[d], gold_by_id[d]) for d in sorted(pred_by_id)]


def evaluate_ner(pred_docs, gold_docs, mode: str) -> MetricReport:
    """Micro-averaged span matching over a document collection."""
    _check_mode(mode)
    total = MatchCounts()
    for pred_doc, gold_doc in paired_documents(pred_docs, gold_docs):
        total = total + match_spans(pred_doc.annotations, gold_doc.annotations, mode)
    p, r, f1 = prf(total)
    return MetricReport("ner", mode, total, p, r, f1)


def evaluate_linking(pred_docs, gold_docs, mode: str) -> MetricReport:
    """Micro-averaged (span, mesh_id) item matching; an annotation with k
    IDs contributes k items, an unlinked annotation contributes none."""
    _check_mode(mode)
    total = MatchCounts()
    for pred_doc, gold_doc in paired_documents(pred_docs, gold_docs):
        total = total + match_linked_items(
            linking_items(pred_doc.annotations),
            linking_items(gold_doc.annotations),
            mode,
        )
    p, r, f1 = prf(total)
    return MetricReport("linking", mode, total, p, r, f1)


def evaluate_indexing(pred_sets: dict, gold_sets: dict,
                      equivalence: dict[str, str] | None = None) -> MetricReport:
    """Per-document topic-set intersection, micro-averaged.

    pred_sets and gold_sets map doc_id to an iterable of MeSH IDs. IDs
    are canonicalized through the equivalence map when one is supplied
    (approximate mode); identity is strict mode.
    """
    missing_pred = sorted(set(gold_sets) - set(pred_sets))
    missing_gold = sorted(set(pred_sets) - set(gold_sets))
    if missing_pred or missing_gold:
        parts = []
        if missing_pred:
            parts.append(f"missing from predictions: {missing_pred}")
        if missing_gold:
            parts.append(f"missing from gold: {missing_gold}")
        raise ValueError("doc_id sets differ; " + "; ".join(parts))

    canon = (lambda i: i) if equivalence is None else (lambda i: equivalence.get(i, i))
    total = MatchCounts()
    for doc_id in sorted(pred_sets):
        pred = {canon(i) for i in pred_sets[doc_id]}
        gold = {canon(i) for i in gold_sets[doc_id]}
        total = total + MatchCounts(
            tp=len(pred & gold), fp=len(pred - gold), fn=len(gold - pred)
        )
    p, r, f1 = prf(total)
    mode = "strict" if equivalence is None else "approximate"
    return MetricReport("indexing", mode, total, p, r, f1)


def load_equivalence_tsv(path) -> dict[str, str]:
    """Two-column TSV (id, canonical-id) defining approximate indexing."""
    path = str(path)
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {line_no}: expected 2 tab-separated columns")
            mapping[parts[0]] = parts[1]
    return mapping
