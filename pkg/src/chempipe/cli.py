"""Single-executable pipeline CLI.

Reports go to stdout, data files to paths, log messages to stderr.
Identical invocations produce byte-identical outputs; the only
environment variable honored is CHEMPIPE_COLOR (colored stderr levels).
Exit codes: 0 success, 1 validation/contract failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import corpus as corpus_mod
from . import linker as linker_mod
from . import metrics as metrics_mod
from . import sentences as sentences_mod
from . import tagging as tagging_mod
from . import text2text as t2t_mod

log = logging.getLogger("chempipe")


class CliError(Exception):
    """User-facing failure; message already names file and contract."""


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _print_report(obj) -> None:
    sys.stdout.write(_dump(obj) + "\n")


def _check_inputs(*paths) -> None:
    for p in paths:
        if p is not None and not os.path.exists(p):
            raise CliError(f"input file not found: {p}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _load_corpus(path, strict: bool, validate: bool = True):
    try:
        return corpus_mod.load_corpus(path, strict=strict, validate=validate)
    except (corpus_mod.CorpusFormatError, corpus_mod.CorpusValidationError) as exc:
        raise CliError(str(exc)) from exc


def _corpus_by_id(docs, path):
    by_id = {}
    for doc in docs:
        if doc.doc_id in by_id:
            raise CliError(f"{path}: duplicate doc_id {doc.doc_id!r}")
        by_id[doc.doc_id] = doc
    return by_id


# ---------------------------------------------------------------------------
# corpus subcommands


def cmd_validate(args) -> int:
    docs = _load_corpus(args.corpus, strict=not args.lenient, validate=False)
    reports = []
    for doc in docs:
        problems = corpus_mod.validate_document(doc)
        if problems:
            reports.append({"doc_id": doc.doc_id, "problems": problems})
    _print_report({"documents": len(docs), "invalid": len(reports), "violations": reports})
    return 1 if reports else 0


def cmd_split(args) -> int:
    docs = _load_corpus(args.corpus, strict=not args.lenient)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            spans = sentences_mod.document_sentences(doc)
            conflicts = sentences_mod.boundary_conflicts(doc, spans)
            fh.write(_dump({
                "doc_id": doc.doc_id,
                "sentences": [{"start": s.start, "length": s.length} for s in spans],
                "boundary_conflicts": len(conflicts),
            }) + "\n")
    return 0


# ---------------------------------------------------------------------------
# tagging subcommands


def cmd_encode(args) -> int:
    docs = _corpus_by_id(_load_corpus(args.corpus, strict=not args.lenient), args.corpus)
    matrices = tagging_mod.load_prob_file(args.tokens)
    entries = []
    for m in matrices:
        if m.doc_id not in docs:
            raise CliError(f"{args.tokens}: doc_id {m.doc_id!r} not in {args.corpus}")
        try:
            tags = tagging_mod.encode_bio(m.tokens, docs[m.doc_id].annotations)
        except tagging_mod.TaggingError as exc:
            raise CliError(f"doc {m.doc_id!r}: {exc}") from exc
        entries.append((m.doc_id, m.tokens, tags))
    tagging_mod.write_tag_file(entries, args.output)
    return 0


def cmd_decode(args) -> int:
    docs = _corpus_by_id(_load_corpus(args.corpus, strict=not args.lenient), args.corpus)
    if args.probs:
        matrices = tagging_mod.load_prob_file(args.probs)
        tagged = [(m.doc_id, m.tokens, tagging_mod.argmax_decode(m)) for m in matrices]
        source = args.probs
    else:
        tagged = tagging_mod.load_tag_file(args.tags)
        source = args.tags
    out_docs = []
    for doc_id, tokens, tags in tagged:
        if doc_id not in docs:
            raise CliError(f"{source}: doc_id {doc_id!r} not in {args.corpus}")
        doc = docs[doc_id]
        text = doc.text()
        if tokens and tokens[-1][0] + tokens[-1][1] > len(text):
            raise CliError(
                f"{source}: doc {doc_id!r}: token offsets extend past the document "
                f"({tokens[-1][0] + tokens[-1][1]} > {len(text)})")
        spans = tagging_mod.decode_spans(tags, tokens, lenient=not args.strict_iob)
        annotations = tuple(
            corpus_mod.Annotation(
                start=s.start, length=s.length,
                surface=text[s.start:s.end], entity_type=s.entity_type,
            )
            for s in sorted(spans, key=lambda s: (s.start, s.length))
        )
        out_docs.append(corpus_mod.Document(doc.doc_id, doc.passages, annotations))
    corpus_mod.write_corpus(out_docs, args.output)
    return 0


def cmd_ensemble(args) -> int:
    weights = None
    if args.weights:
        try:
            weights = [float(w) for w in args.weights.split(",")]
        except ValueError:
            raise CliError(f"--weights must be comma-separated numbers, got {args.weights!r}")
        if len(weights) != len(args.members):
            raise CliError(f"{len(weights)} weights for {len(args.members)} member files")
    else:
        weights = [1.0] * len(args.members)
    try:
        spec = tagging_mod.EnsembleSpec(tuple(zip(args.members, weights)))
        per_model = [tagging_mod.load_prob_file(p) for p in args.members]
    except tagging_mod.TaggingError as exc:
        raise CliError(str(exc)) from exc

    by_doc = []
    for path, matrices in zip(args.members, per_model):
        ids = [m.doc_id for m in matrices]
        if len(set(ids)) != len(ids):
            raise CliError(f"{path}: duplicate doc_id")
        by_doc.append(dict(zip(ids, matrices)))
    base_ids = [m.doc_id for m in per_model[0]]
    for path, mapping in zip(args.members[1:], by_doc[1:]):
        if set(mapping) != set(base_ids):
            raise CliError(f"{path}: document set differs from {args.members[0]}")

    out = []
    for doc_id in base_ids:
        try:
            out.append(tagging_mod.ensemble_probs([m[doc_id] for m in by_doc], spec))
        except tagging_mod.TaggingError as exc:
            raise CliError(f"doc {doc_id!r}: {exc}") from exc
    tagging_mod.write_prob_file(out, args.output)
    return 0


# ---------------------------------------------------------------------------
# evaluation subcommands


def _parallel_sum(fn, pairs, jobs: int) -> metrics_mod.MatchCounts:
    total = metrics_mod.MatchCounts()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for counts in pool.map(fn, pairs):
                total = total + counts
    else:
        for pair in pairs:
            total = total + fn(pair)
    return total


def cmd_eval_ner(args) -> int:
    pred = _load_corpus(args.pred, strict=not args.lenient)
    gold = _load_corpus(args.gold, strict=not args.lenient)
    try:
        pairs = metrics_mod.paired_documents(pred, gold)
        counts = _parallel_sum(
            lambda pg: metrics_mod.match_spans(pg[0].annotations, pg[1].annotations, args.mode),
            pairs, args.jobs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    p, r, f1 = metrics_mod.prf(counts)
    _print_report(metrics_mod.MetricReport("ner", args.mode, counts, p, r, f1).to_obj())
    return 0


def cmd_eval_link(args) -> int:
    pred = _load_corpus(args.pred, strict=not args.lenient)
    gold = _load_corpus(args.gold, strict=not args.lenient)
    try:
        pairs = metrics_mod.paired_documents(pred, gold)
        counts = _parallel_sum(
            lambda pg: metrics_mod.match_linked_items(
                metrics_mod.linking_items(pg[0].annotations),
                metrics_mod.linking_items(pg[1].annotations), args.mode),
            pairs, args.jobs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    p, r, f1 = metrics_mod.prf(counts)
    _print_report(metrics_mod.MetricReport("linking", args.mode, counts, p, r, f1).to_obj())
    return 0


def _load_topic_sets(path) -> dict[str, list[str]]:
    sets: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CliError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from exc
            if "doc_id" not in obj or "mesh" not in obj:
                raise CliError(f"{path}: line {line_no}: need doc_id and mesh keys")
            if obj["doc_id"] in sets:
                raise CliError(f"{path}: line {line_no}: duplicate doc_id {obj['doc_id']!r}")
            mesh = list(obj["mesh"])
            if any(not isinstance(m, str) for m in mesh):
                raise CliError(f"{path}: line {line_no}: mesh entries must be strings")
            sets[obj["doc_id"]] = mesh
    return sets


def cmd_eval_index(args) -> int:
    pred = _load_topic_sets(args.pred)
    gold = _load_topic_sets(args.gold)
    equivalence = None
    if args.equivalence:
        try:
            equivalence = metrics_mod.load_equivalence_tsv(args.equivalence)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    try:
        report = metrics_mod.evaluate_indexing(pred, gold, equivalence)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _print_report(report.to_obj())
    return 0


# ---------------------------------------------------------------------------
# linker subcommands


def cmd_index_build(args) -> int:
    try:
        table = linker_mod.load_embedding_tsv(args.embeddings)
        index = linker_mod.build_index(linker_mod.records_from_table(table))
        linker_mod.write_embedding_tsv(linker_mod.index_to_table(index), args.output)
    except linker_mod.LinkerError as exc:
        raise CliError(str(exc)) from exc
    return 0


def cmd_link(args) -> int:
    try:
        index_table = linker_mod.load_embedding_tsv(args.index)
        index = linker_mod.build_index(linker_mod.records_from_table(index_table))
        queries = linker_mod.load_embedding_tsv(args.queries)
    except linker_mod.LinkerError as exc:
        raise CliError(str(exc)) from exc
    if queries.dim != index.dim:
        raise CliError(f"query dimension {queries.dim} != index dimension {index.dim}")

    def link_one(i: int):
        return linker_mod.link_mention(
            index, queries.vectors[i], threshold=args.threshold, k=args.k,
            query_id=queries.ids[i], mention=queries.names[i])

    try:
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(link_one, range(len(queries))))
        else:
            results = [link_one(i) for i in range(len(queries))]
    except linker_mod.LinkerError as exc:
        raise CliError(str(exc)) from exc
    linker_mod.write_link_results(results, args.output)
    return 0


def cmd_refine(args) -> int:
    try:
        table = linker_mod.load_embedding_tsv(args.pairs)
        config = linker_mod.RefineConfig(
            margin=args.margin, learning_rate=args.learning_rate,
            epochs=args.epochs, batch_size=args.batch_size, rng_seed=args.seed)
        refined, trace = linker_mod.refine_embeddings(table, config)
    except linker_mod.LinkerError as exc:
        raise CliError(str(exc)) from exc
    linker_mod.write_embedding_tsv(refined, args.output)
    _print_report({"epochs": config.epochs, "loss": trace})
    return 0


# ---------------------------------------------------------------------------
# text-to-text subcommands


def _doc_title_abstract_keywords(doc):
    title = doc.passages[0].text if doc.passages else ""
    abstract_sentences: list[str] = []
    keywords: list[str] = []
    for p in doc.passages:
        section = p.section.lower()
        if section == "title":
            title = p.text
        elif section == "abstract":
            for s in sentences_mod.split_sentences(p.text):
                abstract_sentences.append(p.text[s.start:s.end])
        elif section in ("keywords", "keyword"):
            for piece in p.text.replace(";", ",").split(","):
                piece = piece.strip()
                if piece:
                    keywords.append(piece)
    return title, abstract_sentences, keywords


def _sentence_examples(doc, task: str, style: str):
    """Prompt examples for one document, plus boundary-conflict count."""
    spans = sentences_mod.document_sentences(doc)
    conflicted = set(id(a) for a in sentences_mod.boundary_conflicts(doc, spans))
    text = doc.text()
    examples = []
    for span in spans:
        context = text[span.start:span.end]
        inside = [a for a in doc.annotations
                  if id(a) not in conflicted and span.start <= a.start and a.end <= span.end]
        inside.sort(key=lambda a: (a.start, a.length))
        if task == "ner":
            examples.append(t2t_mod.make_prompt(
                "ner", style, context, [a.surface for a in inside],
                doc_id=doc.doc_id, start=span.start, length=span.length))
        else:
            for a in inside:
                examples.append(t2t_mod.make_prompt(
                    "linking", style, context, list(a.mesh_ids), mention=a.surface,
                    doc_id=doc.doc_id, start=span.start, length=span.length))
    return examples, len(conflicted)


def cmd_convert(args) -> int:
    docs = _load_corpus(args.corpus, strict=not args.lenient)
    topics = _load_topic_sets(args.topics) if args.topics else {}
    examples = []
    conflicts = 0
    try:
        for doc in docs:
            if args.task in ("ner", "linking"):
                doc_examples, doc_conflicts = _sentence_examples(doc, args.task, args.style)
                examples.extend(doc_examples)
                conflicts += doc_conflicts
            else:
                title, abstract, keywords = _doc_title_abstract_keywords(doc)
                gold = topics.get(doc.doc_id, [])
                for window in t2t_mod.index_windows(title, abstract, keywords):
                    examples.append(t2t_mod.make_prompt(
                        "indexing", args.style, t2t_mod.render_index_window(window), gold,
                        doc_id=doc.doc_id, start=window.window_index,
                        length=len(window.sentences)))
    except (t2t_mod.UnsupportedTaskStyleError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    t2t_mod.write_prompt_file(examples, args.output)
    _print_report({"examples": len(examples), "boundary_conflicts": conflicts})
    return 0


def cmd_parse(args) -> int:
    answers = t2t_mod.load_answer_file(args.answers)
    if args.aggregate:
        if args.task != "indexing":
            raise CliError("--aggregate applies to the indexing task only")
        per_doc: dict[str, list[list[str]]] = {}
        doc_order: list[str] = []
        for a in answers:
            if a.doc_id not in per_doc:
                per_doc[a.doc_id] = []
                doc_order.append(a.doc_id)
            per_doc[a.doc_id].append(t2t_mod.parse_answer(a.answer, args.task))
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            for doc_id in doc_order:
                fh.write(_dump({
                    "doc_id": doc_id,
                    "mesh": t2t_mod.aggregate_topics(per_doc[doc_id]),
                }) + "\n")
        return 0
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for a in answers:
            fh.write(_dump({
                "doc_id": a.doc_id, "start": a.start, "length": a.length,
                "items": t2t_mod.parse_answer(a.answer, args.task),
            }) + "\n")
    return 0


def cmd_recover(args) -> int:
    docs = _corpus_by_id(_load_corpus(args.corpus, strict=not args.lenient), args.corpus)
    answers = t2t_mod.load_answer_file(args.answers)
    per_doc: dict[str, list] = {}
    doc_order: list[str] = []
    dropped: list[tuple[str, str]] = []
    recovered_count = 0
    fallbacks = 0
    for a in answers:
        if a.doc_id not in docs:
            raise CliError(f"{args.answers}: doc_id {a.doc_id!r} not in {args.corpus}")
        doc = docs[a.doc_id]
        text = doc.text()
        if a.start < 0 or a.start + a.length > len(text):
            raise CliError(
                f"{args.answers}: doc {a.doc_id!r}: context span "
                f"[{a.start}, {a.start + a.length}) outside document")
        context = text[a.start:a.start + a.length]
        report = t2t_mod.recover_spans(t2t_mod.parse_answer(a.answer, a.task), context, a.start)
        if a.doc_id not in per_doc:
            per_doc[a.doc_id] = []
            doc_order.append(a.doc_id)
        per_doc[a.doc_id].extend(report.recovered)
        dropped.extend(report.dropped)
        recovered_count += len(report.recovered)
        fallbacks += report.case_fallbacks
    out_docs = []
    for doc_id in doc_order:
        doc = docs[doc_id]
        annotations = tuple(sorted(per_doc[doc_id], key=lambda x: (x.start, x.length)))
        out_docs.append(corpus_mod.Document(doc.doc_id, doc.passages, annotations))
    corpus_mod.write_corpus(out_docs, args.output)
    _print_report(t2t_mod.RecoveryReport((), tuple(dropped), fallbacks).to_obj()
                  | {"recovered": recovered_count})
    return 0


def cmd_windows(args) -> int:
    docs = _load_corpus(args.corpus, strict=not args.lenient)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            title, abstract, keywords = _doc_title_abstract_keywords(doc)
            for w in t2t_mod.index_windows(title, abstract, keywords):
                fh.write(_dump({
                    "doc_id": doc.doc_id, "window_index": w.window_index,
                    "title": w.title, "sentences": list(w.sentences),
                    "keywords": list(w.keywords),
                }) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lenient", action="store_true",
                   help="warn on unknown corpus keys instead of failing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chempipe",
        description="Chemical NER, entity-linking, and topic-indexing pipeline core.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="lint a corpus file")
    p.add_argument("corpus")
    _add_common(p)
    p.set_defaults(fn=cmd_validate, inputs=lambda a: (a.corpus,))

    p = sub.add_parser("split", help="sentence spans per document")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_split, inputs=lambda a: (a.corpus,))

    p = sub.add_parser("encode", help="IOB2 tags from gold annotations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tokens", required=True, help="probability JSONL supplying token offsets")
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_encode, inputs=lambda a: (a.corpus, a.tokens))

    p = sub.add_parser("decode", help="spans from probabilities or tags")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--probs")
    group.add_argument("--tags")
    p.add_argument("--corpus", required=True, help="source corpus for passage text")
    p.add_argument("--strict-iob", action="store_true",
                   help="treat stray I- labels as O instead of opening a span")
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_decode, inputs=lambda a: (a.probs, a.tags, a.corpus))

    p = sub.add_parser("ensemble", help="weighted average of probability files")
    p.add_argument("members", nargs="+")
    p.add_argument("--weights", help="comma-separated positive weights, one per file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_ensemble, inputs=lambda a: tuple(a.members))

    p = sub.add_parser("eval-ner", help="span precision/recall/F1")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--mode", choices=metrics_mod.MODES, default="strict")
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_eval_ner, inputs=lambda a: (a.pred, a.gold))

    p = sub.add_parser("eval-link", help="(span, MeSH id) precision/recall/F1")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--mode", choices=metrics_mod.MODES, default="strict")
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_eval_link, inputs=lambda a: (a.pred, a.gold))

    p = sub.add_parser("eval-index", help="per-document topic-set precision/recall/F1")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--equivalence", help="two-column TSV mapping id to canonical id")
    p.set_defaults(fn=cmd_eval_index, inputs=lambda a: (a.pred, a.gold, a.equivalence))

    p = sub.add_parser("index-build", help="normalize an embedding TSV into an index")
    p.add_argument("embeddings")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_index_build, inputs=lambda a: (a.embeddings,))

    p = sub.add_parser("link", help="nearest-concept linking for query embeddings")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=_positive_int, default=5)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_link, inputs=lambda a: (a.index, a.queries))

    p = sub.add_parser("refine", help="metric-learning refinement of an embedding TSV")
    p.add_argument("pairs", help="embedding TSV; same-concept rows form training pairs")
    p.add_argument("--margin", type=_positive_float, default=0.2)
    p.add_argument("--learning-rate", type=_nonnegative_float, default=0.05)
    p.add_argument("--epochs", type=_positive_int, default=30)
    p.add_argument("--batch-size", type=_positive_int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_refine, inputs=lambda a: (a.pairs,))

    p = sub.add_parser("convert", help="corpus to prompt/target JSONL")
    p.add_argument("--task", choices=t2t_mod.TASKS, required=True)
    p.add_argument("--style", choices=t2t_mod.STYLES, default="question")
    p.add_argument("--corpus", required=True)
    p.add_argument("--topics", help="gold topics JSONL for indexing targets")
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_convert, inputs=lambda a: (a.corpus, a.topics))

    p = sub.add_parser("parse", help="parse generated answers into item lists")
    p.add_argument("answers")
    p.add_argument("--task", choices=t2t_mod.TASKS, required=True)
    p.add_argument("--aggregate", action="store_true",
                   help="merge per-window indexing answers into per-document topic sets")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_parse, inputs=lambda a: (a.answers,))

    p = sub.add_parser("recover", help="recover annotation spans from generated answers")
    p.add_argument("answers")
    p.add_argument("--corpus", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_recover, inputs=lambda a: (a.answers, a.corpus))

    p = sub.add_parser("windows", help="indexing windows per document")
    p.add_argument("--corpus", required=True)
    p.add_argument("-o", "--output", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_windows, inputs=lambda a: (a.corpus,))

    return parser


def _setup_logging() -> None:
    color = os.environ.get("CHEMPIPE_COLOR", "") == "1" and sys.stderr.isatty()
    fmt = "\x1b[33m%(levelname)s\x1b[0m %(message)s" if color else "%(levelname)s %(message)s"
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format=fmt)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        _check_inputs(*args.inputs(args))
        return args.fn(args)
    except (CliError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
