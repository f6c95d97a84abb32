#!/usr/bin/env python3
"""End-to-end pipeline walk on synthetic data.

Builds a small corpus with gold chemical annotations, fakes two taggers'
probability files (one sharp, one noisy), then runs the library pipeline:
ensemble -> argmax decode -> strict/approximate evaluation, and a
text-to-text round trip with a perfect generator. Everything is seeded.

Usage: python scripts/synthetic_pipeline_demo.py [--docs 8] [--out DIR]
"""

import argparse
import json
import random
import tempfile
from pathlib import Path

import numpy as np

from chempipe.cli import main as cli
from chempipe.corpus import Annotation, Document, Passage, write_corpus
from chempipe.tagging import TokenProbMatrix, write_prob_file

LABELS = ("O", "B-Chemical", "I-Chemical")
CHEMICALS = ["aspirin", "ethanol", "glucose", "caffeine", "benzene", "insulin"]
FILLER = ["the", "sample", "was", "treated", "with", "buffer", "and", "then",
          "measured", "under", "standard", "conditions"]


def synth_doc(rng: random.Random, doc_id: str):
    words = []
    is_chem = []
    for _ in range(rng.randint(10, 18)):
        if rng.random() < 0.25:
            words.append(rng.choice(CHEMICALS))
            is_chem.append(True)
        else:
            words.append(rng.choice(FILLER))
            is_chem.append(False)
    text = " ".join(words) + "."
    tokens, anns = [], []
    pos = 0
    for word, chem in zip(words, is_chem):
        tokens.append((pos, len(word)))
        if chem:
            anns.append(Annotation(pos, len(word), word, "Chemical"))
        pos += len(word) + 1
    doc = Document(doc_id, (Passage("paragraph", 0, text),), tuple(anns))
    return doc, tokens


def prob_rows(rng, tokens, annotations, flip_rate):
    starts = {a.start for a in annotations}
    rows = []
    for start, _ in tokens:
        true_label = "B-Chemical" if start in starts else "O"
        label = true_label
        if rng.random() < flip_rate:
            label = rng.choice([l for l in LABELS if l != true_label])
        row = [0.05, 0.05, 0.05]
        row[LABELS.index(label)] = 0.9
        rows.append(row)
    return np.array(rows)


def run(argv):
    code = cli([str(a) for a in argv])
    if code != 0:
        raise SystemExit(f"command failed ({code}): {argv}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--docs", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None,
                    help="directory for intermediate files (default: temp)")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = args.out or Path(tempfile.mkdtemp(prefix="chempipe-demo-"))
    out.mkdir(parents=True, exist_ok=True)
    print(f"artifacts in {out}")

    docs, sharp, noisy = [], [], []
    for i in range(args.docs):
        doc, tokens = synth_doc(rng, f"doc{i:03d}")
        docs.append(doc)
        sharp.append(TokenProbMatrix(doc.doc_id, LABELS, tuple(tokens),
                                     prob_rows(rng, tokens, doc.annotations, 0.02)))
        noisy.append(TokenProbMatrix(doc.doc_id, LABELS, tuple(tokens),
                                     prob_rows(rng, tokens, doc.annotations, 0.25)))
    write_corpus(docs, out / "gold.jsonl")
    write_prob_file(sharp, out / "model_sharp.jsonl")
    write_prob_file(noisy, out / "model_noisy.jsonl")

    run(["ensemble", out / "model_sharp.jsonl", out / "model_noisy.jsonl",
         "--weights", "0.8,0.2", "-o", out / "ensembled.jsonl"])
    run(["decode", "--probs", out / "ensembled.jsonl", "--corpus", out / "gold.jsonl",
         "-o", out / "pred.jsonl"])

    print("\nBERT-style track (ensemble of two fake taggers):")
    for mode in ("strict", "approximate"):
        run(["eval-ner", "--mode", mode, out / "pred.jsonl", out / "gold.jsonl"])

    print("\ntext-to-text track (perfect generator emits the targets):")
    run(["convert", "--task", "ner", "--corpus", out / "gold.jsonl",
         "-o", out / "prompts.jsonl"])
    answers = []
    for line in (out / "prompts.jsonl").read_text().splitlines():
        obj = json.loads(line)
        obj["answer"] = obj.pop("target")
        answers.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    (out / "answers.jsonl").write_text("\n".join(answers) + "\n", encoding="utf-8")
    run(["recover", out / "answers.jsonl", "--corpus", out / "gold.jsonl",
         "-o", out / "recovered.jsonl"])
    for mode in ("strict", "approximate"):
        run(["eval-ner", "--mode", mode, out / "recovered.jsonl", out / "gold.jsonl"])


if __name__ == "__main__":
    main()
