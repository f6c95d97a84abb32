import random

import pytest

from chempipe.corpus import Annotation, Document, Passage

WORDS = ["aspirin", "ibuprofen", "ethanol", "glucose", "NaCl", "benzene",
         "acetone", "toluene", "caffeine", "insulin"]
TYPES = ["Chemical", "Gene"]
MESH = [f"D{n:06d}" for n in range(1, 9)]


def make_document(rng: random.Random, doc_id: str, *, n_annotations=(0, 6),
                  with_mesh=False) -> Document:
    """A one-passage document with random non-overlapping annotations."""
    words = [rng.choice(WORDS) for _ in range(rng.randint(8, 25))]
    text = " ".join(words) + "."
    n_anns = rng.randint(*n_annotations)
    taken: list[tuple[int, int]] = []
    anns = []
    for _ in range(n_anns * 3):
        if len(anns) >= n_anns:
            break
        i = rng.randrange(len(words))
        start = sum(len(w) + 1 for w in words[:i])
        end = start + len(words[i])
        if any(not (end <= s or e <= start) for s, e in taken):
            continue
        taken.append((start, end))
        mesh = tuple(sorted(rng.sample(MESH, rng.randint(1, 2)))) if with_mesh and rng.random() < 0.8 else ()
        anns.append(Annotation(start, end - start, text[start:end],
                               rng.choice(TYPES), mesh))
    anns.sort(key=lambda a: a.start)
    return Document(doc_id, (Passage("paragraph", 0, text),), tuple(anns))


def perturb_document(rng: random.Random, doc: Document) -> Document:
    """A noisy prediction for doc: some spans kept, shifted, retyped,
    relinked, or dropped, plus a few spurious ones."""
    text = doc.text()
    anns = []
    for a in doc.annotations:
        roll = rng.random()
        if roll < 0.15:
            continue  # miss
        start, length = a.start, a.length
        if roll < 0.45:  # boundary noise, stay in range
            start = max(0, start - rng.randint(0, 2))
            length = min(len(text) - start, length + rng.randint(0, 3))
            if length <= 0:
                continue
        etype = a.entity_type if rng.random() > 0.1 else rng.choice(TYPES)
        mesh = a.mesh_ids
        if mesh and rng.random() < 0.3:
            mesh = tuple(sorted(rng.sample(MESH, len(mesh))))
        anns.append(Annotation(start, length, text[start:start + length], etype, mesh))
    for _ in range(rng.randint(0, 2)):  # spurious
        start = rng.randrange(max(1, len(text) - 5))
        length = rng.randint(1, min(5, len(text) - start))
        mesh = (rng.choice(MESH),) if rng.random() < 0.5 else ()
        anns.append(Annotation(start, length, text[start:start + length],
                               rng.choice(TYPES), mesh))
    return Document(doc.doc_id, doc.passages, tuple(anns))


def make_corpus_pair(seed: int, n_docs: int):
    """(pred, gold) corpora with correlated noisy predictions."""
    rng = random.Random(seed)
    gold = [make_document(rng, f"doc{i}", with_mesh=True) for i in range(n_docs)]
    pred = [perturb_document(rng, d) for d in gold]
    return pred, gold


@pytest.fixture
def tiny_doc() -> Document:
    text = "Aspirin works well. Ibuprofen is similar."
    return Document(
        "d1",
        (Passage("paragraph", 0, text),),
        (
            Annotation(0, 7, "Aspirin", "Chemical", ("D001241",)),
            Annotation(20, 9, "Ibuprofen", "Chemical", ("D007052",)),
        ),
    )
