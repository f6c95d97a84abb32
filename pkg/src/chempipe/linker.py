"""Concept embedding index: exact cosine search and margin-based refinement.

The index stores one unit-normalized vector per (mesh_id, synonym) pair
and answers nearest-neighbor queries by exhaustive cosine scan, so
results are exact by construction.

Refinement reshapes the stored vectors directly, no encoder in the loop.
Training examples are ordered pairs of same-concept synonyms; within a
mini batch, every vector from a different concept is a candidate
negative, and a triplet (a, p, n) is mined when

    cos(a, n) > cos(a, p) - margin.

The loss is the hinge over mined triplets,

    L = sum_t max(0, cos(a_t, n_t) - cos(a_t, p_t) + margin),

minimized by gradient descent on the vectors themselves. Gradients treat
the mined triplet set as fixed and include the unit-normalization of
each parameter vector in the chain rule, so every step moves vectors
tangentially on the sphere; rows are re-normalized after each update.

Embedding files are UTF-8 TSV with a "#dim=<d>" header; each row is
mesh_id, synonym, and d space-separated decimal reals. Query files reuse
the row format with a query id in column 1 and mention text in column 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-6
_ZERO_NORM = 1e-12


class LinkerError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ConceptRecord:
    """One concept: canonical name plus per-synonym embedding vectors."""

    mesh_id: str
    name: str
    synonyms: tuple[str, ...]
    embeddings: np.ndarray  # (n_synonyms, d) float32

    def __post_init__(self):
        emb = np.asarray(self.embeddings, dtype=np.float32)
        if emb.ndim != 2 or emb.shape[0] != len(self.synonyms):
            raise LinkerError(
                f"concept {self.mesh_id!r}: need one embedding per synonym, "
                f"got shape {emb.shape} for {len(self.synonyms)} synonyms"
            )
        object.__setattr__(self, "embeddings", emb)


@dataclass(frozen=True, eq=False)
class ConceptIndex:
    """Flat (mesh_id, synonym, unit vector) entries in load order."""

    dim: int
    ids: tuple[str, ...]
    names: tuple[str, ...]
    vectors: np.ndarray  # (n, dim) float32, unit rows

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class Hit:
    mesh_id: str
    synonym: str
    score: float


@dataclass(frozen=True)
class LinkResult:
    query_id: str
    mention: str
    top_k: tuple[tuple[str, float], ...]
    linked_id: str | None


@dataclass(frozen=True)
class RefineConfig:
    """Hyperparameters for embedding refinement.

    The margin default is this library's choice; batching is fully
    determined by rng_seed.
    """

    margin: float = 0.2
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 16
    rng_seed: int = 0

    def __post_init__(self):
        if not self.margin > 0:
            raise LinkerError(f"margin must be positive, got {self.margin}")
        if self.learning_rate < 0:
            raise LinkerError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise LinkerError("epochs and batch_size must be positive")


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Mutable-in-spirit table of (mesh_id, synonym, vector) rows; the
    refinement output is a new table, never an in-place edit."""

    ids: tuple[str, ...]
    names: tuple[str, ...]
    vectors: np.ndarray  # (n, d) float32

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return vectors / norms


def build_index(records) -> ConceptIndex:
    """Normalize and flatten concept records into a searchable index.

    Rejects zero vectors, dimension mismatches, and duplicate
    (mesh_id, synonym) pairs; the same synonym under two different
    concepts is two legitimate entries.
    """
    ids: list[str] = []
    names: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[tuple[str, str]] = set()
    dim: int | None = None
    for rec in records:
        for synonym, vec in zip(rec.synonyms, rec.embeddings):
            key = (rec.mesh_id, synonym)
            if key in seen:
                raise LinkerError(f"duplicate entry for ({rec.mesh_id!r}, {synonym!r})")
            seen.add(key)
            if dim is None:
                dim = int(vec.shape[0])
                if dim < 1:
                    raise LinkerError("embedding dimension must be at least 1")
            elif vec.shape[0] != dim:
                raise LinkerError(
                    f"({rec.mesh_id!r}, {synonym!r}): dimension {vec.shape[0]} != {dim}"
                )
            if np.linalg.norm(vec) < _ZERO_NORM:
                raise LinkerError(f"zero embedding for ({rec.mesh_id!r}, {synonym!r})")
            ids.append(rec.mesh_id)
            names.append(synonym)
            rows.append(np.asarray(vec, dtype=np.float64))
    if not rows:
        raise LinkerError("cannot build an empty index")
    vectors = _unit_rows(np.stack(rows)).astype(np.float32)
    return ConceptIndex(dim=dim, ids=tuple(ids), names=tuple(names), vectors=vectors)


def _prepare_query(index: ConceptIndex, query) -> np.ndarray:
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != index.dim:
        raise LinkerError(f"query dimension {q.shape[0]} != index dimension {index.dim}")
    norm = np.linalg.norm(q)
    if norm < _ZERO_NORM:
        raise LinkerError("zero query vector")
    return q / norm


def nearest(index: ConceptIndex, query, k: int) -> list[Hit]:
    """Exact top-k by exhaustive cosine scan.

    Ordering is fully deterministic: score descending, then mesh_id
    ascending, then load order. k larger than the index returns
    everything, sorted.
    """
    if k < 1:
        raise LinkerError(f"k must be positive, got {k}")
    q = _prepare_query(index, query)
    scores = index.vectors.astype(np.float64) @ q
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.ids[i], i))
    return [Hit(index.ids[i], index.names[i], float(scores[i])) for i in order[:k]]


def link_mention(index: ConceptIndex, query, *, threshold: float | None = None,
                 k: int = 5, query_id: str = "", mention: str = "") -> LinkResult:
    """Link a mention embedding to its best concept.

    With no threshold the top hit always links, mirroring an
    always-predict linker; with a threshold the result may be unlinked
    while top_k stays populated.
    """
    hits = nearest(index, query, k)
    top_k = tuple((h.mesh_id, h.score) for h in hits)
    linked = None
    if hits and (threshold is None or hits[0].score >= threshold):
        linked = hits[0].mesh_id
    return LinkResult(query_id=query_id, mention=mention, top_k=top_k, linked_id=linked)


# ---------------------------------------------------------------------------
# Self-alignment refinement


@dataclass(frozen=True, eq=False)
class PairBatch:
    """A mini batch of (anchor, positive) synonym pairs.

    Flat vector layout interleaves pairs: index 2k is the anchor of pair
    k, index 2k+1 its positive. concept_ids[k] labels both.
    """

    anchors: np.ndarray    # (B, d)
    positives: np.ndarray  # (B, d)
    concept_ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.concept_ids) != self.anchors.shape[0] or \
                self.anchors.shape != self.positives.shape:
            raise LinkerError("batch arrays and concept ids disagree in length")

    def __len__(self) -> int:
        return len(self.concept_ids)

    def flat_vectors(self) -> np.ndarray:
        flat = np.empty((2 * len(self), self.anchors.shape[1]), dtype=np.float64)
        flat[0::2] = self.anchors
        flat[1::2] = self.positives
        return flat


def _cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _unit_rows(a) @ _unit_rows(b).T


def mine_hard_triplets(batch: PairBatch, margin: float) -> list[tuple[int, int, int]]:
    """Hard-negative triplets (anchor, positive, negative) as flat indices.

    For pair k, every flat vector n from a different concept with
    cos(a_k, n) > cos(a_k, p_k) - margin yields (2k, 2k+1, n). Output is
    ordered by (anchor index, negative index).
    """
    if len(batch) < 2:
        return []
    flat = batch.flat_vectors()
    cos = _cosine_matrix(batch.anchors, flat)          # (B, 2B)
    cos_ap = np.array([cos[k, 2 * k + 1] for k in range(len(batch))])
    triplets: list[tuple[int, int, int]] = []
    for k in range(len(batch)):
        for n in range(flat.shape[0]):
            if batch.concept_ids[n // 2] == batch.concept_ids[k]:
                continue
            if cos[k, n] > cos_ap[k] - margin:
                triplets.append((2 * k, 2 * k + 1, n))
    return triplets


def sap_loss(vectors: np.ndarray, triplets, margin: float) -> float:
    """Hinge loss over a fixed triplet set; cosines are computed on the
    normalized vectors, so the function is well defined off the sphere."""
    if not triplets:
        return 0.0
    u = _unit_rows(np.asarray(vectors, dtype=np.float64))
    total = 0.0
    for a, p, n in triplets:
        total += max(0.0, float(u[a] @ u[n] - u[a] @ u[p]) + margin)
    return total


def sap_loss_grad(batch: PairBatch, margin: float,
                  triplets: list[tuple[int, int, int]] | None = None) -> np.ndarray:
    """Analytic gradient of sap_loss w.r.t. every flat batch vector.

    The triplet set is mined once and held fixed. For an active triplet,
    with u = w/|w| denoting the normalized vectors,

        dL/du_a = u_n - u_p,   dL/du_p = -u_a,   dL/du_n = u_a,

    and each is pulled back through the normalization:
    dL/dw = (I - u u^T) dL/du / |w|.
    """
    flat = batch.flat_vectors()
    if triplets is None:
        triplets = mine_hard_triplets(batch, margin)
    norms = np.linalg.norm(flat, axis=1)
    u = flat / norms[:, None]
    grad_u = np.zeros_like(u)
    for a, p, n in triplets:
        term = float(u[a] @ u[n] - u[a] @ u[p]) + margin
        if term > 0.0:
            grad_u[a] += u[n] - u[p]
            grad_u[p] -= u[a]
            grad_u[n] += u[a]
    # Project onto each vector's tangent space and undo the norm scaling.
    radial = np.sum(grad_u * u, axis=1, keepdims=True)
    return (grad_u - radial * u) / norms[:, None]


def synonym_pairs(ids) -> list[tuple[int, int]]:
    """All ordered same-concept row pairs, in first-appearance order."""
    by_id: dict[str, list[int]] = {}
    for i, mesh_id in enumerate(ids):
        by_id.setdefault(mesh_id, []).append(i)
    pairs: list[tuple[int, int]] = []
    for rows in by_id.values():
        for i in rows:
            for j in rows:
                if i != j:
                    pairs.append((i, j))
    return pairs


def refine_embeddings(table: EmbeddingTable, config: RefineConfig,
                      pairs: list[tuple[int, int]] | None = None,
                      ) -> tuple[EmbeddingTable, list[float]]:
    """Gradient descent on the embedding table; returns the new table and
    the per-epoch loss trace.

    Pairs default to every ordered same-concept synonym pair. Batching is
    seeded and fixed across epochs, so a zero learning rate reproduces the
    input exactly with a constant trace.
    """
    if len(set(table.ids)) < 2:
        raise LinkerError("refinement needs at least two distinct concepts")
    if pairs is None:
        pairs = synonym_pairs(table.ids)
    if not pairs:
        raise LinkerError("no same-concept synonym pairs to train on")

    work = _unit_rows(np.asarray(table.vectors, dtype=np.float64))
    rng = np.random.default_rng(config.rng_seed)
    order = rng.permutation(len(pairs))
    batches = [order[i:i + config.batch_size] for i in range(0, len(order), config.batch_size)]

    trace: list[float] = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for batch_idx in batches:
            batch_pairs = [pairs[i] for i in batch_idx]
            anchor_rows = [i for i, _ in batch_pairs]
            positive_rows = [j for _, j in batch_pairs]
            batch = PairBatch(
                anchors=work[anchor_rows],
                positives=work[positive_rows],
                concept_ids=tuple(table.ids[i] for i in anchor_rows),
            )
            triplets = mine_hard_triplets(batch, config.margin)
            epoch_loss += sap_loss(batch.flat_vectors(), triplets, config.margin)
            if not triplets or config.learning_rate == 0.0:
                continue
            grads = sap_loss_grad(batch, config.margin, triplets)
            # flat index 2k / 2k+1 maps back to the pair's table rows
            row_of_flat = [r for pair in batch_pairs for r in pair]
            np.add.at(work, row_of_flat, -config.learning_rate * grads)
            touched = sorted(set(row_of_flat))
            work[touched] = _unit_rows(work[touched])
        trace.append(epoch_loss)

    refined = EmbeddingTable(table.ids, table.names, work.astype(np.float32))
    return refined, trace


# ---------------------------------------------------------------------------
# Geometry measurements (used by the demo script and acceptance checks)


def concept_cosine_stats(table: EmbeddingTable) -> tuple[float, float]:
    """(mean intra-concept cosine, mean inter-concept cosine) over all
    unordered row pairs."""
    u = _unit_rows(np.asarray(table.vectors, dtype=np.float64))
    cos = u @ u.T
    intra, inter = [], []
    n = len(table)
    for i in range(n):
        for j in range(i + 1, n):
            (intra if table.ids[i] == table.ids[j] else inter).append(cos[i, j])
    mean = lambda xs: float(np.mean(xs)) if xs else 0.0
    return mean(intra), mean(inter)


def leave_one_out_accuracy(table: EmbeddingTable) -> float:
    """Fraction of rows whose nearest other row shares their concept,
    measured with this module's own search."""
    correct = 0
    for i in range(len(table)):
        rest = [j for j in range(len(table)) if j != i]
        sub = ConceptIndex(
            dim=table.dim,
            ids=tuple(table.ids[j] for j in rest),
            names=tuple(table.names[j] for j in rest),
            vectors=_unit_rows(np.asarray(table.vectors[rest], dtype=np.float64)).astype(np.float32),
        )
        hit = nearest(sub, table.vectors[i], 1)[0]
        if hit.mesh_id == table.ids[i]:
            correct += 1
    return correct / len(table)


# ---------------------------------------------------------------------------
# File formats


def _format_value(v) -> str:
    return np.format_float_positional(np.float32(v), unique=True, trim="0")


def load_embedding_tsv(path) -> EmbeddingTable:
    path = str(path)
    ids: list[str] = []
    names: list[str] = []
    rows: list[list[float]] = []
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("#dim="):
            raise LinkerError(f"{path}: first line must be '#dim=<d>', got {header!r}")
        try:
            dim = int(header[len("#dim="):])
        except ValueError as exc:
            raise LinkerError(f"{path}: bad dimension in header {header!r}") from exc
        for line_no, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise LinkerError(f"{path}: line {line_no}: expected 3 tab-separated columns")
            values = parts[2].split()
            if len(values) != dim:
                raise LinkerError(
                    f"{path}: line {line_no}: {len(values)} values for dimension {dim}"
                )
            try:
                rows.append([float(v) for v in values])
            except ValueError as exc:
                raise LinkerError(f"{path}: line {line_no}: bad number") from exc
            ids.append(parts[0])
            names.append(parts[1])
    if not rows:
        raise LinkerError(f"{path}: no embedding rows")
    return EmbeddingTable(tuple(ids), tuple(names), np.asarray(rows, dtype=np.float32))


def write_embedding_tsv(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#dim={table.dim}\n")
        for mesh_id, name, vec in zip(table.ids, table.names, table.vectors):
            fh.write(f"{mesh_id}\t{name}\t{' '.join(_format_value(v) for v in vec)}\n")


def records_from_table(table: EmbeddingTable) -> list[ConceptRecord]:
    """Group table rows into concept records; the first synonym seen for a
    concept becomes its canonical name."""
    grouped: dict[str, tuple[list[str], list[np.ndarray]]] = {}
    for mesh_id, name, vec in zip(table.ids, table.names, table.vectors):
        syns, vecs = grouped.setdefault(mesh_id, ([], []))
        syns.append(name)
        vecs.append(vec)
    return [
        ConceptRecord(mesh_id=mid, name=syns[0], synonyms=tuple(syns),
                      embeddings=np.stack(vecs))
        for mid, (syns, vecs) in grouped.items()
    ]


def index_to_table(index: ConceptIndex) -> EmbeddingTable:
    return EmbeddingTable(index.ids, index.names, index.vectors)


def write_link_results(results, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            obj = {
                "query_id": r.query_id,
                "mention": r.mention,
                "top_k": [{"mesh_id": m, "score": s} for m, s in r.top_k],
                "linked_id": r.linked_id,
            }
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
