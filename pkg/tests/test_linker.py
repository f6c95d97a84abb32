import math

import numpy as np
import pytest

from chempipe.linker import (
    ConceptRecord,
    EmbeddingTable,
    LinkerError,
    PairBatch,
    RefineConfig,
    build_index,
    concept_cosine_stats,
    index_to_table,
    leave_one_out_accuracy,
    link_mention,
    load_embedding_tsv,
    mine_hard_triplets,
    nearest,
    records_from_table,
    refine_embeddings,
    sap_loss,
    sap_loss_grad,
    synonym_pairs,
    write_embedding_tsv,
)


def record(mesh_id, vectors, name=None):
    vectors = np.asarray(vectors, dtype=np.float32)
    synonyms = tuple(f"{mesh_id}-syn{i}" for i in range(vectors.shape[0]))
    return ConceptRecord(mesh_id, name or synonyms[0], synonyms, vectors)


def random_table(seed, concepts=3, synonyms=4, dim=16) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    ids, names, rows = [], [], []
    for c in range(concepts):
        for s in range(synonyms):
            ids.append(f"D{c + 1:06d}")
            names.append(f"c{c}s{s}")
            rows.append(rng.normal(size=dim))
    vecs = np.stack(rows)
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return EmbeddingTable(tuple(ids), tuple(names), vecs.astype(np.float32))


# --- index construction -----------------------------------------------------

def test_build_index_flattens_synonyms():
    rng = np.random.default_rng(0)
    records = [record(f"D{i}", rng.normal(size=(2, 4))) for i in range(3)]
    index = build_index(records)
    assert len(index) == 6
    assert np.allclose(np.linalg.norm(index.vectors, axis=1), 1.0, atol=1e-6)


def test_build_index_rejects_zero_vector():
    with pytest.raises(LinkerError, match="zero embedding"):
        build_index([record("D1", [[0.0, 0.0]])])


def test_build_index_rejects_dimension_mismatch():
    with pytest.raises(LinkerError, match="dimension"):
        build_index([record("D1", [[1.0, 0.0]]), record("D2", [[1.0, 0.0, 0.0]])])


def test_build_index_rejects_duplicate_pair():
    rec = ConceptRecord("D1", "a", ("a", "a"), np.ones((2, 3), dtype=np.float32))
    with pytest.raises(LinkerError, match="duplicate"):
        build_index([rec])


def test_same_synonym_under_two_concepts_is_fine():
    r1 = ConceptRecord("D1", "water", ("water",), np.array([[1.0, 0]], dtype=np.float32))
    r2 = ConceptRecord("D2", "water", ("water",), np.array([[0.0, 1]], dtype=np.float32))
    assert len(build_index([r1, r2])) == 2


# --- nearest neighbors ------------------------------------------------------

def two_entry_index():
    return build_index([
        record("A0001", [[1.0, 0.0]]),
        record("B0001", [[0.0, 1.0]]),
    ])


def test_stored_vector_query_scores_one():
    index = two_entry_index()
    hits = nearest(index, [1.0, 0.0], 1)
    assert hits[0].mesh_id == "A0001"
    assert hits[0].score == pytest.approx(1.0, abs=1e-6)


def test_hand_cosines_two_entries():
    hits = nearest(two_entry_index(), [1.0, 0.0], 2)
    assert [(h.mesh_id, round(h.score, 9)) for h in hits] == [("A0001", 1.0), ("B0001", 0.0)]


def test_k_larger_than_index_returns_everything():
    assert len(nearest(two_entry_index(), [0.6, 0.8], 10)) == 2


def test_zero_query_rejected():
    with pytest.raises(LinkerError, match="zero query"):
        nearest(two_entry_index(), [0.0, 0.0], 1)


def test_dim_mismatch_rejected():
    with pytest.raises(LinkerError, match="dimension"):
        nearest(two_entry_index(), [1.0, 0.0, 0.0], 1)


def test_score_tie_broken_by_mesh_id():
    index = build_index([
        record("B0002", [[1.0, 0.0]]),
        record("A0002", [[1.0, 0.0]]),
    ])
    hits = nearest(index, [1.0, 0.0], 2)
    assert [h.mesh_id for h in hits] == ["A0002", "B0002"]


def test_exhaustive_scan_agreement():
    rng = np.random.default_rng(11)
    table = EmbeddingTable(
        tuple(f"D{i:04d}" for i in range(200)),
        tuple(f"s{i}" for i in range(200)),
        rng.normal(size=(200, 8)).astype(np.float32),
    )
    index = build_index(records_from_table(table))
    query = rng.normal(size=8)
    hits = nearest(index, query, len(index))
    q = query / np.linalg.norm(query)
    expected = sorted(
        ((float(np.dot(index.vectors[i].astype(np.float64), q)), index.ids[i], i)
         for i in range(len(index))),
        key=lambda t: (-t[0], t[1], t[2]))
    assert [h.score for h in hits] == pytest.approx([e[0] for e in expected], abs=1e-6)
    assert [h.mesh_id for h in hits] == [e[1] for e in expected]


def test_cosine_scores_stay_in_unit_range():
    rng = np.random.default_rng(21)
    table = EmbeddingTable(
        tuple(f"D{i:04d}" for i in range(50)),
        tuple(f"s{i}" for i in range(50)),
        rng.normal(size=(50, 12)).astype(np.float32),
    )
    index = build_index(records_from_table(table))
    for _ in range(10):
        hits = nearest(index, rng.normal(size=12), len(index))
        assert all(-1 - 1e-6 <= h.score <= 1 + 1e-6 for h in hits)


def test_normalization_is_idempotent():
    rng = np.random.default_rng(22)
    vecs = rng.normal(size=(20, 6))
    once = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    index1 = build_index(records_from_table(
        EmbeddingTable(tuple(f"D{i}" for i in range(20)),
                       tuple(f"s{i}" for i in range(20)), vecs.astype(np.float32))))
    index2 = build_index(records_from_table(
        EmbeddingTable(tuple(f"D{i}" for i in range(20)),
                       tuple(f"s{i}" for i in range(20)), once.astype(np.float32))))
    assert np.allclose(index1.vectors, index2.vectors, atol=1e-6)


# --- linking ----------------------------------------------------------------

def test_link_above_threshold():
    result = link_mention(two_entry_index(), [1.0, 0.1], threshold=0.5, k=2)
    assert result.linked_id == "A0001"


def test_link_below_threshold_keeps_topk():
    result = link_mention(two_entry_index(), [0.7, 0.714], threshold=0.99, k=2)
    assert result.linked_id is None
    assert len(result.top_k) == 2


def test_link_without_threshold_always_links():
    result = link_mention(two_entry_index(), [0.1, 0.9])
    assert result.linked_id == "B0001"


# --- hard-example mining and loss -------------------------------------------

def unit(*values):
    v = np.asarray(values, dtype=np.float64)
    return v / np.linalg.norm(v)


def batch_from_angles(pairs):
    """pairs: list of (anchor angle, positive angle, concept id) on the circle."""
    anchors = np.stack([unit(math.cos(a), math.sin(a)) for a, _, _ in pairs])
    positives = np.stack([unit(math.cos(p), math.sin(p)) for _, p, _ in pairs])
    return PairBatch(anchors, positives, tuple(cid for _, _, cid in pairs))


def test_mining_empty_when_margins_satisfied():
    # anchors aligned with their positives, negatives opposite
    batch = batch_from_angles([(0.0, 0.0, "A"), (math.pi, math.pi, "B")])
    assert mine_hard_triplets(batch, 0.2) == []


def test_mining_includes_violating_negative():
    # cos(a, p) = 0.5, cos(a, n) = 0.6: 0.6 > 0.5 - 0.2, so the triplet mines
    ap, an = math.acos(0.5), math.acos(0.6)
    batch = batch_from_angles([(0.0, ap, "A"), (an, an, "B")])
    triplets = mine_hard_triplets(batch, 0.2)
    assert (0, 1, 2) in triplets


def test_mining_threshold_is_strict_inequality():
    # cos(a, n) exactly equal to cos(a, p) - margin stays out
    a = unit(1.0, 0.0)
    p = unit(1.0, 0.0)
    n = unit(0.8, math.sqrt(1 - 0.64))
    batch = PairBatch(np.stack([a, n]), np.stack([p, n]), ("A", "B"))
    assert all(t[0] != 0 for t in mine_hard_triplets(batch, 0.2))


def test_single_pair_has_no_negatives():
    batch = batch_from_angles([(0.0, 0.1, "A")])
    assert mine_hard_triplets(batch, 0.2) == []


def test_loss_empty_triplets_zero():
    batch = batch_from_angles([(0.0, 0.0, "A"), (math.pi, math.pi, "B")])
    assert sap_loss(batch.flat_vectors(), [], 0.2) == 0.0


def test_loss_hand_value():
    # cos(a,p) = 0.9, cos(a,n) = 0.95 -> 0.95 - 0.9 + 0.2 = 0.25
    ap = math.acos(0.9)
    an = math.acos(0.95)
    batch = batch_from_angles([(0.0, ap, "A"), (an, an, "B")])
    triplets = [(0, 1, 2)]
    assert sap_loss(batch.flat_vectors(), triplets, 0.2) == pytest.approx(0.25, abs=1e-12)


def test_loss_zero_iff_no_hard_triplets():
    rng = np.random.default_rng(5)
    for trial in range(20):
        anchors = rng.normal(size=(4, 6))
        positives = rng.normal(size=(4, 6))
        anchors /= np.linalg.norm(anchors, axis=1, keepdims=True)
        positives /= np.linalg.norm(positives, axis=1, keepdims=True)
        ids = tuple(str(rng.integers(0, 3)) for _ in range(4))
        batch = PairBatch(anchors, positives, ids)
        triplets = mine_hard_triplets(batch, 0.2)
        loss = sap_loss(batch.flat_vectors(), triplets, 0.2)
        assert (loss == 0.0) == (len(triplets) == 0)


# --- gradients --------------------------------------------------------------

def fd_gradient(vectors, triplets, margin, h=1e-5):
    """Central finite differences of sap_loss on the fixed triplet set."""
    grad = np.zeros_like(vectors)
    for i in range(vectors.shape[0]):
        for j in range(vectors.shape[1]):
            plus = vectors.copy()
            minus = vectors.copy()
            plus[i, j] += h
            minus[i, j] -= h
            grad[i, j] = (sap_loss(plus, triplets, margin)
                          - sap_loss(minus, triplets, margin)) / (2 * h)
    return grad


def random_batch(seed, pairs=6, dim=8, concepts=3):
    rng = np.random.default_rng(seed)
    anchors = rng.normal(size=(pairs, dim))
    positives = rng.normal(size=(pairs, dim))
    anchors /= np.linalg.norm(anchors, axis=1, keepdims=True)
    positives /= np.linalg.norm(positives, axis=1, keepdims=True)
    ids = tuple(str(rng.integers(0, concepts)) for _ in range(pairs))
    return PairBatch(anchors, positives, ids)


def relative_error(a, b):
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def test_zero_loss_batch_has_zero_gradient():
    batch = batch_from_angles([(0.0, 0.0, "A"), (math.pi, math.pi, "B")])
    grads = sap_loss_grad(batch, 0.2)
    assert np.all(grads == 0.0)


def test_gradient_matches_finite_differences():
    worst = 0.0
    for seed in range(30):
        batch = random_batch(seed)
        triplets = mine_hard_triplets(batch, 0.2)
        analytic = sap_loss_grad(batch, 0.2, triplets)
        numeric = fd_gradient(batch.flat_vectors(), triplets, 0.2)
        worst = max(worst, relative_error(analytic, numeric))
    assert worst < 1e-4


def test_gradient_single_triplet_matches_hand_derivation():
    """On the unit circle, parametrize each vector by its angle. With
    a = (cos t, sin t), cos(a, n) - cos(a, p) = cos(t - tn) - cos(t - tp),
    so dL/dt = sin(t - tp) - sin(t - tn), and the Cartesian gradient is
    that times the tangent (-sin t, cos t). Derived by hand, no autodiff.
    """
    ta, tp_, tn = 0.3, 1.1, 0.7  # active: cos(a,n) > cos(a,p) - margin
    batch = batch_from_angles([(ta, tp_, "A"), (tn, tn, "B")])
    margin = 0.2
    triplets = [(0, 1, 2)]
    grads = sap_loss_grad(batch, margin, triplets)

    dL_dta = math.sin(ta - tp_) - math.sin(ta - tn)
    tangent_a = np.array([-math.sin(ta), math.cos(ta)])
    assert grads[0] == pytest.approx(dL_dta * tangent_a, abs=1e-12)

    dL_dtp = math.sin(tp_ - ta)
    tangent_p = np.array([-math.sin(tp_), math.cos(tp_)])
    assert grads[1] == pytest.approx(dL_dtp * tangent_p, abs=1e-12)

    dL_dtn = -math.sin(tn - ta)
    tangent_n = np.array([-math.sin(tn), math.cos(tn)])
    assert grads[2] == pytest.approx(dL_dtn * tangent_n, abs=1e-12)


def test_gradient_is_tangent_to_sphere():
    batch = random_batch(42)
    grads = sap_loss_grad(batch, 0.2)
    flat = batch.flat_vectors()
    radial = np.sum(grads * flat, axis=1)
    assert np.max(np.abs(radial)) < 1e-12


# --- refinement -------------------------------------------------------------

def test_synonym_pairs_ordered_within_concepts():
    pairs = synonym_pairs(("A", "A", "B"))
    assert pairs == [(0, 1), (1, 0)]


def test_refine_rejects_single_concept():
    table = random_table(0, concepts=1)
    with pytest.raises(LinkerError, match="two distinct concepts"):
        refine_embeddings(table, RefineConfig())


def test_refine_config_validation():
    with pytest.raises(LinkerError):
        RefineConfig(margin=0.0)
    with pytest.raises(LinkerError):
        RefineConfig(learning_rate=-0.1)
    with pytest.raises(LinkerError):
        RefineConfig(epochs=0)
    # zero learning rate is legal: it is the documented identity case
    RefineConfig(learning_rate=0.0)


def test_refine_zero_learning_rate_is_identity():
    table = random_table(1)
    config = RefineConfig(learning_rate=0.0, epochs=5, rng_seed=3)
    refined, trace = refine_embeddings(table, config)
    assert np.array_equal(refined.vectors, table.vectors)
    assert len(set(trace)) == 1


def test_refine_is_deterministic_given_seed():
    table = random_table(2)
    config = RefineConfig(epochs=4, rng_seed=9)
    out1, trace1 = refine_embeddings(table, config)
    out2, trace2 = refine_embeddings(table, config)
    assert np.array_equal(out1.vectors, out2.vectors)
    assert trace1 == trace2


def test_refine_keeps_vectors_normalized():
    table = random_table(3)
    refined, _ = refine_embeddings(table, RefineConfig(epochs=5))
    assert np.allclose(np.linalg.norm(refined.vectors, axis=1), 1.0, atol=1e-6)


def test_refine_toy_set_learns_geometry():
    table = random_table(0)
    intra_before, inter_before = concept_cosine_stats(table)
    refined, trace = refine_embeddings(table, RefineConfig())
    intra_after, inter_after = concept_cosine_stats(refined)
    assert trace[-1] <= trace[0]
    assert intra_after > intra_before
    assert inter_after <= inter_before
    assert leave_one_out_accuracy(refined) == 1.0


# --- TSV formats ------------------------------------------------------------

def test_embedding_tsv_round_trip(tmp_path):
    table = random_table(4)
    path = tmp_path / "emb.tsv"
    write_embedding_tsv(table, path)
    back = load_embedding_tsv(path)
    assert back.ids == table.ids
    assert back.names == table.names
    assert np.array_equal(back.vectors, table.vectors)
    again = tmp_path / "emb2.tsv"
    write_embedding_tsv(back, again)
    assert path.read_bytes() == again.read_bytes()


def test_tsv_header_required(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("D1\ta\t1 0\n", encoding="utf-8")
    with pytest.raises(LinkerError, match="#dim"):
        load_embedding_tsv(path)


def test_tsv_wrong_arity_reports_line(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("#dim=2\nD1\ta\t1 0 0\n", encoding="utf-8")
    with pytest.raises(LinkerError, match="line 2"):
        load_embedding_tsv(path)


def test_records_round_trip_through_index(tmp_path):
    table = random_table(5)
    index = build_index(records_from_table(table))
    assert index.ids == table.ids
    assert index.names == table.names
    assert index_to_table(index).dim == table.dim
