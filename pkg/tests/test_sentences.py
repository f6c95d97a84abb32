import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chempipe.corpus import Annotation, Document, Passage
from chempipe.sentences import (
    boundary_conflicts,
    document_sentences,
    split_sentences,
)


def texts(spans, text):
    return [text[s.start:s.end] for s in spans]


def test_two_sentences():
    text = "Aspirin works. It is cheap."
    spans = split_sentences(text)
    assert texts(spans, text) == ["Aspirin works.", "It is cheap."]


def test_empty_input():
    assert split_sentences("") == []


def test_no_terminal_punctuation_single_span():
    text = "no terminal punctuation"
    spans = split_sentences(text)
    assert len(spans) == 1
    assert (spans[0].start, spans[0].length) == (0, len(text))


@pytest.mark.parametrize("text,expected", [
    ("It rose 4-fold. Then it fell.", 2),
    ("Is it safe? Yes it is.", 2),
    ("Amazing! Truly.", 2),
    ("See Fig. 3 for details. Next point.", 2),       # Fig guard holds inside
    ("Dosage was 5 mg vs. 10 mg control.", 1),        # vs guard
    ("Chemicals, e.g. Water, are common.", 1),        # e.g guard
    ("The acid, i.e. HCl, was added.", 1),            # i.e guard
    ("J. Smith reported it.", 1),                     # single initial guard
    ("Smith et al. 2020 found this.", 1),             # et al before digits
    ("It ended. but lowercase continues", 1),         # no uppercase after split
    ("Done.No space means no split.", 1),
])
def test_boundary_rule_cases(text, expected):
    assert len(split_sentences(text)) == expected


def test_spans_cover_all_non_whitespace():
    text = "  One here.  Two there!  Three?  "
    spans = split_sentences(text)
    covered = set()
    for s in spans:
        covered.update(range(s.start, s.end))
    for i, ch in enumerate(text):
        if not ch.isspace():
            assert i in covered


def test_gap_between_spans_is_whitespace():
    text = "First one.   Second one."
    spans = split_sentences(text)
    for a, b in zip(spans, spans[1:]):
        assert text[a.end:b.start].isspace() or a.end == b.start


_alphabet = string.ascii_letters + string.digits + " .!?,"


@settings(max_examples=200)
@given(st.text(alphabet=_alphabet, max_size=120))
def test_splitting_is_idempotent_per_sentence(text):
    for span in split_sentences(text):
        sent = text[span.start:span.end]
        again = split_sentences(sent)
        assert len(again) == 1
        assert (again[0].start, again[0].length) == (0, len(sent))


@settings(max_examples=200)
@given(st.text(alphabet=_alphabet, max_size=120))
def test_spans_are_ordered_and_disjoint(text):
    spans = split_sentences(text)
    for a, b in zip(spans, spans[1:]):
        assert a.end <= b.start
    for s in spans:
        assert s.length > 0
        assert not text[s.start].isspace()
        assert not text[s.end - 1].isspace()


def test_document_sentences_use_document_coordinates():
    doc = Document(
        "d",
        (Passage("title", 0, "Water is wet. "),
         Passage("abstract", 14, "Fire is hot. Ice is cold.")),
        (),
    )
    spans = document_sentences(doc)
    text = doc.text()
    assert texts(spans, text) == ["Water is wet.", "Fire is hot.", "Ice is cold."]


def test_boundary_conflicts_counted_not_dropped():
    text = "Aspirin helps. Ibuprofen also helps."
    doc = Document(
        "d", (Passage("p", 0, text),),
        (
            Annotation(0, 7, "Aspirin"),
            # crosses the sentence boundary
            Annotation(8, 18, "helps. Ibuprofen a"),
        ),
    )
    conflicted = boundary_conflicts(doc)
    assert [a.start for a in conflicted] == [8]
