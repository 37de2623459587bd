import random

import pytest
from hypothesis import given, strategies as st

from radlabel.extraction import extract_mentions
from radlabel.ingest import make_document
from radlabel.observations import BY_SLUG

from conftest import build_ruleset


def oracle_leftmost_longest(lowers, phrase_tuples):
    """Enumerate every matching span, then apply leftmost-longest selection."""
    candidates = []
    for phrase in phrase_tuples:
        for start in range(len(lowers) - len(phrase) + 1):
            if tuple(lowers[start:start + len(phrase)]) == phrase:
                candidates.append((start, start + len(phrase)))
    chosen = []
    for start, end in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]))):
        if all(end <= s or start >= e for s, e in chosen):
            chosen.append((start, end))
    return sorted(chosen)


def spans_for(doc, ruleset, slug):
    return [
        (m.start, m.end)
        for m in extract_mentions(doc, ruleset)
        if m.observation == BY_SLUG[slug]
    ]


class TestExamples:
    def test_two_observations_in_one_sentence(self, kernel_impl):
        ruleset = build_ruleset(
            {"pleural_effusion": ["effusions"], "lung_opacity": ["opacities"]}
        )
        doc = make_document("r", "moderate bilateral effusions and bibasilar opacities")
        mentions = extract_mentions(doc, ruleset)
        assert [(m.observation.slug, m.start, m.end) for m in mentions] == [
            ("pleural_effusion", 2, 3),
            ("lung_opacity", 5, 6),
        ]

    def test_empty_phrase_set(self, kernel_impl):
        doc = make_document("r", "anything at all")
        assert extract_mentions(doc, build_ruleset({})) == []

    def test_leftmost_longest_prefers_covering_phrase(self, kernel_impl):
        ruleset = build_ruleset({"pleural_effusion": ["pleural effusion", "effusion"]})
        doc = make_document("r", "small left pleural effusion noted")
        assert spans_for(doc, ruleset, "pleural_effusion") == [(2, 4)]

    def test_cross_observation_overlap_allowed(self, kernel_impl):
        ruleset = build_ruleset(
            {"atelectasis": ["atelectasis"], "consolidation": ["atelectasis versus consolidation"]}
        )
        doc = make_document("r", "atelectasis versus consolidation")
        mentions = extract_mentions(doc, ruleset)
        assert {(m.observation.slug, m.start, m.end) for m in mentions} == {
            ("atelectasis", 0, 1),
            ("consolidation", 0, 3),
        }

    def test_ordering_key(self, kernel_impl):
        ruleset = build_ruleset({"edema": ["edema"], "pneumonia": ["pneumonia"]})
        doc = make_document("r", "pneumonia. edema and pneumonia.")
        mentions = extract_mentions(doc, ruleset)
        keys = [(m.sentence_index, m.start, m.observation.name) for m in mentions]
        assert keys == sorted(keys)

    def test_case_folding(self, kernel_impl):
        ruleset = build_ruleset({"edema": ["pulmonary edema"]})
        doc = make_document("r", "PULMONARY EDEMA suspected")
        assert spans_for(doc, ruleset, "edema") == [(0, 2)]

    def test_matched_phrase_is_recorded(self, kernel_impl):
        ruleset = build_ruleset({"edema": ["pulmonary edema", "edema"]})
        doc = make_document("r", "pulmonary edema")
        (mention,) = extract_mentions(doc, ruleset)
        assert mention.matched_phrase.tokens == ("pulmonary", "edema")


WORDS = ["effusion", "pleural", "small", "edema", "no", "lung", "left"]


def random_case(rng, word):
    return "".join(c.upper() if rng.random() < 0.5 else c for c in word)


class TestOracleEquivalence:
    def test_random_sentences_match_oracle(self, kernel_impl):
        rng = random.Random(8123)
        for _ in range(300):
            n_phrases = rng.randint(1, 5)
            phrases = [
                " ".join(rng.choices(WORDS, k=rng.randint(1, 3))) for _ in range(n_phrases)
            ]
            ruleset = build_ruleset({"edema": phrases})
            words = rng.choices(WORDS, k=rng.randint(1, 12))
            doc = make_document("r", " ".join(words))
            phrase_tuples = {p.tokens for p in ruleset.phrases}
            expected = oracle_leftmost_longest(doc.sentences[0].lowers, phrase_tuples)
            assert spans_for(doc, ruleset, "edema") == expected

    @given(st.lists(st.sampled_from(WORDS), min_size=1, max_size=10), st.randoms())
    def test_casing_never_changes_spans(self, words, rng):
        ruleset = build_ruleset({"edema": ["pleural effusion", "effusion", "edema"]})
        plain = make_document("r", " ".join(words))
        shuffled_case = make_document("r", " ".join(random_case(rng, w) for w in words))
        assert spans_for(plain, ruleset, "edema") == spans_for(shuffled_case, ruleset, "edema")


@given(st.lists(st.sampled_from(WORDS), min_size=1, max_size=12))
def test_per_observation_spans_disjoint(words):
    ruleset = build_ruleset({"edema": ["pleural effusion", "effusion", "edema", "no lung"]})
    doc = make_document("r", " ".join(words))
    spans = spans_for(doc, ruleset, "edema")
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        assert e1 <= s2


def test_mention_span_must_be_nonempty():
    ruleset = build_ruleset({"edema": ["edema"]})
    doc = make_document("r", "edema")
    (mention,) = extract_mentions(doc, ruleset)
    with pytest.raises(ValueError):
        type(mention)(
            observation=mention.observation,
            sentence_index=0,
            start=2,
            end=2,
            matched_phrase=mention.matched_phrase,
        )
