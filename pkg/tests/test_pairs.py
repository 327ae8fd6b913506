import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newssync.corpus import Corpus
from newssync.pairs import (
    CandidatePair,
    build_inverted_index,
    generate_candidates,
    jaccard,
)

from helpers import art, random_corpus


def oracle_double_loop(corpus, jaccard_min, window_days):
    """Independent brute-force predicate scan (own set arithmetic)."""
    out = set()
    articles = corpus.articles
    for i in range(len(articles)):
        for j in range(i + 1, len(articles)):
            a, b = articles[i], articles[j]
            gap = abs((a.publish_date - b.publish_date).days)
            if gap > window_days:
                continue
            union = len(a.entities | b.entities)
            if union == 0:
                continue
            jac = len(a.entities & b.entities) / union
            if jac > jaccard_min:
                out.add(tuple(sorted((a.id, b.id))))
    return out


class TestJaccard:
    def test_identity(self):
        assert jaccard({"e1", "e2"}, {"e1", "e2"}) == 1.0

    def test_disjoint(self):
        assert jaccard({"e1"}, {"e2"}) == 0.0

    def test_half(self):
        assert jaccard({"e1", "e2", "e3"}, {"e2", "e3", "e4"}) == 0.5

    def test_both_empty(self):
        assert jaccard(set(), set()) == 0.0


class TestInvertedIndex:
    def test_empty_corpus(self):
        assert len(build_inverted_index(Corpus(articles=()))) == 0

    def test_single_article(self):
        corpus = Corpus(articles=(art("a", entities=("e1", "e2")),))
        index = build_inverted_index(corpus)
        assert index.postings == {"e1": ["a"], "e2": ["a"]}

    def test_matches_incidence_scan(self):
        rng = np.random.default_rng(5)
        corpus = random_corpus(rng, 80)
        index = build_inverted_index(corpus)
        expected: dict[str, set] = {}
        for a in corpus.articles:
            for e in a.entities:
                expected.setdefault(e, set()).add(a.id)
        assert {e: set(ids) for e, ids in index.postings.items()} == expected
        for ids in index.postings.values():
            assert ids == sorted(ids) and len(ids) == len(set(ids))


class TestGenerateCandidates:
    def test_window_excludes_six_days(self):
        corpus = Corpus(
            articles=(
                art("a", day="2020-01-01", entities=("e1", "e2")),
                art("b", day="2020-01-07", entities=("e1", "e2")),
            )
        )
        assert list(generate_candidates(corpus, entity_freq_cap=None)) == []

    def test_window_includes_five_days(self):
        corpus = Corpus(
            articles=(
                art("a", day="2020-01-01", entities=("e1", "e2")),
                art("b", day="2020-01-06", entities=("e1", "e2")),
            )
        )
        pairs = list(generate_candidates(corpus, entity_freq_cap=None))
        assert len(pairs) == 1 and pairs[0].date_gap_days == 5

    def test_jaccard_exactly_threshold_excluded(self):
        # |{e1}| / |{e1..e4}| = 0.25 exactly; "exceeding" is strict
        corpus = Corpus(
            articles=(
                art("a", entities=("e1", "e2")),
                art("b", entities=("e1", "e3", "e4")),
            )
        )
        assert jaccard(corpus.articles[0].entities, corpus.articles[1].entities) == 0.25
        assert list(generate_candidates(corpus, entity_freq_cap=None)) == []

    def test_equals_brute_force_oracle(self):
        rng = np.random.default_rng(17)
        for trial in range(5):
            corpus = random_corpus(rng, 200, n_entities=30, day_span=15)
            got = {
                (p.id_a, p.id_b)
                for p in generate_candidates(corpus, entity_freq_cap=None)
            }
            assert got == oracle_double_loop(corpus, 0.25, 5)

    def test_symmetric_under_input_order(self):
        rng = np.random.default_rng(23)
        corpus = random_corpus(rng, 120, n_entities=25)
        reversed_corpus = Corpus(articles=tuple(reversed(corpus.articles)))
        a = {(p.id_a, p.id_b, p.jaccard) for p in generate_candidates(corpus, entity_freq_cap=None)}
        b = {
            (p.id_a, p.id_b, p.jaccard)
            for p in generate_candidates(reversed_corpus, entity_freq_cap=None)
        }
        assert a == b

    def test_monotonic_in_thresholds(self):
        rng = np.random.default_rng(29)
        corpus = random_corpus(rng, 150, n_entities=25)
        base = {(p.id_a, p.id_b) for p in generate_candidates(corpus, 0.25, 5, None)}
        stricter_j = {(p.id_a, p.id_b) for p in generate_candidates(corpus, 0.4, 5, None)}
        stricter_w = {(p.id_a, p.id_b) for p in generate_candidates(corpus, 0.25, 2, None)}
        assert stricter_j <= base and stricter_w <= base

    def test_entity_cap_skips_ubiquitous_seeding(self):
        # a and b share only the ubiquitous entity: found without the cap,
        # missed with it (the documented recall tradeoff of the cap)
        filler = tuple(
            art(f"f{i}", entities=("common", f"x{i}", f"y{i}")) for i in range(20)
        )
        corpus = Corpus(
            articles=(art("a", entities=("common",)), art("b", entities=("common",)), *filler)
        )
        with_cap = {(p.id_a, p.id_b) for p in generate_candidates(corpus, entity_freq_cap=0.1)}
        without = {(p.id_a, p.id_b) for p in generate_candidates(corpus, entity_freq_cap=None)}
        assert ("a", "b") not in with_cap
        assert ("a", "b") in without

    def test_emitted_once_in_canonical_order(self):
        corpus = Corpus(
            articles=(art("b", entities=("e1", "e2")), art("a", entities=("e1", "e2")))
        )
        pairs = list(generate_candidates(corpus, entity_freq_cap=None))
        assert [(p.id_a, p.id_b) for p in pairs] == [("a", "b")]

    def test_invalid_thresholds(self):
        corpus = Corpus(articles=())
        with pytest.raises(ValueError):
            list(generate_candidates(corpus, jaccard_min=1.0))
        with pytest.raises(ValueError):
            list(generate_candidates(corpus, window_days=-1))


def test_candidate_pair_rejects_non_canonical():
    with pytest.raises(ValueError):
        CandidatePair(id_a="b", id_b="a", jaccard=0.5, date_gap_days=0)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=40))
def test_index_equals_brute_force_property(seed, n):
    rng = np.random.default_rng(seed)
    corpus = random_corpus(rng, n, n_entities=12, max_entities_per_article=6, day_span=10)
    got = {(p.id_a, p.id_b) for p in generate_candidates(corpus, entity_freq_cap=None)}
    assert got == oracle_double_loop(corpus, 0.25, 5)
