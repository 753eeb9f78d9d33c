import json

import numpy as np
import pytest

from wordgraph.corpus import (
    CorpusFormatError,
    WordPieceVocab,
    ingest,
    select_seed_texts,
    tokenize,
    vocabulary,
)

from helpers import make_corpus
from oracles import oracle_vocab_counts


class TestSimpleTokenizer:
    def test_lowercase_and_punctuation(self):
        assert tokenize("Fake NEWS!") == ["fake", "news"]

    def test_url_collapsed(self):
        assert tokenize("https://t.co/x is fake") == ["<url>", "is", "fake"]

    def test_empty_tokens_dropped(self):
        assert tokenize("!!! ... ???") == []

    def test_inner_punctuation_kept(self):
        assert tokenize("don't panic") == ["don't", "panic"]

    def test_deterministic(self):
        text = "Breaking: THE #covid19 'hoax' spreads https://a.b/c fast..."
        assert tokenize(text) == tokenize(text)


class TestWordPieceTokenizer:
    def test_greedy_longest_match(self):
        vocab = WordPieceVocab({"conspira", "##cies"})
        assert tokenize("conspiracies", mode="wordpiece", wordpiece_vocab=vocab) == [
            "conspira",
            "##cies",
        ]

    def test_unknown_span_becomes_unk(self):
        vocab = WordPieceVocab({"con"})
        assert vocab.segment("xyz") == ["<unk>"]
        assert vocab.segment("conxyz") == ["<unk>"]

    def test_longest_match_preferred(self):
        vocab = WordPieceVocab({"con", "conspira", "##cies", "##spira"})
        assert vocab.segment("conspiracies") == ["conspira", "##cies"]

    def test_vocab_file_missing(self, tmp_path):
        with pytest.raises(CorpusFormatError, match="vocab missing"):
            WordPieceVocab.from_file(tmp_path / "nope.txt")

    def test_vocab_from_file(self, tmp_path):
        p = tmp_path / "vocab.txt"
        p.write_text("fake\n##ry\n")
        vocab = WordPieceVocab.from_file(p)
        assert vocab.segment("fakery") == ["fake", "##ry"]

    def test_mode_requires_vocab(self):
        with pytest.raises(CorpusFormatError):
            tokenize("x", mode="wordpiece")


class TestIngest:
    def test_plain_lines_numbering(self, tmp_path):
        p = tmp_path / "corpus.txt"
        p.write_text("first doc\nsecond doc\nthird doc\n")
        corpus = ingest(p, format="plain-lines")
        assert [d.id for d in corpus] == ["0", "1", "2"]
        assert corpus.documents[1].tokens == ["second", "doc"]

    def test_jsonl_labels(self, tmp_path):
        p = tmp_path / "corpus.jsonl"
        p.write_text(
            '{"id": "t1", "text": "vaccine myth", "labels": ["conspiracy", "sarcasm"]}\n'
        )
        corpus = ingest(p, format="jsonl")
        assert corpus.documents[0].gold_labels == {"conspiracy", "sarcasm"}

    def test_jsonl_missing_field(self, tmp_path):
        p = tmp_path / "corpus.jsonl"
        p.write_text('{"id": "t1"}\n')
        with pytest.raises(CorpusFormatError, match="text"):
            ingest(p, format="jsonl")

    def test_duplicate_id(self, tmp_path):
        p = tmp_path / "corpus.jsonl"
        p.write_text('{"id": "t1", "text": "a"}\n{"id": "t1", "text": "b"}\n')
        with pytest.raises(CorpusFormatError, match="duplicate"):
            ingest(p, format="jsonl")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "corpus.jsonl"
        p.write_text("")
        with pytest.raises(CorpusFormatError, match="empty"):
            ingest(p, format="jsonl")

    def test_csv(self, tmp_path):
        p = tmp_path / "corpus.csv"
        p.write_text('id,text,labels\nt1,"fake cure claim",conspiracy|fake\nt2,weather report,\n')
        corpus = ingest(p, format="csv")
        assert corpus.documents[0].gold_labels == {"conspiracy", "fake"}
        assert corpus.documents[1].gold_labels == set()

    def test_annotated_tweet_scale_file(self, tmp_path):
        # 4573-record file mirroring the multi-label tweet dataset shape.
        p = tmp_path / "tweets.jsonl"
        with p.open("w") as fh:
            for i in range(4573):
                fh.write(
                    json.dumps(
                        {"id": f"tw{i}", "text": f"tweet number {i}", "labels": ["conspiracy"] if i % 3 == 0 else ["other"]}
                    )
                    + "\n"
                )
        corpus = ingest(p, format="jsonl")
        assert len(corpus) == 4573


class TestVocabulary:
    def test_counts_and_doc_freq(self):
        corpus = make_corpus([["a", "b"], ["b"]])
        vocab = vocabulary(corpus)
        assert vocab.counts == {"a": 1, "b": 2}
        assert vocab.doc_freq == {"a": 1, "b": 2}

    def test_empty_corpus(self):
        vocab = vocabulary(make_corpus([]))
        assert len(vocab) == 0

    def test_matches_independent_count_oracle(self):
        rng = np.random.default_rng(5)
        words = [f"tok{i}" for i in range(40)]
        token_lists = [
            [words[j] for j in rng.integers(0, 40, size=rng.integers(1, 30))]
            for _ in range(1000)
        ]
        vocab = vocabulary(make_corpus(token_lists))
        counts, doc_freq = oracle_vocab_counts(token_lists)
        assert dict(vocab.counts) == counts
        assert dict(vocab.doc_freq) == doc_freq

    def test_totals_invariant(self):
        token_lists = [["x", "y", "x"], ["y"], []]
        vocab = vocabulary(make_corpus(token_lists))
        assert sum(vocab.counts.values()) == sum(len(t) for t in token_lists)
        assert all(vocab.counts[t] >= vocab.doc_freq[t] >= 1 for t in vocab.counts)


class TestSelectSeedTexts:
    def test_first_n_rule(self):
        token_lists = [["myth"], ["x"], ["myth"], ["x"], ["x"], ["x"], ["x"], ["myth"]]
        corpus = make_corpus(token_lists)
        picked = select_seed_texts(corpus, ["myth"], n=2)
        assert [d.id for d in picked] == ["0", "2"]

    def test_mode_all_no_cooccurrence(self, caplog):
        corpus = make_corpus([["conspiracy"], ["false"]])
        with caplog.at_level("WARNING"):
            picked = select_seed_texts(corpus, ["conspiracy", "false"], n=5, mode="all")
        assert len(picked) == 0
        assert any("no documents matched" in r.message for r in caplog.records)

    def test_mode_all_requires_every_seed(self):
        corpus = make_corpus([["conspiracy", "false"], ["conspiracy"], ["false", "conspiracy"]])
        picked = select_seed_texts(corpus, ["conspiracy", "false"], n=5, mode="all")
        assert [d.id for d in picked] == ["0", "2"]

    def test_fifty_of_many_matches(self):
        token_lists = [["myth", "etc"] if i % 2 == 0 else ["other"] for i in range(240)]
        corpus = make_corpus(token_lists)
        picked = select_seed_texts(corpus, ["myth"], n=50)
        assert len(picked) == 50

    def test_mode_any_bound_and_dedup(self):
        token_lists = [["a", "b"], ["a"], ["b"], ["a"], ["b"]]
        corpus = make_corpus(token_lists)
        picked = select_seed_texts(corpus, ["a", "b"], n=2, mode="any")
        ids = [d.id for d in picked]
        assert len(ids) == len(set(ids))
        assert len(ids) <= 2 * 2
        assert set(ids) == {"0", "1", "2"}

    def test_output_subset_and_predicate(self):
        rng = np.random.default_rng(9)
        token_lists = [
            [w for w in ["myth", "x", "y", "z"] if rng.random() < 0.4] or ["pad"]
            for _ in range(60)
        ]
        corpus = make_corpus(token_lists)
        picked = select_seed_texts(corpus, ["myth"], n=10)
        source_ids = set(corpus.ids())
        for doc in picked:
            assert doc.id in source_ids
            assert "myth" in doc.token_set()
        assert len(picked) <= 10

    def test_empty_seed_words_rejected(self):
        with pytest.raises(ValueError):
            select_seed_texts(make_corpus([["a"]]), [], n=1)

    def test_shuffle_seed_deterministic(self):
        token_lists = [["myth"] for _ in range(30)]
        corpus = make_corpus(token_lists)
        a = select_seed_texts(corpus, ["myth"], n=5, shuffle_seed=42)
        b = select_seed_texts(corpus, ["myth"], n=5, shuffle_seed=42)
        assert [d.id for d in a] == [d.id for d in b]
        c = select_seed_texts(corpus, ["myth"], n=5, shuffle_seed=1)
        assert {d.id for d in a} != {d.id for d in c}
