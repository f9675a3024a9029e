import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parley.phonetics import graphemes_to_phonemes, normalized_levenshtein
from parley.repair import (
    NoiseParams,
    RetrievalRepairModel,
    augment_phonemes,
    build_corpus_index,
    evaluate_repair,
    generate_training_pairs,
    normalize_text,
    propose_bundle,
    retrieve_alternatives,
    retrieve_by_phonemes,
    write_training_pairs,
)
from parley.model import DeadlineConfig

from oracles import oracle_normalized, scan_retrieve

texts = st.text(alphabet=string.printable, max_size=60)


class TestNormalizeText:
    def test_number_words_become_digits(self):
        assert normalize_text("There are three cars!") == "there are 3 cars"

    def test_compound_number(self):
        # hand-run of the grammar: twenty(20) + one(1) ends the run at "pilots"
        assert normalize_text("twenty one pilots") == "21 pilots"

    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("One hundred and five", "105"),
            ("five and six", "5 and 6"),
            ("nineteen eighty", "19 80"),
            ("a hundred times", "a 100 times"),
            ("two thousand and one", "2001"),
            ("nine hundred ninety nine thousand nine hundred ninety nine", "999999"),
            ("zero three", "0 3"),
            ("Don't stop!", "dont stop"),
            ("Twenty-one, said the cat.", "21 said the cat"),
        ],
    )
    def test_grammar_cases(self, raw, expected):
        assert normalize_text(raw) == expected

    @given(texts)
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, s):
        once = normalize_text(s)
        assert normalize_text(once) == once

    @given(texts)
    @settings(max_examples=200, deadline=None)
    def test_no_uppercase_or_punctuation(self, s):
        out = normalize_text(s)
        assert all(c.islower() or c.isdigit() or c == " " for c in out)
        assert "  " not in out


class TestCorpusIndex:
    def test_dedup_after_normalization(self, lexicon):
        index = build_corpus_index(["Hello.", "hello"], lexicon)
        assert len(index) == 1
        assert index.sentences[0][0] == "hello"

    def test_totality(self, lexicon):
        index = build_corpus_index(["Hi there", "Good morning"], lexicon)
        assert len(index) == 2
        assert all(phones for _, phones in index.sentences)

    def test_empty_input_rejected(self, lexicon):
        with pytest.raises(ValueError, match="empty"):
            build_corpus_index([], lexicon)

    def test_shipped_corpus_within_cap(self, corpus):
        assert 1000 <= len(corpus) <= 50_000


class TestRetrieval:
    def test_self_retrieval_distance_zero(self, corpus, lexicon):
        text = corpus.sentences[10][0]
        hits = retrieve_alternatives(text, corpus, 1, lexicon)
        assert hits == [(text, 0.0)]

    def test_k_clamps_to_corpus_size(self, lexicon):
        index = build_corpus_index(["hello there", "good morning", "nice day"], lexicon)
        assert len(retrieve_alternatives("hello there", index, 8, lexicon)) == 3

    def test_empty_transcript(self, corpus, lexicon):
        assert retrieve_alternatives("", corpus, 3, lexicon) == []
        assert retrieve_alternatives("?!.", corpus, 3, lexicon) == []

    def test_distances_nondecreasing_and_deterministic(self, corpus, lexicon):
        hits = retrieve_alternatives("do you like coffee today", corpus, 5, lexicon)
        dists = [d for _, d in hits]
        assert dists == sorted(dists)
        assert hits == retrieve_alternatives("do you like coffee today", corpus, 5, lexicon)

    def test_matches_recursive_scan_oracle_small(self, lexicon):
        sentences = ["do you like coffee", "do you like tea", "the weather is cold",
                     "my dog loves the park", "can you tell me about music"]
        index = build_corpus_index(sentences, lexicon)
        query = graphemes_to_phonemes("do you like coffee", lexicon)
        expected = scan_retrieve(tuple(query), index.sentences, 3)
        assert retrieve_by_phonemes(query, index, 3) == expected

    def test_noisy_retrieval_matches_scan_oracle(self, corpus, lexicon, inventory):
        # oracle scan uses the scalar distance, itself pinned to the
        # recursive oracle in test_phonetics
        entries = corpus.sentences[:120]
        index = build_corpus_index([t for t, _ in entries], lexicon)
        params = NoiseParams(p_delete=0.05, p_substitute=0.05, rng_seed=7)
        rng = random.Random("oracle-noise")
        for i in range(0, 120, 17):
            noisy = tuple(augment_phonemes(entries[i][1], params, inventory, rng=rng))
            expected = scan_retrieve(
                noisy, index.sentences, 3,
                distance=lambda q, p: normalized_levenshtein(list(q), list(p)),
            )
            assert retrieve_by_phonemes(list(noisy), index, 3) == expected

    def test_batch_distances_equal_scalar(self, corpus):
        rng = random.Random(12)
        sub = corpus.sentences[:40]
        query = list(rng.choice(corpus.sentences)[1])[:15]
        dists = corpus.matrix.distances(query)
        for i in rng.sample(range(len(corpus)), 50):
            assert dists[i] == normalized_levenshtein(query, list(corpus.sentences[i][1]))
        assert len(sub) == 40


class TestAugmentation:
    def test_zero_noise_is_identity(self, inventory):
        seq = ["K", "AE", "T", "S"]
        assert augment_phonemes(seq, NoiseParams(0.0, 0.0, 1), inventory) == seq

    def test_certain_deletion_empties(self, inventory):
        assert augment_phonemes(["K", "AE", "T"], NoiseParams(1.0, 0.0, 1), inventory) == []

    def test_substitution_uses_most_similar(self, inventory):
        out = augment_phonemes(["B"], NoiseParams(0.0, 1.0, 1), inventory)
        assert out == [inventory.most_similar("B")]

    def test_deletion_fraction_monte_carlo(self, inventory, corpus):
        tokens = [ph for _, phones in corpus.sentences for ph in phones][:10_000]
        assert len(tokens) == 10_000
        params = NoiseParams(p_delete=0.1, p_substitute=0.1, rng_seed=99)
        out = augment_phonemes(tokens, params, inventory)
        deleted = (len(tokens) - len(out)) / len(tokens)
        assert abs(deleted - 0.1) <= 0.01

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError, match="p_delete"):
            NoiseParams(p_delete=1.5)


class TestTrainingPairs:
    def test_pair_count(self, lexicon, inventory):
        index = build_corpus_index([f"the cat number {i} sleeps" for i in range(10)], lexicon)
        pairs = list(generate_training_pairs(index, times=5, params=NoiseParams(rng_seed=3), inv=inventory))
        assert len(pairs) == 60

    def test_zero_times_is_clean_corpus(self, lexicon):
        index = build_corpus_index(["hello there", "good morning"], lexicon)
        pairs = list(generate_training_pairs(index, times=0))
        assert pairs == [(list(p), t) for t, p in index.sentences]

    def test_byte_identical_across_runs(self, tmp_path, lexicon, inventory, corpus):
        index = build_corpus_index([t for t, _ in corpus.sentences[:50]], lexicon)
        params = NoiseParams(rng_seed=11)
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_training_pairs(generate_training_pairs(index, 3, params, inventory), str(a))
        write_training_pairs(generate_training_pairs(index, 3, params, inventory), str(b))
        assert a.read_bytes() == b.read_bytes()
        first = a.read_text().splitlines()[0]
        phones, _, text = first.partition("\t")
        assert phones.split() == list(index.sentences[0][1])
        assert text == index.sentences[0][0]


class TestEvaluateRepair:
    def test_zero_noise_perfect_top1(self, corpus, inventory):
        report = evaluate_repair(corpus, NoiseParams(0.0, 0.0, 1), k=3, sample=40, inv=inventory)
        assert report.top1_rate == 1.0
        assert report.topk_rate == 1.0
        assert report.mean_distance == 0.0

    def test_topk_at_least_top1(self, corpus, inventory):
        report = evaluate_repair(corpus, NoiseParams(0.08, 0.08, 5), k=3, sample=60, inv=inventory)
        assert report.topk_rate >= report.top1_rate

    def test_sample_larger_than_corpus_rejected(self, corpus, inventory):
        with pytest.raises(ValueError, match="sample"):
            evaluate_repair(corpus, NoiseParams(), k=3, sample=len(corpus) + 1, inv=inventory)


def test_repair_model_registry(corpus):
    from parley.repair import get_repair_model, register_repair_model

    model = RetrievalRepairModel(corpus)
    register_repair_model(model)
    assert get_repair_model("retrieval") is model
    with pytest.raises(KeyError, match="no repair model"):
        get_repair_model("neural")


def test_propose_bundle_shape(corpus, lexicon):
    model = RetrievalRepairModel(corpus)
    cfg = DeadlineConfig()
    bundle = propose_bundle("do you like coffee", model, lexicon, cfg)
    assert bundle.original == "do you like coffee"
    assert len(bundle.alternatives) == cfg.alternatives_count
    dists = [d for _, d in bundle.alternatives]
    assert dists == sorted(dists)
