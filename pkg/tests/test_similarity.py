import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factoidlink.network import AttributeObject
from factoidlink.similarity import (
    SparseSimilarityMatrix,
    build_similarity_matrix,
    cosine_similarity,
    jaro_winkler,
    load_similarity_matrix,
    lsh_candidate_pairs,
    save_similarity_matrix,
    trigram_candidate_pairs,
)

short_text = st.text(alphabet=st.characters(codec="ascii"), max_size=12)


class TestJaroWinkler:
    def test_identical_strings(self):
        assert jaro_winkler("amy tan", "amy tan") == 1.0

    def test_no_matching_characters(self):
        assert jaro_winkler("abcd", "efgh") == 0.0

    def test_classic_transposition_case(self):
        # matches 6, transpositions 1, shared prefix 3:
        # jaro = (1 + 1 + 5/6)/3, jw = jaro + 3*0.1*(1-jaro)
        assert jaro_winkler("MARTHA", "MARHTA") == pytest.approx(0.9611, abs=1e-4)

    def test_empty_vs_nonempty(self):
        assert jaro_winkler("", "abc") == 0.0
        assert jaro_winkler("", "") == 1.0

    @given(short_text, short_text)
    @settings(max_examples=300)
    def test_symmetric(self, a, b):
        assert jaro_winkler(a, b) == pytest.approx(jaro_winkler(b, a), abs=1e-12)

    @given(short_text, short_text)
    @settings(max_examples=300)
    def test_bounded_and_exact_one_iff_equal(self, a, b):
        value = jaro_winkler(a, b)
        assert 0.0 <= value <= 1.0
        assert (value == 1.0) == (a == b)


class TestCosineSimilarity:
    def test_identity(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=8)
        assert cosine_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)
        assert cosine_similarity([1.0, 1.0], [1.0, -1.0]) == pytest.approx(0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine_similarity([1.0], [1.0, 2.0])

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            cosine_similarity([0.0, 0.0], [1.0, 2.0])


class TestTrigramBlocking:
    def test_shared_trigram_pairs(self):
        pairs = trigram_candidate_pairs(["desmond", "desmond ng"])
        assert (0, 1) in pairs

    def test_disjoint_trigrams(self):
        assert trigram_candidate_pairs(["abc", "xyz"]) == set()

    def test_short_identical_strings_pair(self):
        assert trigram_candidate_pairs(["ab", "ab"]) == {(0, 1)}

    def test_case_insensitive(self):
        assert (0, 1) in trigram_candidate_pairs(["DESMOND", "desmond ng"])

    @given(st.lists(short_text, min_size=2, max_size=8))
    @settings(max_examples=150)
    def test_perfect_recall_for_identical_strings(self, texts):
        pairs = trigram_candidate_pairs(texts)
        for i in range(len(texts)):
            for j in range(i + 1, len(texts)):
                if texts[i].lower() == texts[j].lower():
                    assert (i, j) in pairs


class TestLshBlocking:
    def test_duplicates_always_pair(self):
        rng = np.random.default_rng(1)
        base = rng.normal(size=(5, 16))
        vectors = np.vstack([base, base])
        pairs = lsh_candidate_pairs(vectors, seed=3)
        for i in range(5):
            assert (i, i + 5) in pairs

    def test_single_vector_yields_nothing(self):
        assert lsh_candidate_pairs([np.ones(4)]) == set()

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(2)
        vectors = rng.normal(size=(50, 8))
        assert lsh_candidate_pairs(vectors, seed=9) == lsh_candidate_pairs(vectors, seed=9)

    def test_recall_of_similar_pairs_against_brute_force(self):
        # low dimension so cosines above 0.9 occur naturally among random
        # unit vectors; the oracle is an exhaustive all-pairs scan
        rng = np.random.default_rng(12345)
        vectors = rng.normal(size=(1000, 4))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        gram = vectors @ vectors.T
        true_pairs = {
            (i, j)
            for i in range(len(vectors))
            for j in range(i + 1, len(vectors))
            if gram[i, j] > 0.9
        }
        assert len(true_pairs) > 100  # the oracle has teeth at dim 4
        found = lsh_candidate_pairs(vectors, seed=7)
        recall = len(true_pairs & found) / len(true_pairs)
        assert recall >= 0.9


class TestBuildSimilarityMatrix:
    def make_texts(self, *texts):
        return [AttributeObject(text=t) for t in texts]

    def test_identical_names_score_one(self):
        objects = self.make_texts("Amy Tan", "amy tan")
        matrix = build_similarity_matrix("has_name", objects, {(0, 1)})
        assert matrix.entries == [(0, 1, 1.0)]

    def test_zero_jw_maps_to_minus_one(self):
        objects = self.make_texts("abcd", "efgh")
        matrix = build_similarity_matrix("has_name", objects, {(0, 1)})
        assert matrix.entries == [(0, 1, -1.0)]

    def test_affine_map_of_jw(self):
        objects = self.make_texts("desmond", "desmond ng")
        matrix = build_similarity_matrix("has_name", objects, {(0, 1)})
        expected = 2.0 * jaro_winkler("desmond", "desmond ng") - 1.0
        ((_, _, s),) = matrix.entries
        assert s == pytest.approx(expected)
        assert s > 0.8

    def test_vector_predicate_uses_cosine(self):
        objects = [AttributeObject(feature_vector=v) for v in ([1.0, 0.0], [1.0, 1.0])]
        matrix = build_similarity_matrix("has_image", objects, {(0, 1)})
        ((_, _, s),) = matrix.entries
        assert s == pytest.approx(math.sqrt(0.5))

    def test_stored_pairs_subset_of_candidates_and_bounded(self):
        rng = np.random.default_rng(5)
        objects = [AttributeObject(text=f"name {rng.integers(100)}") for _ in range(20)]
        candidates = {(int(i), int(j)) for i, j in
                      rng.integers(0, 20, size=(30, 2)) if i < j}
        matrix = build_similarity_matrix("has_name", objects, candidates)
        stored = {(i, j) for i, j, _ in matrix.entries}
        assert stored <= candidates
        assert all(-1.0 <= s <= 1.0 for _, _, s in matrix.entries)

    def test_out_of_range_candidate_rejected(self):
        with pytest.raises(ValueError):
            build_similarity_matrix("p", self.make_texts("a", "b"), {(0, 5)})

    def test_both_orientations_stored_once(self):
        objects = self.make_texts("amy", "amya")
        matrix = build_similarity_matrix("p", objects, {(0, 1), (1, 0)})
        assert len(matrix.entries) == 1

    def test_entry_validation(self):
        with pytest.raises(ValueError):
            SparseSimilarityMatrix("p", 2, [(0, 1, 1.5)])
        with pytest.raises(ValueError):
            SparseSimilarityMatrix("p", 2, [(1, 0, 0.5)])


def test_matrix_csv_round_trip(tmp_path):
    matrix = SparseSimilarityMatrix("has_name", 4, [(0, 1, 0.25), (1, 3, -0.75)])
    path = tmp_path / "sim.csv"
    save_similarity_matrix(matrix, path)
    first = path.read_text().splitlines()[0]
    assert first == "# pred=has_name n=4"
    loaded = load_similarity_matrix(path)
    assert loaded.predicate == matrix.predicate
    assert loaded.n == matrix.n
    assert loaded.entries == matrix.entries
