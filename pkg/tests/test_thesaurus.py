import json

import numpy as np
import pytest

from reval import thesaurus as th
from reval.embedding import HashtagCentroid, HashtagDictionary, dictionary_digest
from reval.errors import FormatError, IntegrityError, MissingHashtagError

from conftest import make_dictionary


def oracle_synonyms(hashtag, k, dictionary, max_distance=None):
    """Straight-line reference: per-pair dot products, one python sort."""
    query = np.asarray(dictionary.entries[hashtag].running_sum, dtype=np.float64)
    query = query / np.linalg.norm(query)
    rows = []
    for tag, entry in dictionary.entries.items():
        if tag == hashtag:
            continue
        v = entry.running_sum / np.linalg.norm(entry.running_sum)
        d = 1.0 - float(np.dot(query, v))
        d = min(2.0, max(0.0, d))
        rows.append((float(np.round(d, 9)), tag))
    rows.sort()
    neighbors = [(hashtag, 0.0)]
    for d, tag in rows[:k]:
        if max_distance is not None and d > max_distance:
            break
        neighbors.append((tag, d))
    return neighbors


def angled_dictionary(angles: dict[str, float]) -> HashtagDictionary:
    """2-d dictionary with exact control over pairwise cosine distances."""
    d = HashtagDictionary(2)
    for tag, angle in angles.items():
        rad = np.deg2rad(angle)
        d.add(HashtagCentroid(tag, np.array([np.cos(rad), np.sin(rad)]), 1))
    return d


def assert_same_neighbors(got, want):
    assert [tag for tag, _ in got] == [tag for tag, _ in want]
    np.testing.assert_allclose([d for _, d in got], [d for _, d in want], atol=2e-9)


class TestConstructSynonyms:
    @pytest.mark.parametrize("dim", [2, 16])
    @pytest.mark.parametrize("k", [0, 1, 5, 70])
    def test_matches_oracle(self, dim, k):
        dictionary = make_dictionary(50, dim, seed=dim * 100 + k)
        for tag in dictionary.entries:
            got = th.construct_synonyms(tag, k, dictionary)
            assert_same_neighbors(got.neighbors, oracle_synonyms(tag, k, dictionary))

    def test_k_zero_is_singleton(self):
        dictionary = make_dictionary(10, 4, seed=1)
        syn = th.construct_synonyms("#tag00003", 0, dictionary)
        assert syn.neighbors == (("#tag00003", 0.0),)
        assert syn.members == {"#tag00003"}

    def test_k_beyond_size_clamps(self):
        dictionary = make_dictionary(6, 4, seed=2)
        syn = th.construct_synonyms("#tag00000", 100, dictionary)
        assert len(syn) == 6
        assert syn.members == set(dictionary.entries)

    def test_nesting(self):
        dictionary = make_dictionary(30, 8, seed=3)
        for tag in list(dictionary.entries)[:5]:
            previous = th.construct_synonyms(tag, 0, dictionary)
            for k in range(1, 12):
                current = th.construct_synonyms(tag, k, dictionary)
                assert current.neighbors[: len(previous)] == previous.neighbors
                assert previous.members <= current.members
                previous = current

    def test_exact_ties_break_lexicographically(self):
        shared = np.array([3.0, 4.0])
        d = HashtagDictionary(2)
        d.add(HashtagCentroid("#q", np.array([5.0, 0.0]), 1))
        d.add(HashtagCentroid("#zz", shared.copy(), 1))
        d.add(HashtagCentroid("#aa", shared.copy(), 1))
        full = th.construct_synonyms("#q", 2, d)
        assert [t for t, _ in full.neighbors] == ["#q", "#aa", "#zz"]
        only_one = th.construct_synonyms("#q", 1, d)
        assert [t for t, _ in only_one.neighbors] == ["#q", "#aa"]

    def test_self_pinned_first_despite_zero_distance_twin(self):
        shared = np.array([1.0, 1.0])
        d = HashtagDictionary(2)
        d.add(HashtagCentroid("#b", shared.copy(), 1))
        d.add(HashtagCentroid("#a", shared.copy(), 1))
        syn = th.construct_synonyms("#b", 1, d)
        assert syn.neighbors == (("#b", 0.0), ("#a", 0.0))

    def test_directed_relation(self):
        d = angled_dictionary({"#a": 0.0, "#b": 10.0, "#c": 15.0})
        assert "#b" in th.construct_synonyms("#a", 1, d).members
        assert "#a" not in th.construct_synonyms("#b", 1, d).members

    def test_max_distance_cutoff_is_inclusive(self):
        d = angled_dictionary({"#q": 0.0, "#near": 60.0, "#far": 90.0})
        syn = th.construct_synonyms("#q", 2, d, max_distance=0.5)
        assert syn.members == {"#q", "#near"}

    def test_missing_hashtag(self):
        dictionary = make_dictionary(5, 4, seed=4)
        with pytest.raises(MissingHashtagError):
            th.construct_synonyms("#absent", 3, dictionary)

    def test_negative_k(self):
        dictionary = make_dictionary(5, 4, seed=5)
        with pytest.raises(FormatError):
            th.construct_synonyms("#tag00000", -1, dictionary)


class TestBuildThesaurus:
    def test_rows_equal_single_queries(self):
        dictionary = make_dictionary(40, 16, seed=6)
        built = th.build_thesaurus(dictionary, 7)
        for tag in dictionary.entries:
            single = th.construct_synonyms(tag, 7, dictionary)
            assert_same_neighbors(built.entries[tag].neighbors, single.neighbors)

    def test_digest_recorded(self):
        dictionary = make_dictionary(10, 4, seed=7)
        built = th.build_thesaurus(dictionary, 3)
        assert built.digest == dictionary_digest(dictionary)
        assert built.matches(dictionary)

    def test_stale_after_dictionary_change(self):
        from reval.embedding import update_centroid

        dictionary = make_dictionary(10, 4, seed=8)
        built = th.build_thesaurus(dictionary, 3)
        update_centroid(dictionary, "#tag00000", np.ones(4))
        assert not built.matches(dictionary)

    def test_k_zero_all_singletons(self):
        dictionary = make_dictionary(8, 4, seed=9)
        built = th.build_thesaurus(dictionary, 0)
        assert all(len(entry) == 1 for entry in built.entries.values())


class TestThesaurusLookups:
    def test_unknown_tag_falls_back_to_singleton(self, fixture_thesaurus):
        assert fixture_thesaurus.synonyms("#unseen") == {"#unseen"}
        assert fixture_thesaurus.lookup("#unseen") is None

    def test_known_tag_members(self, fixture_thesaurus):
        assert fixture_thesaurus.synonyms("#hockey") == {"#hockey", "#bowling", "#golf", "#sport"}

    def test_union_over_set(self, fixture_thesaurus):
        got = fixture_thesaurus.synonyms_of_set(["#swim", "#exercise"])
        assert got == {
            "#swim", "#dive", "#paddle", "#sport",
            "#exercise", "#keeepfit", "#yoga", "#walking",
        }

    def test_literal_thesaurus_rejects_overfull_lists(self):
        with pytest.raises(FormatError):
            th.thesaurus_from_members(1, {"#a": ["#b", "#c"]})


class TestThesaurusFile:
    def test_round_trip(self, tmp_path):
        dictionary = make_dictionary(20, 8, seed=10)
        built = th.build_thesaurus(dictionary, 5)
        path = tmp_path / "thesaurus.json"
        th.write_thesaurus(path, built)
        loaded = th.read_thesaurus(path)
        assert loaded.k == built.k
        assert loaded.digest == built.digest
        assert set(loaded.entries) == set(built.entries)
        for tag in built.entries:
            assert loaded.entries[tag].neighbors == built.entries[tag].neighbors

    def test_canonical_bytes(self, tmp_path):
        dictionary = make_dictionary(10, 4, seed=11)
        built = th.build_thesaurus(dictionary, 3)
        shuffled = th.Thesaurus(
            k=built.k,
            entries=dict(reversed(list(built.entries.items()))),
            digest=built.digest,
        )
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        th.write_thesaurus(a, built)
        th.write_thesaurus(b, shuffled)
        assert a.read_bytes() == b.read_bytes()

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(FormatError):
            th.read_thesaurus(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="not found"):
            th.read_thesaurus(tmp_path / "none.json")

    def _write(self, tmp_path, payload):
        path = tmp_path / "t.json"
        path.write_text(json.dumps(payload))
        return path

    def test_self_must_lead_list(self, tmp_path):
        path = self._write(tmp_path, {
            "k": 1, "digest": None,
            "entries": {"#a": [["#b", 0.0], ["#a", 0.1]]},
        })
        with pytest.raises(IntegrityError, match="start with itself"):
            th.read_thesaurus(path)

    def test_descending_distances_rejected(self, tmp_path):
        path = self._write(tmp_path, {
            "k": 2, "digest": None,
            "entries": {"#a": [["#a", 0.0], ["#b", 0.5], ["#c", 0.2]]},
        })
        with pytest.raises(IntegrityError, match="ascending"):
            th.read_thesaurus(path)

    def test_overfull_list_rejected(self, tmp_path):
        path = self._write(tmp_path, {
            "k": 1, "digest": None,
            "entries": {"#a": [["#a", 0.0], ["#b", 0.1], ["#c", 0.2]]},
        })
        with pytest.raises(IntegrityError, match="k=1"):
            th.read_thesaurus(path)

    def test_duplicate_neighbors_rejected(self, tmp_path):
        path = self._write(tmp_path, {
            "k": 2, "digest": None,
            "entries": {"#a": [["#a", 0.0], ["#b", 0.1], ["#b", 0.2]]},
        })
        with pytest.raises(IntegrityError, match="duplicate"):
            th.read_thesaurus(path)

    def test_bad_k_rejected(self, tmp_path):
        path = self._write(tmp_path, {"k": -2, "digest": None, "entries": {}})
        with pytest.raises(FormatError):
            th.read_thesaurus(path)
