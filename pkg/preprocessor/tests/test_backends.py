import pytest

from radlabel_preprocess.backends import (
    BackendUnavailable,
    HeuristicBackend,
    get_backend,
)


@pytest.fixture(scope="module")
def backend():
    return HeuristicBackend()


def heads_by_form(rows):
    return {row.form: row for row in rows}


class TestHeuristicBackend:
    def test_echoes_tokens(self, backend):
        words = ["cannot", "exclude", "pneumothorax"]
        rows = backend.parse(words)
        assert [r.form for r in rows] == words

    def test_exclude_gets_dobj(self, backend):
        rows = backend.parse(["cannot", "exclude", "pneumothorax"])
        assert rows[1].head is None and rows[1].deprel == "root"
        assert rows[2].head == 1 and rows[2].deprel == "dobj"
        assert rows[0].head == 1 and rows[0].deprel == "aux"

    def test_single_root(self, backend):
        for words in (
            ["no", "evidence", "of", "pulmonary", "edema"],
            ["heart", "size", "is", "stable", "."],
            ["."],
            ["clear", "lungs", "without", "consolidation", "."],
        ):
            rows = backend.parse(words)
            assert sum(1 for r in rows if r.head is None) == 1

    def test_noun_compound_attachment(self, backend):
        rows = heads_by_form(backend.parse(["no", "evidence", "of", "pulmonary", "edema"]))
        assert rows["pulmonary"].deprel == "compound"
        assert rows["pulmonary"].head == 4  # edema
        assert rows["edema"].deprel == "nmod"

    def test_coordination_attaches_to_first_conjunct(self, backend):
        words = "no evidence of pulmonary edema , pleural effusions or pneumothorax".split()
        rows = backend.parse(words)
        by_form = heads_by_form(rows)
        assert by_form["effusions"].deprel == "conj"
        assert by_form["pneumothorax"].deprel == "conj"
        assert by_form["effusions"].head == words.index("edema")
        assert by_form["pneumothorax"].head == words.index("edema")

    def test_lemma_is_case_folded_surface(self, backend):
        rows = backend.parse(["Cannot", "EXCLUDE", "Pneumothorax"])
        assert [r.lemma for r in rows] == ["cannot", "exclude", "pneumothorax"]

    def test_deterministic(self, backend):
        words = "findings may represent atelectasis versus consolidation".split()
        assert backend.parse(words) == backend.parse(words)


class TestGetBackend:
    def test_unknown_backend(self):
        with pytest.raises(BackendUnavailable):
            get_backend("nonexistent")

    def test_spacy_missing_reports_backend_unavailable(self):
        try:
            import spacy  # noqa: F401
        except ImportError:
            with pytest.raises(BackendUnavailable):
                get_backend("spacy")
        else:
            pytest.skip("spaCy installed in this environment")
