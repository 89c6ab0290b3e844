import math
import os
from pathlib import Path

import pytest
from scipy import stats

import anssim

FIXTURES = Path(os.environ.get("ANSSIM_FIXTURE_DIR", Path(__file__).parents[1] / "fixtures"))


def test_normalize_and_tokenize():
    assert anssim.normalize("The 40,000 Cats!") == "40000 cats"
    assert anssim.normalize("Die Katze", lang="de") == "die katze"
    assert anssim.tokenize("the cat sat") == ["cat", "sat"]


def test_lexical_scores():
    assert "meteor" in anssim.lexical_metric_names()
    assert anssim.score("exact_match", "Priestley", "priestley.") == 1.0
    assert anssim.score("f1", "Joseph Priestley", "Priestley") == pytest.approx(2 / 3)
    assert anssim.score("bleu", "cat sat", "cat sat on mat") == pytest.approx(math.exp(-1))
    assert anssim.max_over_references("f1", "cat", ["dog", "cat"]) == 1.0
    assert anssim.meteor("UV", "ultraviolet") == 0.0
    assert anssim.meteor("UV", "ultraviolet", synonyms=[["UV", "ultraviolet"]]) == pytest.approx(0.5)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        anssim.score("nope", "a", "b")
    with pytest.raises(anssim.AnssimError):
        anssim.normalize("x", lang="fr")


def test_correlations_match_scipy():
    x = [0.1, 0.4, 0.4, 0.9, 0.3, 0.7]
    y = [0, 1, 1, 2, 0, 2]
    assert anssim.pearson_r(x, y) == pytest.approx(stats.pearsonr(x, y)[0])
    assert anssim.kendall_tau_b(x, y) == pytest.approx(stats.kendalltau(x, y, variant="b")[0])
    assert anssim.pearson_r([1, 1], [1, 2]) is None


def test_majority_vote():
    assert anssim.majority_vote([2, 2, 0]) == 2
    assert anssim.majority_vote([0, 1, 2]) is None
    assert anssim.majority_vote([0, 1]) is None


def test_squad_pairs():
    pairs = anssim.extract_squad_pairs((FIXTURES / "squad_mini.json").read_text(), "squad")
    assert len(pairs) == 12
    assert sum(p["split"] == "F1_ZERO" for p in pairs) == 4
    assert pairs[0]["id"] == "squad:q1:0-1"


def test_synthetic_semantic():
    p, r, f1 = anssim.synthetic_bertscore("cat sat", "cat sat")
    assert f1 == pytest.approx(1.0)
    assert 0.0 <= anssim.synthetic_sas("oxygen", "ultraviolet light") <= 1.0
