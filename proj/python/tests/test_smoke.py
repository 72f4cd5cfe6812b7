import pytest

import coach


@pytest.fixture(scope="module")
def engine():
    return coach.Engine("toy", supertag_model=coach.bundled_supertag_model())


def test_example_sentence_is_coached(engine):
    v = engine.check("mis abuelos son personas famosos")
    assert v["verdict"] == "learner"
    assert len(v["feedback"]) == 1
    item = v["feedback"][0]
    assert item["category"] == "gender-agreement"
    assert item["surface"] == "famosos"
    assert (item["start"], item["end"]) == (25, 32)
    assert v["corrected"] == "mis abuelos son personas famosas"
    assert engine.check(v["corrected"])["verdict"] == "grammatical"


def test_parse_reports_readings_and_stats(engine):
    strict = engine.parse("la abuela duerme", mode="strict")
    assert len(strict["readings"]) == 1
    assert strict["readings"][0]["learner_uses"] == []
    assert strict["stats"]["edges_built"] > 0
    assert engine.parse("la abuelo duerme", mode="strict")["readings"] == []
    learner = engine.parse("la abuelo duerme", mode="learner")
    assert learner["readings"][0]["learner_uses"]


def test_supertag_filtering_keeps_the_reading(engine):
    plain = engine.parse("los niños duermen", mode="learner")
    tagged = engine.parse("los niños duermen", mode="learner", supertag_k=1)
    assert tagged["readings"][0]["derivation"] == plain["readings"][0]["derivation"]
    assert tagged["stats"]["edges_built"] < plain["stats"]["edges_built"]


def test_analyze(engine):
    assert engine.analyze("famosas") == [("famosas", "famoso", "AQ0FP0")]
    assert engine.analyze("xyz") == []


def test_profile_coverage(engine):
    p = coach.profile(engine, "grammatical")
    assert p["schema"] == "coach-profile/1"
    assert p["aggregates"]["coverage_pct"] == 100.0
    assert coach.profile(engine, "learner")["aggregates"]["coverage_pct"] == 0.0
    assert coach.profile(engine, "learner", mode="learner")["aggregates"]["coverage_pct"] == 100.0


def test_validate_reports_errors(tmp_path):
    assert coach.validate("toy") == []
    bad = tmp_path / "bad.tdl"
    bad.write_text("%types\na := b.\n")
    errors = coach.validate(str(bad))
    assert len(errors) == 1
    assert set(errors[0]) == {"kind", "location", "detail"}


def test_errors_map_to_exceptions(engine):
    with pytest.raises(coach.InputError):
        engine.check("")
    with pytest.raises(coach.InputError):
        engine.parse("la abuela duerme", mode="bogus")
    with pytest.raises(ValueError):
        coach.Engine("/nonexistent/grammar.tdl")
