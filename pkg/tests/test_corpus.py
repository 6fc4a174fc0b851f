import json

import pytest

from engine.annotation import read_conllu
from engine.corpus import (
    agreement,
    build_bundle,
    cohen_kappa,
    count_observations,
    descriptive_counts,
    load_bundle,
    load_label_column,
    load_survey_csv,
    mean_question_length,
    repeated_participants,
    save_bundle,
    split_questions,
    story_contrast_counts,
)
from models.corpus_models import CarCode, DemographicGroup, Phase, Platform
from utils.exceptions import (
    BadEnumValue,
    BadValue,
    DegenerateMarginals,
    EmptyInput,
    LengthMismatch,
    MissingColumn,
    UnknownFactor,
)

HEADER = (
    "participant_id,platform,story,is_caregiver,is_latinx,read_frequency,"
    "experience_related,page,phase,question_text,car_code,open_code\n"
)


def test_load_survey(survey_corpus):
    assert len(survey_corpus.responses) == 12
    assert len(survey_corpus.questions()) == 59
    assert [row.row for row in survey_corpus.rejected] == [11]
    assert "car_code" in survey_corpus.rejected[0].reason


def test_survey_profile_fields(survey_corpus):
    profile = survey_corpus.profile_of("P04")
    assert profile.platform == Platform.PROLIFIC
    assert profile.read_frequency == 3
    assert profile.group == DemographicGroup.NONLATINX_NONCAREGIVER
    stories = {q.story for q in survey_corpus.questions()}
    assert stories == {"best_farm", "celebrations"}


def test_multi_question_cell_is_split(survey_corpus):
    by_id = {q.question_id: q for q in survey_corpus.questions()}
    assert by_id["P09-r46-1"].text == "Is it a birthday party?"
    assert by_id["P09-r46-2"].text == "Who is the cake for?"
    assert by_id["P09-r46-2"].phase == Phase.AFTER
    assert by_id["q-ann-1"].text == "What is an earthquake?"


def test_split_questions():
    assert split_questions("Is it? Who is it for?") == ["Is it?", "Who is it for?"]
    assert split_questions("Why is it red") == ["Why is it red?"]
    assert split_questions("  ?  ") == []


def test_missing_column(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text("participant_id,platform,story\nP1,mturk,x\n", encoding="utf-8")
    with pytest.raises(MissingColumn):
        load_survey_csv(path)


def test_bad_enum_value(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(
        HEADER + "P1,myspace,best_farm,yes,no,1,no,1,during,Why?,A,open\n",
        encoding="utf-8",
    )
    with pytest.raises(BadEnumValue) as info:
        load_survey_csv(path)
    assert info.value.row == 1
    assert info.value.column == "platform"


def test_header_only_survey_is_empty(tmp_path):
    path = tmp_path / "survey.csv"
    path.write_text(HEADER, encoding="utf-8")
    corpus = load_survey_csv(path)
    assert corpus.questions() == []


def test_kappa_from_label_files(fixtures_dir):
    labels_a = load_label_column(fixtures_dir / "labels_a.csv")
    labels_b = load_label_column(fixtures_dir / "labels_b.csv")
    assert labels_a == ["C", "C", "A", "R"]
    result = agreement(labels_a, labels_b)
    assert result.observed == pytest.approx(0.75)
    assert result.expected == pytest.approx(5 / 16)
    assert result.kappa == pytest.approx(0.636364, abs=1e-6)


def test_kappa_perfect_and_symmetric():
    a = ["C", "A", "R", "C"]
    b = ["C", "R", "R", "A"]
    assert cohen_kappa(a, a) == pytest.approx(1.0)
    assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(b, a))


def test_kappa_total_disagreement():
    result = agreement(["C", "A"], ["A", "C"])
    assert result.observed == 0.0
    assert result.expected == pytest.approx(0.5)
    assert result.kappa == pytest.approx(-1.0)


def test_label_file_without_labels(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(EmptyInput):
        load_label_column(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text("label\n", encoding="utf-8")
    with pytest.raises(EmptyInput):
        load_label_column(header_only)


def test_kappa_errors():
    with pytest.raises(LengthMismatch):
        cohen_kappa(["C", "A"], ["C"])
    with pytest.raises(DegenerateMarginals):
        cohen_kappa(["C", "C"], ["C", "C"])


def test_descriptive_counts_by_caregiver(survey_corpus):
    summaries = descriptive_counts(survey_corpus, ["caregiver"], "relational")
    assert [s.group for s in summaries] == [{"is_caregiver": "Yes"}, {"is_caregiver": "No"}]
    for summary in summaries:
        assert summary.n == 6
        assert summary.mean == pytest.approx(8 / 6)
        assert summary.sd == pytest.approx(0.516398, abs=1e-6)
        assert not summary.n_lt_2


def test_descriptive_counts_phase_filter(survey_corpus):
    during = descriptive_counts(survey_corpus, [], "total", phases=[Phase.DURING])
    after = descriptive_counts(survey_corpus, [], "total", phases=[Phase.AFTER])
    both = descriptive_counts(survey_corpus, [], "total")
    assert during[0].n == after[0].n == both[0].n == 12
    assert during[0].mean + after[0].mean == pytest.approx(both[0].mean)
    assert both[0].mean == pytest.approx(59 / 12)


def test_descriptive_counts_unknown_factor(survey_corpus):
    with pytest.raises(UnknownFactor):
        descriptive_counts(survey_corpus, ["shoe_size"], "total")
    with pytest.raises(UnknownFactor):
        descriptive_counts(survey_corpus, ["caregiver"], "rhetorical")


def test_mean_question_length(survey_corpus):
    summaries = mean_question_length(survey_corpus, [], car_code=CarCode.ABSTRACT)
    abstract = [q for q in survey_corpus.questions() if q.car_code == CarCode.ABSTRACT]
    assert summaries[0].n_questions == len(abstract)
    expected = sum(len(q.text.split()) for q in abstract) / len(abstract)
    assert summaries[0].mean_length == pytest.approx(expected)


def test_repeated_participants(survey_corpus):
    assert repeated_participants(survey_corpus) == [f"P{i:02d}" for i in range(1, 13)]


def test_story_contrast_counts(survey_corpus):
    best_farm, celebrations = story_contrast_counts(survey_corpus, "total")
    assert best_farm == [3, 3, 3, 4, 2, 3, 2, 2, 3, 3, 2, 2]
    assert celebrations == [2, 2, 2, 2, 2, 2, 3, 2, 4, 1, 2, 3]


def test_count_observations(survey_corpus):
    observations = count_observations(survey_corpus, "total", include_repeated=True)
    assert len(observations) == 24
    assert sum(o.outcome for o in observations) == 59
    assert {o.covariates["story"] for o in observations} == {0.0, 1.0}
    assert set(observations[0].covariates) == {
        "story",
        "latinx",
        "caregiver",
        "experience",
        "read_frequency",
    }


def test_count_observations_skip_repeated_participants(survey_corpus, mixed_corpus):
    assert count_observations(survey_corpus, "total") == []

    assert repeated_participants(mixed_corpus) == ["R01", "R02"]
    observations = count_observations(mixed_corpus, "total")
    assert len(observations) == 16
    assert sum(o.outcome for o in observations) == 55
    assert sum(o.covariates["story"] for o in observations) == 8

    everyone = count_observations(mixed_corpus, "total", include_repeated=True)
    assert len(everyone) == 20
    assert sum(o.outcome for o in everyone) == 63


def test_bundle_joins_annotations(survey_corpus, fixtures_dir):
    annotations = read_conllu(fixtures_dir / "questions.conllu")
    bundle = build_bundle(survey_corpus, annotations)
    assert sorted(bundle.annotations) == [f"q-ann-{i}" for i in range(1, 6)]
    assert bundle.annotations["q-ann-1"].tokens[3].deprel == "nsubj"


def test_bundle_fallback_tags_the_rest(bundle):
    assert len(bundle.annotations) == 59
    tagged = bundle.annotations["P09-r46-2"]
    assert tagged.forms[-1] == "?"
    assert all(token.deprel is None for token in tagged.tokens)


def test_bundle_save_and_load(bundle, tmp_path):
    path = tmp_path / "out" / "bundle.json"
    save_bundle(bundle, path)
    assert load_bundle(path) == bundle

    sidecar = tmp_path / "out" / "bundle.json.rejected.jsonl"
    rows = [json.loads(line) for line in sidecar.read_text(encoding="utf-8").splitlines()]
    assert [row["row"] for row in rows] == [11]


def test_load_bundle_rejects_garbage(tmp_path):
    path = tmp_path / "bundle.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(BadValue):
        load_bundle(path)
    path.write_text('{"corpus": 3}', encoding="utf-8")
    with pytest.raises(BadValue):
        load_bundle(path)
