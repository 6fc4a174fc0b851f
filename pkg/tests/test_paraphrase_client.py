import pytest

from engine.generator import GeneratorConfig, QuestionGenerator
from models.config_models import ParaphraseConfig
from models.generation_models import GenerationFilters, ParaphraseStatus, Stage
from utils.paraphrase_client import ParaphraseClient, paraphrase_remote

UNREACHABLE = "http://127.0.0.1:9/paraphrase"


@pytest.fixture
def client(paraphrase_server):
    client = ParaphraseClient(
        ParaphraseConfig(url=paraphrase_server.url, timeout_ms=2000, retries=1)
    )
    yield client
    client.close()


def test_echo_paraphrase(client, paraphrase_server):
    result = client.paraphrase("Why is the farmer happy?")
    assert result.text == "Why is the farmer happy?"
    assert result.stage == Stage.PARAPHRASED
    assert result.status == ParaphraseStatus.OK
    assert paraphrase_server.requests == [{"text": "Why is the farmer happy?"}]


def test_first_usable_candidate_wins(client, paraphrase_server):
    paraphrase_server.mode = ["", "Why was a hole left at the top?", "Unused?"]
    result = client.paraphrase("Why did the hole stay?")
    assert result.text == "Why was a hole left at the top?"
    assert result.stage == Stage.PARAPHRASED


def test_candidate_gets_single_question_mark(client, paraphrase_server):
    paraphrase_server.mode = ["Why was it left."]
    assert client.paraphrase("Why?").text == "Why was it left?"
    paraphrase_server.mode = ["Why was it left??"]
    assert client.paraphrase("Why?").text == "Why was it left?"


@pytest.mark.parametrize("mode", ["error", "garbage", [], ["  "]])
def test_bad_responses_fall_back(client, paraphrase_server, mode):
    paraphrase_server.mode = mode
    result = client.paraphrase("What is a cow?")
    assert result.text == "What is a cow?"
    assert result.stage == Stage.RULE_FIXED
    assert result.status == ParaphraseStatus.FAILED
    assert result.error


def test_server_errors_are_retried(client, paraphrase_server):
    paraphrase_server.mode = "error"
    client.paraphrase("What is a cow?")
    assert len(paraphrase_server.requests) == 2


def test_unreachable_service_falls_back():
    result = paraphrase_remote(
        "What is a cow?", ParaphraseConfig(url=UNREACHABLE, timeout_ms=500, retries=0)
    )
    assert result.text == "What is a cow?"
    assert result.stage == Stage.RULE_FIXED
    assert result.status == ParaphraseStatus.FAILED


def test_disabled_without_config():
    result = paraphrase_remote("What is a cow?")
    assert result.stage == Stage.RULE_FIXED
    assert result.status == ParaphraseStatus.DISABLED
    assert result.error is None


def test_paraphrase_many_keeps_order(paraphrase_server):
    client = ParaphraseClient(ParaphraseConfig(url=paraphrase_server.url, max_in_flight=3))
    questions = [f"Question number {i}?" for i in range(10)]
    try:
        results = client.paraphrase_many(questions)
    finally:
        client.close()
    assert [r.text for r in results] == questions
    assert len(paraphrase_server.requests) == 10


def test_generator_paraphrase_stage(paraphrase_server, story, ranked):
    generator = QuestionGenerator(
        GeneratorConfig(
            filters=GenerationFilters(top_k=100),
            paraphrase=ParaphraseConfig(url=paraphrase_server.url),
        )
    )
    try:
        run = generator.generate_story(story, ranked)
    finally:
        generator.close()
    assert run.questions
    assert {q.stage for q in run.questions} == {Stage.PARAPHRASED}
    assert run.report.paraphrase_attempts == len(run.questions)
    assert run.report.paraphrase_failures == 0


def test_generator_unreachable_service(story, ranked):
    generator = QuestionGenerator(
        GeneratorConfig(
            filters=GenerationFilters(top_k=100),
            paraphrase=ParaphraseConfig(url=UNREACHABLE, timeout_ms=500, retries=0),
        )
    )
    try:
        run = generator.generate_story(story, ranked)
    finally:
        generator.close()
    assert run.questions
    assert {q.stage for q in run.questions} == {Stage.RULE_FIXED}
    assert {q.paraphrase_status for q in run.questions} == {ParaphraseStatus.FAILED}
    assert run.report.paraphrase_failures == run.report.paraphrase_attempts
    assert run.report.paraphrase_attempts == len(run.questions)
