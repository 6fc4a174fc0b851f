import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from engine.annotation import load_lexicon, read_conllu
from engine.corpus import build_bundle, load_survey_csv
from engine.templates import TemplateExtractor, rank_templates, template_id_for
from models.annotation_models import AnnotatedSentence, SlotLabel, Token
from models.corpus_models import CarCode, DemographicGroup, OpenCode
from models.template_models import Element, Template

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def survey_corpus():
    return load_survey_csv(FIXTURES / "survey.csv")


@pytest.fixture(scope="session")
def mixed_corpus():
    """16 one-survey participants plus R01 and R02, who answered both stories"""
    return load_survey_csv(FIXTURES / "survey_mixed.csv")


@pytest.fixture(scope="session")
def bundle(survey_corpus, lexicon):
    return build_bundle(survey_corpus, read_conllu(FIXTURES / "questions.conllu"), lexicon)


@pytest.fixture(scope="session")
def extraction(bundle):
    return TemplateExtractor().extract_all(bundle)


@pytest.fixture(scope="session")
def template_corpus(extraction):
    return extraction[0]


@pytest.fixture(scope="session")
def ranked(template_corpus):
    return rank_templates(template_corpus)


@pytest.fixture(scope="session")
def story():
    return read_conllu(FIXTURES / "story.conllu")


@pytest.fixture
def make_sentence():
    """
    Build an AnnotatedSentence from "form/UPOS[/deprel]" items.

    Example: make_sentence("It/PRON is/AUX an/DET earthquake/NOUN !/PUNCT")
    """

    def build(items: str, sentence_id: str = "s1", page=None) -> AnnotatedSentence:
        tokens = []
        for index, item in enumerate(items.split()):
            form, upos, *rest = item.split("/")
            tokens.append(
                Token(
                    index=index,
                    form=form,
                    lemma=form.lower(),
                    upos=upos,
                    deprel=rest[0] if rest else None,
                )
            )
        text = " ".join(token.form for token in tokens)
        return AnnotatedSentence(sentence_id=sentence_id, text=text, tokens=tokens, page=page)

    return build


class _ParaphraseHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        self.server.requests.append(payload)
        mode = self.server.mode
        if mode == "error":
            self.send_response(500)
            self.end_headers()
            return
        if mode == "echo":
            body = {"candidates": [payload["text"]]}
        elif mode == "garbage":
            body = {"unexpected": True}
        else:
            body = {"candidates": list(mode)}
        data = json.dumps(body).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, format, *args):
        pass


@pytest.fixture
def paraphrase_server():
    """
    Local paraphrase service. Set `server.mode` to "echo", "error",
    "garbage" or a list of candidates to return.
    """
    server = ThreadingHTTPServer(("127.0.0.1", 0), _ParaphraseHandler)
    server.mode = "echo"
    server.requests = []
    server.url = f"http://127.0.0.1:{server.server_address[1]}/paraphrase"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


@pytest.fixture
def make_template():
    """
    Build a Template from its stored form; uppercase slot names become slots.

    Example: make_template("What AUX NSUBJ", car_code=CarCode.ABSTRACT)
    """

    def build(
        stored_form: str,
        car_code: CarCode = CarCode.CONCRETE,
        open_code: OpenCode = OpenCode.CLOSED,
        demographic: DemographicGroup = DemographicGroup.LATINX_CAREGIVER,
        source: str = "q1",
    ) -> Template:
        slot_names = {label.value for label in SlotLabel}
        elements = [
            Element.slot(SlotLabel(word)) if word in slot_names else Element.literal(word)
            for word in stored_form.split()
        ]
        return Template(
            template_id=template_id_for(elements, car_code, open_code, demographic),
            elements=tuple(elements),
            car_code=car_code,
            open_code=open_code,
            demographic=demographic,
            source_question_id=source,
        )

    return build
