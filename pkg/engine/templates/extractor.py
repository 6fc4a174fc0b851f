import hashlib
import json
from typing import Dict, Iterable, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict

from models.annotation_models import DEPREL_SLOTS, UPOS_SLOTS, AnnotatedSentence, SlotLabel
from models.config_models import SlotConfig
from models.corpus_models import CarCode, CorpusBundle, DemographicGroup, OpenCode
from models.template_models import Element, Template, TemplateCorpus
from utils.exceptions import EmptyQuestion, MissingAnnotation, NonGenerative


class ExtractionReport(BaseModel):
    """Counts from one corpus extraction."""

    model_config = ConfigDict(frozen=True)

    questions: int = 0
    non_generative: int = 0
    duplicates_merged: int = 0
    templates: int = 0


def template_id_for(
    elements: Iterable[Element],
    car_code: CarCode,
    open_code: OpenCode,
    demographic: DemographicGroup,
) -> str:
    """Content hash of a template's typing and element sequence"""
    payload = json.dumps(
        [
            [[element.kind.value, element.value] for element in elements],
            car_code.value,
            open_code.value,
            demographic.value,
        ],
        separators=(",", ":"),
    )
    return "tpl-" + hashlib.sha1(payload.encode("utf-8")).hexdigest()[:12]


def _question_tokens(question: AnnotatedSentence):
    """Tokens with the trailing question marks removed"""
    tokens = list(question.tokens)
    while tokens and tokens[-1].form == "?":
        tokens.pop()
    return tokens


def abstract_question(
    question: AnnotatedSentence, slot_config: SlotConfig
) -> Tuple[List[Element], Dict[int, int]]:
    """
    Turn an annotated question into template elements.

    Returns:
        Tuple[List[Element], Dict[int, int]]: The elements, and for every slot
            its element position -> the token index it abstracted
    """
    tokens = _question_tokens(question)
    if not tokens:
        raise EmptyQuestion("question has no tokens", question_id=question.sentence_id)

    allowed = set(slot_config.slot_set)
    elements: List[Element] = []
    sources: Dict[int, int] = {}
    for token in tokens:
        label: Optional[SlotLabel] = None
        if token.index == 0 and token.form.lower() in slot_config.interrogative_whitelist:
            # Interrogative head is stored capitalized
            elements.append(Element.literal(token.form[0].upper() + token.form[1:]))
            continue
        if token.deprel in DEPREL_SLOTS and DEPREL_SLOTS[token.deprel] in allowed:
            label = DEPREL_SLOTS[token.deprel]
        elif token.upos in UPOS_SLOTS and UPOS_SLOTS[token.upos] in allowed:
            label = UPOS_SLOTS[token.upos]

        if label is None:
            elements.append(Element.literal(token.form))
        else:
            sources[len(elements)] = token.index
            elements.append(Element.slot(label))
    return elements, sources


def extract_template(
    question: AnnotatedSentence,
    car_code: CarCode,
    open_code: OpenCode,
    demographic: DemographicGroup,
    slot_config: Optional[SlotConfig] = None,
    dataset: str = "base",
) -> Template:
    """
    Convert one coded question into a generic template.

    The first token stays literal when it is a whitelisted interrogative;
    other tokens become dependency slots (nsubj, dobj, pobj, root), then POS
    slots (AUX, DET, ADP->PREP, NOUN, VERB, ADJ, PROPN), else literals.

    Args:
        question (AnnotatedSentence): Tagged question; sentence_id is its question id
        car_code (CarCode): CAR code of the question
        open_code (OpenCode): Open/closed code of the question
        demographic (DemographicGroup): Respondent group
        slot_config (SlotConfig, optional): Slot set and interrogative whitelist
        dataset (str): Provenance tag

    Returns:
        Template: The extracted template

    Raises:
        EmptyQuestion: The question has no tokens besides '?'
        NonGenerative: No token could be abstracted into a slot
    """
    slot_config = slot_config or SlotConfig()
    elements, sources = abstract_question(question, slot_config)
    if not sources:
        raise NonGenerative(
            "question yields no slot", question_id=question.sentence_id
        )
    return Template(
        template_id=template_id_for(elements, car_code, open_code, demographic),
        elements=tuple(elements),
        car_code=car_code,
        open_code=open_code,
        demographic=demographic,
        source_question_id=question.sentence_id,
        dataset=dataset,
    )


def dedupe_templates(templates: Iterable[Template]) -> Tuple[List[Template], int]:
    """
    Merge templates with identical elements and typing.

    The first occurrence is kept and absorbs the duplicate counts of the rest.

    Returns:
        Tuple[List[Template], int]: Unique templates in first-seen order, and
            the number of templates merged away
    """
    merged: Dict[str, Template] = {}
    removed = 0
    for template in templates:
        existing = merged.get(template.template_id)
        if existing is None:
            merged[template.template_id] = template
            continue
        removed += 1
        merged[template.template_id] = existing.model_copy(
            update={
                "duplicate_count": existing.duplicate_count + template.duplicate_count
            }
        )
    return list(merged.values()), removed


class TemplateExtractor:
    """
    Builds a TemplateCorpus from a coded, annotated survey corpus.

    Extraction is a pure function per question; assembly is an ordered
    reduction, so equal bundles give equal corpora.
    """

    def __init__(self, config: Optional[SlotConfig] = None):
        """
        Initialize the extractor.

        Args:
            config (SlotConfig, optional): Slot set and interrogative whitelist
        """
        self.config = config or SlotConfig()

    def extract_all(
        self, bundle: CorpusBundle, dataset: str = "base"
    ) -> Tuple[TemplateCorpus, ExtractionReport]:
        """
        Extract, skip non-generative questions and merge duplicates.

        Raises:
            MissingAnnotation: A question has no annotation in the bundle
        """
        extracted: List[Template] = []
        non_generative = 0
        questions = bundle.corpus.questions()
        for question in questions:
            annotation = bundle.annotations.get(question.question_id)
            if annotation is None:
                raise MissingAnnotation(question.question_id)
            # Provenance follows the corpus question id
            if annotation.sentence_id != question.question_id:
                annotation = annotation.model_copy(
                    update={"sentence_id": question.question_id}
                )
            profile = bundle.corpus.profile_of(question.participant_id)
            try:
                extracted.append(
                    extract_template(
                        annotation,
                        question.car_code,
                        question.open_code,
                        profile.group,
                        self.config,
                        dataset=dataset,
                    )
                )
            except (NonGenerative, EmptyQuestion) as error:
                non_generative += 1
                logger.debug(f"Skipping {question.question_id}: {error}")

        templates, merged = dedupe_templates(extracted)
        corpus = TemplateCorpus(
            templates=tuple(templates),
            slot_config=tuple(self.config.slot_set),
            provenance=(dataset,) if templates else (),
        )
        report = ExtractionReport(
            questions=len(questions),
            non_generative=non_generative,
            duplicates_merged=merged,
            templates=len(templates),
        )
        logger.info(
            f"Extracted {report.templates} templates from {report.questions} questions "
            f"({report.non_generative} non-generative, {report.duplicates_merged} merged)"
        )
        return corpus, report


def build_corpus(
    bundle: CorpusBundle, slot_config: Optional[SlotConfig] = None, dataset: str = "base"
) -> TemplateCorpus:
    """Extract a deduplicated TemplateCorpus from a corpus bundle"""
    corpus, _ = TemplateExtractor(slot_config).extract_all(bundle, dataset=dataset)
    return corpus


def merge_corpora(*corpora: TemplateCorpus) -> TemplateCorpus:
    """
    Append template corpora (base set first, augmentation sets after).

    Duplicates across corpora are merged; the slot set is the union.
    """
    templates, _ = dedupe_templates(
        template for corpus in corpora for template in corpus.templates
    )
    slot_set = []
    provenance = []
    for corpus in corpora:
        slot_set.extend(label for label in corpus.slot_config if label not in slot_set)
        provenance.extend(tag for tag in corpus.provenance if tag not in provenance)
    return TemplateCorpus(
        templates=tuple(templates),
        slot_config=tuple(slot_set),
        provenance=tuple(provenance),
    )
