import json
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Union

from loguru import logger
from pydantic import ValidationError

from engine.annotation.fallback_tagger import fallback_tag
from models.annotation_models import AnnotatedSentence
from models.corpus_models import CorpusBundle, SurveyCorpus
from utils.exceptions import BadValue
from utils.file_io import atomic_write_jsonl, atomic_write_text


def build_bundle(
    corpus: SurveyCorpus,
    annotations: Iterable[AnnotatedSentence] = (),
    lexicon: Optional[Mapping[str, str]] = None,
) -> CorpusBundle:
    """
    Join question annotations to a survey corpus by question id.

    Args:
        corpus (SurveyCorpus): Loaded survey
        annotations: Parsed CoNLL-U sentences whose sent_id is a question id
        lexicon (Mapping[str, str], optional): When given, questions without an
            annotation are tagged by the fallback tagger; otherwise they stay
            unannotated and template extraction reports them

    Returns:
        CorpusBundle: Corpus plus annotation map
    """
    by_id: Dict[str, AnnotatedSentence] = {}
    for sentence in annotations:
        if sentence.sentence_id in by_id:
            logger.warning(f"Duplicate annotation for {sentence.sentence_id}; keeping the first")
            continue
        by_id[sentence.sentence_id] = sentence

    question_ids = {question.question_id for question in corpus.questions()}
    unused = sorted(set(by_id) - question_ids)
    if unused:
        logger.warning(f"{len(unused)} annotations match no question (first: {unused[0]})")

    joined: Dict[str, AnnotatedSentence] = {}
    tagged = 0
    for question in corpus.questions():
        if question.question_id in by_id:
            joined[question.question_id] = by_id[question.question_id]
        elif lexicon is not None:
            joined[question.question_id] = fallback_tag(
                question.text, lexicon, sentence_id=question.question_id
            )
            tagged += 1
    if tagged:
        logger.info(f"Fallback-tagged {tagged} questions without CoNLL-U annotation")
    return CorpusBundle(corpus=corpus, annotations=joined)


def save_bundle(bundle: CorpusBundle, path: Union[str, Path]) -> None:
    """Write the bundle JSON and the rejected-row sidecar next to it"""
    atomic_write_text(path, bundle.model_dump_json(indent=2) + "\n")
    sidecar = Path(f"{path}.rejected.jsonl")
    atomic_write_jsonl(
        sidecar, [row.model_dump(mode="json") for row in bundle.corpus.rejected]
    )


def load_bundle(path: Union[str, Path]) -> CorpusBundle:
    """
    Read a bundle written by save_bundle.

    Raises:
        BadValue: The file is not a valid bundle
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return CorpusBundle.model_validate(json.load(handle))
        except json.JSONDecodeError as error:
            raise BadValue(f"bundle is not JSON: {error.msg}", path=str(path)) from error
        except ValidationError as error:
            raise BadValue(
                f"invalid bundle: {error.errors()[0]['msg']}", path=str(path)
            ) from error
