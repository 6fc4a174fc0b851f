"""
CoNLL-U reading and writing.

Only the columns the engine uses are kept: FORM, LEMMA, UPOS, HEAD and
DEPREL. Dependency labels are normalized to the label set the question
templates use (obj -> dobj, case -> prep).
"""

import io
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Union

from loguru import logger

from engine.annotation.surface import detokenize
from models.annotation_models import UPOS_TAGS, AnnotatedSentence, Token
from utils.exceptions import EmptyDocument, MalformedLine, UnknownUpos

DEPREL_ALIASES: Dict[str, str] = {
    "obj": "dobj",
    "case": "prep",
    "prep": "prep",
}

_COLUMNS = 10


def normalize_deprel(raw: str) -> Optional[str]:
    """Lowercase a DEPREL value and map aliases; '_' means absent"""
    if raw == "_" or not raw:
        return None
    label = raw.lower()
    return DEPREL_ALIASES.get(label, label)


def parse_conllu(document: Union[TextIO, Iterable[str], str]) -> List[AnnotatedSentence]:
    """
    Parse a CoNLL-U document into annotated sentences.

    Args:
        document: Text stream, iterable of lines or the document text itself

    Returns:
        List[AnnotatedSentence]: One sentence per blank-line separated block

    Raises:
        MalformedLine: A token line without exactly 10 tab-separated columns
        UnknownUpos: A UPOS value outside the 17 Universal tags
        EmptyDocument: No sentence found
    """
    if isinstance(document, str):
        document = io.StringIO(document)

    sentences: List[AnnotatedSentence] = []
    tokens: List[Token] = []
    metadata: Dict[str, str] = {}

    def flush() -> None:
        if not tokens:
            metadata.clear()
            return
        sentence_id = metadata.get("sent_id") or f"s{len(sentences) + 1}"
        text = metadata.get("text") or detokenize([token.form for token in tokens])
        page = metadata.get("page")
        sentences.append(
            AnnotatedSentence(
                sentence_id=sentence_id,
                text=text,
                tokens=list(tokens),
                page=int(page) if page and page.isdigit() else None,
            )
        )
        tokens.clear()
        metadata.clear()

    for line_number, raw_line in enumerate(document, start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                metadata[key.strip()] = value.strip()
            continue

        fields = line.split("\t")
        if len(fields) != _COLUMNS:
            raise MalformedLine(
                f"expected {_COLUMNS} tab-separated columns, found {len(fields)}",
                line_number,
            )
        token_id, form, lemma, upos, _, _, head, deprel, _, _ = fields
        # Multiword ranges and empty nodes carry no tag of their own
        if "-" in token_id or "." in token_id:
            continue
        if upos not in UPOS_TAGS:
            raise UnknownUpos(f"unknown UPOS tag {upos!r}", line=line_number)
        if not form or form == "_":
            raise MalformedLine("token form is empty", line_number)

        tokens.append(
            Token(
                index=len(tokens),
                form=form,
                lemma=form if lemma in ("", "_") else lemma,
                upos=upos,
                deprel=normalize_deprel(deprel),
                head=int(head) if head.isdigit() else None,
            )
        )
    flush()

    if not sentences:
        raise EmptyDocument("CoNLL-U document contains no sentences")
    logger.debug(f"Parsed {len(sentences)} CoNLL-U sentences")
    return sentences


def read_conllu(path: Union[str, Path]) -> List[AnnotatedSentence]:
    """Parse a CoNLL-U file (UTF-8)"""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_conllu(handle)


def serialize_conllu(sentences: Iterable[AnnotatedSentence]) -> str:
    """
    Write sentences back to CoNLL-U.

    Columns the engine does not keep (XPOS, FEATS, DEPS, MISC) are written as '_'.
    """
    blocks: List[str] = []
    for sentence in sentences:
        lines = [f"# sent_id = {sentence.sentence_id}"]
        if sentence.page is not None:
            lines.append(f"# page = {sentence.page}")
        lines.append(f"# text = {sentence.text}")
        for token in sentence.tokens:
            lines.append(
                "\t".join(
                    [
                        str(token.index + 1),
                        token.form,
                        token.lemma,
                        token.upos,
                        "_",
                        "_",
                        "_" if token.head is None else str(token.head),
                        token.deprel or "_",
                        "_",
                        "_",
                    ]
                )
            )
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
