from pathlib import Path
from typing import Dict, Mapping, Union

from engine.annotation.surface import is_punctuation, tokenize_surface
from models.annotation_models import UPOS_TAGS, AnnotatedSentence, Token
from utils.exceptions import EmptyInput, MalformedLine, UnknownUpos

BUNDLED_LEXICON = Path(__file__).resolve().parents[2] / "data" / "lexicon.tsv"

# (suffix, tag) rules tried in order for words missing from the lexicon
SUFFIX_RULES = (("ly", "ADV"), ("ing", "VERB"), ("ed", "VERB"))


def load_lexicon(path: Union[str, Path, None] = None) -> Dict[str, str]:
    """
    Load a two-column `word<TAB>UPOS` lexicon.

    Args:
        path: Lexicon file; the bundled lexicon when omitted

    Returns:
        Dict[str, str]: lowercase word -> UPOS tag
    """
    lexicon: Dict[str, str] = {}
    with open(path or BUNDLED_LEXICON, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedLine("lexicon lines need word<TAB>UPOS", line_number)
            word, upos = fields[0].strip().lower(), fields[1].strip()
            if upos not in UPOS_TAGS:
                raise UnknownUpos(f"unknown UPOS tag {upos!r}", line=line_number)
            lexicon[word] = upos
    return lexicon


def guess_upos(form: str, lexicon: Mapping[str, str]) -> str:
    """Lexicon lookup, then punctuation/number/suffix rules, else NOUN"""
    lowered = form.lower()
    if lowered in lexicon:
        return lexicon[lowered]
    if is_punctuation(form):
        return "PUNCT"
    if lowered.isdigit():
        return "NUM"
    for suffix, upos in SUFFIX_RULES:
        if lowered.endswith(suffix):
            return upos
    return "NOUN"


def fallback_tag(
    raw: str, lexicon: Mapping[str, str], sentence_id: str = "s1"
) -> AnnotatedSentence:
    """
    Tag a pre-segmented sentence without an external parser.

    Dependency labels are never produced; they only come from CoNLL-U input.

    Args:
        raw (str): Sentence text
        lexicon (Mapping[str, str]): word -> UPOS map with lowercase keys
        sentence_id (str): Identifier given to the sentence

    Returns:
        AnnotatedSentence: Tokens with upos set and deprel absent

    Raises:
        EmptyInput: When the text has no tokens
    """
    forms = tokenize_surface(raw)
    if not forms:
        raise EmptyInput("cannot tag an empty sentence", sentence_id=sentence_id)
    tokens = [
        Token(index=index, form=form, lemma=form.lower(), upos=guess_upos(form, lexicon))
        for index, form in enumerate(forms)
    ]
    return AnnotatedSentence(sentence_id=sentence_id, text=raw.strip(), tokens=tokens)
