import unicodedata
from typing import Dict, List, Sequence

from utils.exceptions import EmptyInput

# Contracted auxiliaries and negation, expanded at fill time
CONTRACTIONS: Dict[str, str] = {
    "'s": "is",
    "'re": "are",
    "'m": "am",
    "n't": "not",
    "'ve": "have",
    "'ll": "will",
    "'d": "would",
}

_CLOSING = {"?", "!", ".", ",", ";", ":", ")", "]", "}", "%", "...", "'"}
_OPENING = {"(", "[", "{", "$"}


def is_punctuation(text: str) -> bool:
    """True when every character is Unicode punctuation"""
    return bool(text) and all(unicodedata.category(ch).startswith("P") for ch in text)


def tokenize_surface(raw: str) -> List[str]:
    """
    Split on whitespace and detach leading/trailing punctuation characters.

    Args:
        raw (str): Sentence or question text

    Returns:
        List[str]: Surface tokens; inner punctuation such as apostrophes stays attached
    """
    tokens: List[str] = []
    for chunk in raw.split():
        start, end = 0, len(chunk)
        while start < end and is_punctuation(chunk[start]):
            start += 1
        while end > start and is_punctuation(chunk[end - 1]):
            end -= 1
        tokens.extend(chunk[:start])
        if start < end:
            tokens.append(chunk[start:end])
        tokens.extend(chunk[end:])
    return tokens


def _attaches_left(form: str) -> bool:
    lowered = form.lower()
    return form in _CLOSING or lowered in CONTRACTIONS or lowered == "n't"


def detokenize(tokens: Sequence[str]) -> str:
    """
    Join token forms into question text.

    Closing punctuation and clitics attach to the previous token, the first
    character is capitalized, and a question keeps exactly one trailing '?'.

    Args:
        tokens (Sequence[str]): Ordered token forms

    Returns:
        str: Surface text with single spaces

    Raises:
        EmptyInput: When no non-blank token is given
    """
    forms = [form.strip() for form in tokens if form and form.strip()]
    if not forms:
        raise EmptyInput("cannot detokenize an empty token list")

    text = forms[0]
    for previous, form in zip(forms, forms[1:]):
        if _attaches_left(form) or previous in _OPENING:
            text += form
        else:
            text += " " + form

    if "?" in forms:
        text = text.rstrip("?!. ") + "?"
    return text[0].upper() + text[1:]


def expand_contraction(form: str, lemma: str, upos: str) -> str:
    """
    Expand a contracted auxiliary or negation ('s -> is, n't -> not).

    Possessive 's (PART) and other tokens are returned unchanged.
    """
    expansion = CONTRACTIONS.get(form.lower())
    if expansion is None:
        return form
    if upos in ("AUX", "VERB") or lemma.lower() == "not":
        return expansion
    return form
