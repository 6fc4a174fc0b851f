from typing import Dict, FrozenSet, NamedTuple, Optional

from models.annotation_models import SlotLabel, Token

NOMINAL_UPOS = frozenset({"NOUN", "PROPN", "PRON"})


class Compatibility(NamedTuple):
    deprel: Optional[str]
    upos: FrozenSet[str]


COMPATIBILITY_TABLE: Dict[SlotLabel, Compatibility] = {
    SlotLabel.NSUBJ: Compatibility("nsubj", NOMINAL_UPOS),
    SlotLabel.DOBJ: Compatibility("dobj", NOMINAL_UPOS),
    SlotLabel.POBJ: Compatibility("pobj", NOMINAL_UPOS),
    SlotLabel.ROOT: Compatibility("root", frozenset({"VERB", "AUX"})),
    SlotLabel.AUX: Compatibility(None, frozenset({"AUX"})),
    SlotLabel.DET: Compatibility(None, frozenset({"DET"})),
    SlotLabel.PREP: Compatibility(None, frozenset({"ADP"})),
    SlotLabel.NOUN: Compatibility(None, frozenset({"NOUN"})),
    SlotLabel.VERB: Compatibility(None, frozenset({"VERB"})),
    SlotLabel.ADJ: Compatibility(None, frozenset({"ADJ"})),
    SlotLabel.PROPN: Compatibility(None, frozenset({"PROPN"})),
}


def binds_via_deprel(label: SlotLabel, token: Token) -> bool:
    entry = COMPATIBILITY_TABLE[label]
    return entry.deprel is not None and token.deprel == entry.deprel


def is_compatible(label: SlotLabel, token: Token) -> bool:
    """Whether a token may fill a slot; punctuation never binds"""
    if token.upos == "PUNCT":
        return False
    return binds_via_deprel(label, token) or token.upos in COMPATIBILITY_TABLE[label].upos
