"""
TF-IDF template ranking.

Each template is a document whose terms are its lowercased literals and its
slot labels. A template's score is the sum, over its distinct terms, of the
L2 norm of that term's column in the length-normalized TF-IDF matrix.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer

from models.corpus_models import DemographicGroup
from models.template_models import (
    RankedTemplate,
    RankedTemplates,
    Template,
    TemplateCorpus,
    TemplateProportions,
)
from utils.exceptions import BadValue, EmptyCorpus, KTooLarge

# Scores are compared at this precision so that corpus order cannot flip ties
SCORE_DECIMALS = 12


def template_terms(template: Template) -> List[str]:
    """Slot labels stay uppercase; literals are lowercased"""
    return [
        element.value if element.is_slot else element.value.lower()
        for element in template.elements
    ]


def _identity(terms: List[str]) -> List[str]:
    return terms


def tfidf_scores(corpus: TemplateCorpus) -> Dict[str, float]:
    """
    Score every template in a corpus.

    tf(t, d) = count(t, d) / len(d), idf(t) = ln((1 + N) / (1 + df(t))) + 1.

    Returns:
        Dict[str, float]: template_id -> score

    Raises:
        EmptyCorpus: The corpus has no templates
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot rank an empty template corpus")

    documents = [template_terms(template) for template in corpus.templates]
    vectorizer = TfidfVectorizer(
        analyzer=_identity, lowercase=False, norm=None, use_idf=True, smooth_idf=True
    )
    counts_idf = vectorizer.fit_transform(documents).toarray()
    lengths = np.array([len(document) for document in documents], dtype=float)
    weights = counts_idf / lengths[:, None]

    column_norms = np.sqrt((weights**2).sum(axis=0))
    presence = (weights > 0).astype(float)
    scores = np.round(presence @ column_norms, SCORE_DECIMALS)
    return {
        template.template_id: float(score)
        for template, score in zip(corpus.templates, scores)
    }


def rank_templates(
    corpus: TemplateCorpus, k_values: Sequence[int] = ()
) -> RankedTemplates:
    """Templates in descending score order, ties broken by ascending template_id"""
    scores = tfidf_scores(corpus)
    ordered = sorted(
        corpus.templates, key=lambda t: (-scores[t.template_id], t.template_id)
    )
    return RankedTemplates(
        entries=tuple(
            RankedTemplate(rank=rank, score=scores[template.template_id], template=template)
            for rank, template in enumerate(ordered, start=1)
        ),
        k_values=tuple(k_values),
    )


def proportions_at(ranked: RankedTemplates, k: int) -> TemplateProportions:
    """
    Percentage of the top-k templates per demographic group.

    Raises:
        BadValue: k < 1
        KTooLarge: k exceeds the number of ranked templates
    """
    if k < 1:
        raise BadValue(f"k must be at least 1, got {k}")
    if k > len(ranked):
        raise KTooLarge(f"k={k} exceeds the {len(ranked)} ranked templates")
    counts = {group: 0 for group in DemographicGroup}
    for entry in ranked.top(k):
        counts[entry.template.demographic] += 1
    return TemplateProportions(
        k=k, percentages={group: 100.0 * n / k for group, n in counts.items()}
    )


def rank_and_proportions(
    corpus: TemplateCorpus, k: int
) -> Tuple[RankedTemplates, TemplateProportions]:
    """
    Rank a corpus and report the demographic composition of its top k.

    Args:
        corpus (TemplateCorpus): Templates to rank
        k (int): Rank depth

    Returns:
        Tuple[RankedTemplates, TemplateProportions]: Full ranking and top-k shares
    """
    if k > len(corpus):
        raise KTooLarge(f"k={k} exceeds the {len(corpus)} templates in the corpus")
    ranked = rank_templates(corpus, k_values=(k,))
    return ranked, proportions_at(ranked, k)


def top_template_per_demographic(
    ranked: RankedTemplates,
) -> Dict[DemographicGroup, Template]:
    """Highest ranked template of each demographic group that has one"""
    best: Dict[DemographicGroup, Template] = {}
    for entry in ranked.entries:
        best.setdefault(entry.template.demographic, entry.template)
    return best
