"""
Templates

Template extraction from coded questions, the JSON Lines template store and
TF-IDF ranking with per-demographic top-k composition.
"""

from engine.templates.extractor import (
    ExtractionReport,
    TemplateExtractor,
    abstract_question,
    build_corpus,
    dedupe_templates,
    extract_template,
    merge_corpora,
    template_id_for,
)
from engine.templates.ranking import (
    proportions_at,
    rank_and_proportions,
    rank_templates,
    template_terms,
    tfidf_scores,
    top_template_per_demographic,
)
from engine.templates.store import (
    is_ranked_store,
    load_ranked,
    load_store,
    persist_ranked,
    persist_store,
)

__all__ = [
    "ExtractionReport",
    "TemplateExtractor",
    "abstract_question",
    "build_corpus",
    "dedupe_templates",
    "extract_template",
    "merge_corpora",
    "template_id_for",
    "tfidf_scores",
    "rank_templates",
    "rank_and_proportions",
    "proportions_at",
    "template_terms",
    "top_template_per_demographic",
    "persist_store",
    "load_store",
    "persist_ranked",
    "load_ranked",
    "is_ranked_store",
]
