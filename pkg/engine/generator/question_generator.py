from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from engine.generator.filler import fill_template
from engine.generator.matcher import match_template
from engine.generator.repair import rule_fix
from models.annotation_models import AnnotatedSentence
from models.config_models import ParaphraseConfig
from models.corpus_models import CarCode
from models.generation_models import (
    GeneratedQuestion,
    GenerationFilters,
    GenerationReport,
    GenerationRun,
    ParaphraseStatus,
    SlotBinding,
    Stage,
)
from models.template_models import RankedTemplate, RankedTemplates
from utils.exceptions import EmptyTemplatePool
from utils.paraphrase_client import ParaphraseClient

CAR_ORDER = (CarCode.CONCRETE, CarCode.ABSTRACT, CarCode.RELATIONAL)


class GeneratorConfig(BaseModel):
    """
    Configuration settings for question generation.

    Attributes:
        filters (GenerationFilters): Template pool restrictions and per-sentence limits
        paraphrase (Optional[ParaphraseConfig]): Paraphrase service, disabled when absent
    """

    model_config = ConfigDict(frozen=True)

    filters: GenerationFilters = Field(default_factory=GenerationFilters)
    paraphrase: Optional[ParaphraseConfig] = None


class _Candidate(NamedTuple):
    entry: RankedTemplate
    binding: SlotBinding
    text: str


def _pick_by_quota(
    candidates: List[_Candidate], quota: Dict[CarCode, float], limit: int
) -> List[_Candidate]:
    """
    Weighted round robin over CAR pools.

    Each pick goes to the code with the smallest taken/share ratio that still
    has an unused candidate; ties go C, then A, then R.
    """
    pools: Dict[CarCode, List[_Candidate]] = {code: [] for code in CAR_ORDER}
    for candidate in candidates:
        pools[candidate.entry.template.car_code].append(candidate)
    taken = {code: 0 for code in CAR_ORDER}
    picked: List[_Candidate] = []
    while len(picked) < limit:
        open_codes = [
            code for code in CAR_ORDER if quota.get(code, 0.0) > 0 and pools[code]
        ]
        if not open_codes:
            break
        code = min(open_codes, key=lambda c: (taken[c] / quota[c], CAR_ORDER.index(c)))
        picked.append(pools[code].pop(0))
        taken[code] += 1
    return picked


class QuestionGenerator:
    """
    Generates questions for story sentences from a ranked template corpus.

    Each sentence is processed independently (match -> fill -> rule_fix);
    results merge in (sentence, template rank) order, duplicates are dropped,
    and the surviving questions go through the paraphrase stage.
    """

    def __init__(
        self,
        config: Optional[GeneratorConfig] = None,
        client: Optional[ParaphraseClient] = None,
    ):
        """
        Initialize the generator.

        Args:
            config (GeneratorConfig, optional): Filters and paraphrase settings
            client (ParaphraseClient, optional): Overrides the client built from config
        """
        self.config = config or GeneratorConfig()
        self.client = client
        if self.client is None and self.config.paraphrase is not None:
            self.client = ParaphraseClient(self.config.paraphrase)

    @property
    def filters(self) -> GenerationFilters:
        return self.config.filters

    def template_pool(self, ranked: RankedTemplates) -> List[RankedTemplate]:
        """
        Ranked templates passing the filters, cut to top_k.

        Raises:
            EmptyTemplatePool: No template passes the filters
        """
        filters = self.filters
        pool = [
            entry
            for entry in ranked.entries
            if (filters.car_code is None or entry.template.car_code == filters.car_code)
            and (filters.open_code is None or entry.template.open_code == filters.open_code)
            and (
                filters.demographic is None
                or entry.template.demographic == filters.demographic
            )
        ][: filters.top_k]
        if not pool:
            raise EmptyTemplatePool(
                "no template matches the generation filters",
                car_code=filters.car_code,
                open_code=filters.open_code,
                demographic=filters.demographic,
            )
        return pool

    def _sentence_candidates(
        self, sentence: AnnotatedSentence, pool: Sequence[RankedTemplate]
    ) -> Tuple[List[_Candidate], int]:
        """Accepted candidates for one sentence, plus duplicates skipped"""
        candidates: List[_Candidate] = []
        seen: Set[str] = set()
        duplicates = 0
        # Under a quota every match is a candidate; the round robin picks later
        limit = None if self.filters.quota else self.filters.max_per_sentence
        for entry in pool:
            if limit is not None and len(candidates) >= limit:
                break
            binding = match_template(entry.template, sentence)
            if binding is None:
                continue
            text = rule_fix(fill_template(entry.template, binding), sentence, binding)
            if text in seen:
                duplicates += 1
                continue
            seen.add(text)
            candidates.append(_Candidate(entry, binding, text))

        if self.filters.quota:
            candidates = _pick_by_quota(
                candidates, self.filters.quota, self.filters.max_per_sentence
            )
            candidates.sort(key=lambda candidate: candidate.entry.rank)
        return candidates, duplicates

    def _generate(
        self, sentences: Sequence[AnnotatedSentence], ranked: RankedTemplates
    ) -> GenerationRun:
        pool = self.template_pool(ranked)

        accepted: List[Tuple[AnnotatedSentence, _Candidate]] = []
        seen: Set[str] = set()
        duplicates = 0
        without_match = 0
        for sentence in sentences:
            candidates, skipped = self._sentence_candidates(sentence, pool)
            duplicates += skipped
            if not candidates:
                without_match += 1
            for candidate in candidates:
                if candidate.text in seen:
                    duplicates += 1
                    continue
                seen.add(candidate.text)
                accepted.append((sentence, candidate))

        questions, failures = self._paraphrase_stage(accepted)
        attempts = len(accepted) if self.client is not None else 0

        unique: List[GeneratedQuestion] = []
        final_seen: Set[str] = set()
        for question in questions:
            if question.text in final_seen:
                duplicates += 1
                continue
            final_seen.add(question.text)
            unique.append(question)

        per_car = {code: 0 for code in CAR_ORDER}
        for question in unique:
            per_car[question.car_code] += 1
        report = GenerationReport(
            sentences=len(sentences),
            sentences_without_match=without_match,
            questions=len(unique),
            per_car_code=per_car,
            duplicates_dropped=duplicates,
            paraphrase_attempts=attempts,
            paraphrase_failures=failures,
        )
        logger.info(
            f"Generated {report.questions} questions from {report.sentences} sentences "
            f"({report.sentences_without_match} without a match, "
            f"{report.duplicates_dropped} duplicates dropped)"
        )
        if failures:
            logger.warning(f"{failures} of {attempts} paraphrase requests fell back")
        return GenerationRun(questions=tuple(unique), report=report)

    def _paraphrase_stage(
        self, accepted: List[Tuple[AnnotatedSentence, _Candidate]]
    ) -> Tuple[List[GeneratedQuestion], int]:
        texts = [candidate.text for _, candidate in accepted]
        if self.client is None:
            results = [None] * len(texts)
        else:
            results = self.client.paraphrase_many(texts)

        questions: List[GeneratedQuestion] = []
        failures = 0
        for (sentence, candidate), result in zip(accepted, results):
            template = candidate.entry.template
            text, stage, status, error = (
                candidate.text,
                Stage.RULE_FIXED,
                ParaphraseStatus.DISABLED,
                None,
            )
            if result is not None:
                text, stage, status, error = (
                    result.text,
                    result.stage,
                    result.status,
                    result.error,
                )
                failures += status == ParaphraseStatus.FAILED
            questions.append(
                GeneratedQuestion(
                    text=text,
                    template_id=template.template_id,
                    sentence_id=sentence.sentence_id,
                    binding=candidate.binding,
                    car_code=template.car_code,
                    open_code=template.open_code,
                    stage=stage,
                    page=sentence.page,
                    rank=candidate.entry.rank,
                    paraphrase_status=status,
                    paraphrase_error=error,
                )
            )
        return questions, failures

    def generate_for_page(
        self, page: Sequence[AnnotatedSentence], ranked: RankedTemplates
    ) -> List[GeneratedQuestion]:
        """
        Generate questions for one storybook page.

        Args:
            page (Sequence[AnnotatedSentence]): The page's sentences in reading order
            ranked (RankedTemplates): Ranked template corpus

        Returns:
            List[GeneratedQuestion]: Questions ordered by (sentence, template rank)

        Raises:
            EmptyTemplatePool: The filters leave no template
        """
        return list(self._generate(page, ranked).questions)

    def generate_story(
        self, sentences: Sequence[AnnotatedSentence], ranked: RankedTemplates
    ) -> GenerationRun:
        """Generate for every page of a story; duplicates are dropped story-wide"""
        pages = sorted({s.page for s in sentences if s.page is not None})
        logger.debug(f"Generating over {len(sentences)} sentences on {len(pages)} pages")
        return self._generate(sentences, ranked)

    def close(self) -> None:
        if self.client is not None:
            self.client.close()


def generate_for_page(
    page: Sequence[AnnotatedSentence],
    ranked: RankedTemplates,
    filters: Optional[GenerationFilters] = None,
    paraphrase: Optional[ParaphraseConfig] = None,
) -> List[GeneratedQuestion]:
    """Generate questions for one page with a one-off generator"""
    generator = QuestionGenerator(
        GeneratorConfig(filters=filters or GenerationFilters(), paraphrase=paraphrase)
    )
    try:
        return generator.generate_for_page(page, ranked)
    finally:
        generator.close()
