from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import requests
from loguru import logger
from pydantic import ValidationError
from requests.adapters import HTTPAdapter
from urllib3 import Retry

from models.config_models import ParaphraseConfig
from models.generation_models import (
    ParaphraseRequest,
    ParaphraseResponse,
    ParaphraseResult,
    ParaphraseStatus,
    Stage,
)


class TimeoutHTTPAdapter(HTTPAdapter):
    """HTTPAdapter applying a default timeout to every request."""

    def __init__(self, *args, timeout: float, **kwargs):
        self.timeout = timeout
        super().__init__(*args, **kwargs)

    def send(self, request, **kwargs):
        if kwargs.get("timeout") is None:
            kwargs["timeout"] = self.timeout
        return super().send(request, **kwargs)


def _choose_candidate(candidates: Sequence[str]) -> Optional[str]:
    """First non-empty candidate, with a '?' appended when missing"""
    for candidate in candidates:
        text = candidate.strip() if isinstance(candidate, str) else ""
        if not text:
            continue
        if not text.endswith("?"):
            text = text.rstrip(".!") + "?"
        while text.endswith("??"):
            text = text[:-1]
        return text
    return None


class ParaphraseClient:
    """
    Client for an external paraphrase service.

    POST {"text": question} and read {"candidates": [...]}. Every failure
    (timeout, transport error, bad payload, no usable candidate) returns the
    input unchanged at stage rule_fixed with status failed.
    """

    def __init__(self, config: ParaphraseConfig):
        """
        Initialize the client.

        Args:
            config (ParaphraseConfig): Endpoint, timeout, retries and concurrency cap
        """
        self.config = config
        self.endpoint = config.url.rstrip("/")
        retry_strategy = Retry(
            total=config.retries,
            connect=config.retries,
            read=config.retries,
            backoff_factor=config.backoff_factor,
            status_forcelist=[429, 500, 502, 503, 504],
            allowed_methods=["POST"],
            raise_on_status=False,
        )
        adapter = TimeoutHTTPAdapter(
            timeout=config.timeout_ms / 1000.0,
            max_retries=retry_strategy,
            pool_maxsize=config.max_in_flight,
        )
        self.session = requests.Session()
        self.session.mount("http://", adapter)
        self.session.mount("https://", adapter)

    def paraphrase(self, question: str) -> ParaphraseResult:
        """
        Paraphrase one question.

        Args:
            question (str): Rule-fixed question text

        Returns:
            ParaphraseResult: Paraphrased text, or the input on failure
        """
        payload = ParaphraseRequest(text=question).model_dump()
        try:
            response = self.session.post(self.endpoint, json=payload)
            response.raise_for_status()
            parsed = ParaphraseResponse.model_validate(response.json())
        except (requests.exceptions.RequestException, ValueError) as error:
            # ValidationError and JSON decode errors are both ValueErrors
            reason = (
                error.errors()[0]["msg"] if isinstance(error, ValidationError) else str(error)
            )
            logger.warning(f"Paraphrase request failed for {question!r}: {reason}")
            return self._fallback(question, reason)

        text = _choose_candidate(parsed.candidates)
        if text is None:
            logger.warning(f"Paraphrase service returned no usable candidate for {question!r}")
            return self._fallback(question, "no usable candidate")
        return ParaphraseResult(
            text=text, stage=Stage.PARAPHRASED, status=ParaphraseStatus.OK
        )

    def paraphrase_many(self, questions: Sequence[str]) -> List[ParaphraseResult]:
        """Paraphrase in parallel, at most max_in_flight at a time, keeping input order"""
        if not questions:
            return []
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            return list(pool.map(self.paraphrase, questions))

    def close(self) -> None:
        self.session.close()

    @staticmethod
    def _fallback(question: str, reason: str) -> ParaphraseResult:
        return ParaphraseResult(
            text=question,
            stage=Stage.RULE_FIXED,
            status=ParaphraseStatus.FAILED,
            error=reason,
        )


def paraphrase_remote(
    question: str, client_config: Optional[ParaphraseConfig] = None
) -> ParaphraseResult:
    """
    Paraphrase a single question with a short-lived client.

    With no configuration the question is returned unchanged at stage
    rule_fixed with status disabled.
    """
    if client_config is None:
        return ParaphraseResult(
            text=question, stage=Stage.RULE_FIXED, status=ParaphraseStatus.DISABLED
        )
    client = ParaphraseClient(client_config)
    try:
        return client.paraphrase(question)
    finally:
        client.close()
