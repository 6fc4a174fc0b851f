"""
Template store persistence.

One JSON object per line:
{"template_id", "elements": [{"kind": "lit"|"slot", "value"}], "car_code",
 "open_code", "demographic": {"latinx", "caregiver"}, "source_question_id",
 "duplicate_count", "dataset", "slot_config"}. Ranked stores add "rank" and
"score" and carry no slot_config.
"""

import json
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from models.annotation_models import SlotLabel
from models.corpus_models import DemographicGroup
from models.template_models import (
    RankedTemplate,
    RankedTemplates,
    Template,
    TemplateCorpus,
)
from utils.exceptions import BadRecord, BadValue, DuplicateTemplateId
from utils.file_io import atomic_write_jsonl


def template_to_record(
    template: Template, slot_config: Optional[Sequence[SlotLabel]] = None
) -> Dict:
    group = template.demographic
    record = {
        "template_id": template.template_id,
        "elements": [
            {"kind": element.kind.value, "value": element.value}
            for element in template.elements
        ],
        "car_code": template.car_code.value,
        "open_code": template.open_code.value,
        "demographic": {"latinx": group.is_latinx, "caregiver": group.is_caregiver},
        "source_question_id": template.source_question_id,
        "duplicate_count": template.duplicate_count,
        "dataset": template.dataset,
    }
    if slot_config is not None:
        record["slot_config"] = [label.value for label in slot_config]
    return record


def _flag(value, name: str) -> bool:
    if not isinstance(value, bool):
        raise TypeError(f"demographic.{name} must be true or false, got {value!r}")
    return value


def template_from_record(record: Dict, line_number: int) -> Template:
    """
    Build a Template from one decoded store record.

    Raises:
        BadRecord: Missing fields or invalid values
    """
    try:
        demographic = record["demographic"]
        group = DemographicGroup.from_flags(
            _flag(demographic["latinx"], "latinx"), _flag(demographic["caregiver"], "caregiver")
        )
        return Template(
            template_id=record["template_id"],
            elements=record["elements"],
            car_code=record["car_code"],
            open_code=record["open_code"],
            demographic=group,
            source_question_id=record["source_question_id"],
            duplicate_count=record.get("duplicate_count", 1),
            dataset=record.get("dataset", "base"),
        )
    except (KeyError, TypeError) as error:
        raise BadRecord(f"missing or malformed field {error}", line_number) from error
    except ValidationError as error:
        raise BadRecord(
            f"invalid template record: {error.errors()[0]['msg']}", line_number
        ) from error


def _records(path: Union[str, Path]) -> Iterator[Tuple[int, Dict]]:
    """Yield (line number, decoded object) for every non-blank line"""
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as error:
                raise BadRecord(f"invalid JSON: {error.msg}", line_number) from error
            if not isinstance(record, dict):
                raise BadRecord("record is not a JSON object", line_number)
            yield line_number, record


def _collect(
    path: Union[str, Path],
) -> Tuple[List[Template], List[Tuple[int, Dict]]]:
    templates: List[Template] = []
    records: List[Tuple[int, Dict]] = []
    seen = set()
    for line_number, record in _records(path):
        template = template_from_record(record, line_number)
        if template.template_id in seen:
            raise DuplicateTemplateId(
                f"template id {template.template_id} appears twice",
                line_number=line_number,
            )
        seen.add(template.template_id)
        templates.append(template)
        records.append((line_number, record))
    return templates, records


def _corpus(
    templates: List[Template], slot_set: Optional[Iterable[SlotLabel]]
) -> TemplateCorpus:
    provenance = []
    for template in templates:
        if template.dataset not in provenance:
            provenance.append(template.dataset)
    try:
        return TemplateCorpus(
            templates=tuple(templates),
            slot_config=tuple(slot_set) if slot_set is not None else tuple(SlotLabel),
            provenance=tuple(provenance),
        )
    except ValidationError as error:
        raise BadValue(error.errors()[0]["msg"]) from error


def _stored_slot_config(records: List[Tuple[int, Dict]]) -> Optional[List[SlotLabel]]:
    """Slot config written with the first record that carries one"""
    for line_number, record in records:
        if "slot_config" not in record:
            continue
        try:
            return [SlotLabel(value) for value in record["slot_config"]]
        except (TypeError, ValueError) as error:
            raise BadRecord(f"invalid slot_config: {error}", line_number) from error
    return None


def persist_store(corpus: TemplateCorpus, path: Union[str, Path]) -> None:
    """Write a template corpus as JSON Lines, in corpus order"""
    atomic_write_jsonl(
        path, (template_to_record(t, corpus.slot_config) for t in corpus.templates)
    )
    logger.info(f"Wrote {len(corpus)} templates to {path}")


def load_store(
    path: Union[str, Path], slot_set: Optional[Iterable[SlotLabel]] = None
) -> TemplateCorpus:
    """
    Read a template store. An empty file is an empty corpus.

    Args:
        path (str | Path): JSON Lines store
        slot_set (Iterable[SlotLabel], optional): Slot labels templates may use;
            the slot config stored with the records when omitted

    Returns:
        TemplateCorpus: Templates in file order

    Raises:
        BadRecord: A line is not a valid template record
        DuplicateTemplateId: Two lines share a template id
    """
    templates, records = _collect(path)
    if slot_set is None:
        slot_set = _stored_slot_config(records)
    return _corpus(templates, slot_set)


def persist_ranked(ranked: RankedTemplates, path: Union[str, Path]) -> None:
    """Write ranked templates, best first, with their rank and score"""
    atomic_write_jsonl(
        path,
        (
            {**template_to_record(entry.template), "rank": entry.rank, "score": entry.score}
            for entry in ranked.entries
        ),
    )
    logger.info(f"Wrote {len(ranked)} ranked templates to {path}")


def is_ranked_store(path: Union[str, Path]) -> bool:
    """True when the first record of a store carries a score"""
    for _, record in _records(path):
        return "score" in record
    return False


def load_ranked(path: Union[str, Path]) -> RankedTemplates:
    """
    Read a ranked store written by persist_ranked.

    Raises:
        BadRecord: A record lacks rank/score, or the order is not a ranking
    """
    templates, records = _collect(path)
    entries = []
    for template, (line_number, record) in zip(templates, records):
        try:
            entries.append(
                RankedTemplate(
                    rank=int(record["rank"]), score=float(record["score"]), template=template
                )
            )
        except (KeyError, TypeError, ValueError) as error:
            raise BadRecord(f"ranked record lacks rank or score: {error}", line_number)
    try:
        return RankedTemplates(entries=tuple(entries))
    except ValidationError as error:
        raise BadRecord(error.errors()[0]["msg"], len(entries)) from error
