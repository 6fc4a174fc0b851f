import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from dotenv import load_dotenv
from loguru import logger

from engine.annotation import load_lexicon, read_conllu
from engine.corpus import (
    build_bundle,
    cohen_kappa,
    descriptive_counts,
    load_bundle,
    load_label_column,
    load_survey_csv,
    mean_question_length,
    save_bundle,
)
from engine.generator import GeneratorConfig, QuestionGenerator
from engine.stats import (
    Layout,
    ReportTable,
    regression_battery,
    report_table,
    story_contrast,
)
from engine.templates import (
    TemplateExtractor,
    is_ranked_store,
    load_ranked,
    load_store,
    merge_corpora,
    persist_ranked,
    persist_store,
    proportions_at,
    rank_templates,
    top_template_per_demographic,
)
from models.config_models import Config, ParaphraseConfig
from models.corpus_models import CarCode, DemographicGroup, OpenCode
from models.generation_models import GenerationFilters
from models.template_models import RankedTemplates
from utils.config_loader import load_config
from utils.exceptions import GenQError, KTooLarge, UsageError
from utils.file_io import atomic_write_json, atomic_write_jsonl, atomic_write_text
from utils.logging_setup import configure_logging

# Load environment variables from .env file
load_dotenv()

DESCRIPTIVE_GROUPING = ("latinx", "caregiver")


class GenQArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> GenQArgumentParser:
    common = GenQArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: $GENQ_CONFIG)")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = GenQArgumentParser(
        prog="genq",
        description="Corpus-driven question generation for shared storybook reading",
    )
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=GenQArgumentParser
    )

    ingest = commands.add_parser("ingest", parents=[common], help="Load coded survey responses")
    ingest.add_argument("--survey", required=True, help="Coded survey CSV")
    ingest.add_argument("--conllu", help="CoNLL-U annotations keyed by question id")
    ingest.add_argument("--out", required=True, help="Corpus bundle JSON")

    kappa = commands.add_parser("kappa", parents=[common], help="Cohen's kappa of two coders")
    kappa.add_argument("--a", required=True, help="Label file of the first coder")
    kappa.add_argument("--b", required=True, help="Label file of the second coder")

    extract = commands.add_parser("extract", parents=[common], help="Extract templates")
    extract.add_argument("--corpus", required=True, help="Corpus bundle JSON")
    extract.add_argument("--out", required=True, help="Template store JSONL")
    extract.add_argument("--dataset", default="base", help="Provenance tag of this set")
    extract.add_argument(
        "--merge", action="append", default=[], help="Existing store to append (repeatable)"
    )

    rank = commands.add_parser("rank", parents=[common], help="TF-IDF template ranking")
    rank.add_argument("--templates", required=True, help="Template store JSONL")
    rank.add_argument("--out", required=True, help="Ranked store JSONL")
    rank.add_argument(
        "--top-k", type=int, nargs="+", help="Rank depths to report (default: top_k)"
    )

    generate = commands.add_parser("generate", parents=[common], help="Generate questions")
    generate.add_argument("--story", required=True, help="Story CoNLL-U with page comments")
    generate.add_argument("--templates", required=True, help="Template store, ranked or not")
    generate.add_argument("--out", required=True, help="Question JSONL")
    generate.add_argument("--car", choices=[code.value for code in CarCode])
    generate.add_argument("--open", choices=[code.value for code in OpenCode])
    generate.add_argument("--demographic", choices=[group.value for group in DemographicGroup])
    generate.add_argument("--top-k", type=int)
    generate.add_argument("--max-per-sentence", type=int)
    generate.add_argument("--paraphrase-url", help="Paraphrase service endpoint")
    generate.add_argument(
        "--seed", type=int, help="Accepted for compatibility; runs are deterministic"
    )

    analyze = commands.add_parser("analyze", parents=[common], help="Survey statistics tables")
    analyze.add_argument("--corpus", required=True, help="Corpus bundle JSON")
    analyze.add_argument("--out-dir", help="Directory for table CSVs")

    report = commands.add_parser("report", parents=[common], help="Combined text report")
    report.add_argument("--corpus", required=True, help="Corpus bundle JSON")
    report.add_argument("--templates", help="Template store for the ranking tables")
    report.add_argument("--out", help="Report file (default: standard output)")
    return parser


def _positive(value: Optional[int], flag: str) -> Optional[int]:
    if value is not None and value < 1:
        raise UsageError(f"{flag} must be at least 1")
    return value


def cmd_ingest(args: argparse.Namespace, config: Config) -> int:
    corpus = load_survey_csv(args.survey)
    annotations = read_conllu(args.conllu) if args.conllu else []
    bundle = build_bundle(corpus, annotations, load_lexicon(config.lexicon_path))
    save_bundle(bundle, args.out)
    print(
        f"{len(corpus.questions())} questions from {len(corpus.responses)} participants "
        f"({len(corpus.rejected)} rows rejected)"
    )
    return 0


def cmd_kappa(args: argparse.Namespace, config: Config) -> int:
    value = cohen_kappa(load_label_column(args.a), load_label_column(args.b))
    print(f"{value:.6f}")
    return 0


def cmd_extract(args: argparse.Namespace, config: Config) -> int:
    bundle = load_bundle(args.corpus)
    corpus, report = TemplateExtractor(config.slot_config).extract_all(
        bundle, dataset=args.dataset
    )
    if args.merge:
        existing = [load_store(path) for path in args.merge]
        corpus = merge_corpora(*existing, corpus)
    persist_store(corpus, args.out)
    per_code = ", ".join(
        f"{code.value}={len(templates)}" for code, templates in corpus.by_car_code().items()
    )
    print(
        f"{len(corpus)} templates ({per_code}; "
        f"{report.non_generative} non-generative questions skipped)"
    )
    return 0


def _load_ranked(path: str, config: Config) -> RankedTemplates:
    if is_ranked_store(path):
        return load_ranked(path)
    return rank_templates(load_store(path, config.slot_set))


def cmd_rank(args: argparse.Namespace, config: Config) -> int:
    corpus = load_store(args.templates, config.slot_set)
    if args.top_k:
        k_values = [_positive(k, "--top-k") for k in args.top_k]
    else:
        k_values = [min(config.top_k, len(corpus))]
        if config.top_k > len(corpus):
            logger.warning(f"Only {len(corpus)} templates; reporting top {k_values[0]}")
    ranked = rank_templates(corpus, k_values=k_values)
    proportions = []
    for k in k_values:
        if k > len(ranked):
            raise KTooLarge(f"k={k} exceeds the {len(ranked)} ranked templates")
        proportions.append(proportions_at(ranked, k))
    persist_ranked(ranked, args.out)
    print(report_table(proportions, Layout.TEMPLATE_PROPORTIONS).text)
    return 0


def _filters(args: argparse.Namespace, config: Config) -> GenerationFilters:
    return GenerationFilters(
        car_code=args.car,
        open_code=args.open,
        demographic=args.demographic,
        top_k=_positive(args.top_k, "--top-k") or config.top_k,
        max_per_sentence=_positive(args.max_per_sentence, "--max-per-sentence")
        or config.max_per_sentence,
        quota=config.quota,
    )


def _paraphrase_config(args: argparse.Namespace, config: Config) -> Optional[ParaphraseConfig]:
    if args.paraphrase_url is None:
        return config.paraphrase
    if config.paraphrase is None:
        return ParaphraseConfig(url=args.paraphrase_url)
    return config.paraphrase.model_copy(update={"url": args.paraphrase_url})


def cmd_generate(args: argparse.Namespace, config: Config) -> int:
    if args.seed is not None:
        logger.debug(f"Ignoring --seed {args.seed}; generation is deterministic")
    sentences = read_conllu(args.story)
    ranked = _load_ranked(args.templates, config)
    generator = QuestionGenerator(
        GeneratorConfig(
            filters=_filters(args, config), paraphrase=_paraphrase_config(args, config)
        )
    )
    try:
        run = generator.generate_story(sentences, ranked)
    finally:
        generator.close()
    atomic_write_jsonl(args.out, (q.model_dump(mode="json") for q in run.questions))
    atomic_write_json(f"{args.out}.report.json", run.report.model_dump(mode="json"))
    logger.info(f"Wrote {len(run.questions)} questions to {args.out}")
    return 0


def analysis_tables(bundle_path: str, config: Config) -> Dict[str, ReportTable]:
    """Render every survey table that has rows, keyed by table name"""
    corpus = load_bundle(bundle_path).corpus
    rows = {
        "group_counts": (
            descriptive_counts(corpus, DESCRIPTIVE_GROUPING, "relational", config.phases),
            Layout.GROUP_COUNTS,
        ),
        "regression": (
            regression_battery(corpus, tolerances=config.tolerances, phases=config.phases),
            Layout.REGRESSION,
        ),
        "story_contrast": (
            story_contrast(corpus, phases=config.phases),
            Layout.STORY_CONTRAST,
        ),
        "question_length": (
            mean_question_length(corpus, DESCRIPTIVE_GROUPING, phases=config.phases),
            Layout.QUESTION_LENGTH,
        ),
    }
    tables = {}
    for name, (results, layout) in rows.items():
        if not results:
            logger.warning(f"No rows for {name}; skipped")
            continue
        tables[name] = report_table(results, layout)
    return tables


def cmd_analyze(args: argparse.Namespace, config: Config) -> int:
    tables = analysis_tables(args.corpus, config)
    for name, table in tables.items():
        print(f"== {name} ==\n{table.text}\n")
        if args.out_dir:
            atomic_write_text(Path(args.out_dir) / f"{name}.csv", table.csv)
    return 0


def _template_sections(path: str, config: Config) -> List[str]:
    ranked = _load_ranked(path, config)
    depths = sorted({k for k in (50, 100, config.top_k) if k <= len(ranked)})
    if not depths:
        depths = [len(ranked)]
    proportions = [proportions_at(ranked, k) for k in depths]
    table = report_table(proportions, Layout.TEMPLATE_PROPORTIONS)
    sections = ["== template_proportions ==\n" + table.text]
    best = top_template_per_demographic(ranked)
    lines = [
        f"{group.value}: {best[group].stored_form}"
        for group in DemographicGroup
        if group in best
    ]
    sections.append("== top_templates ==\n" + "\n".join(lines))
    return sections


def cmd_report(args: argparse.Namespace, config: Config) -> int:
    sections = [
        f"== {name} ==\n{table.text}"
        for name, table in analysis_tables(args.corpus, config).items()
    ]
    if args.templates:
        sections.extend(_template_sections(args.templates, config))
    text = "\n\n".join(sections) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        print(text, end="")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "kappa": cmd_kappa,
    "extract": cmd_extract,
    "rank": cmd_rank,
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "report": cmd_report,
}


def run_command(argv: Sequence[str]) -> int:
    """
    Run one subcommand.

    Args:
        argv (Sequence[str]): Arguments after the program name

    Returns:
        int: 0 on success, 1 on usage errors, 2 on data errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        configure_logging(verbose=args.verbose, quiet=args.quiet)
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except UsageError as error:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"genq: error: {error}", file=sys.stderr)
        return 1
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    except (GenQError, OSError) as error:
        logger.error(f"{type(error).__name__}: {error}")
        return 2


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
