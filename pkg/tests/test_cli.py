import json

import pytest

from main import run_command
from utils.config_loader import CONFIG_ENV_VAR

UNREACHABLE = "http://127.0.0.1:9/paraphrase"


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def pipeline(tmp_path, fixtures_dir):
    """Run ingest, extract and rank; return the paths produced"""
    paths = {
        "bundle": tmp_path / "bundle.json",
        "templates": tmp_path / "templates.jsonl",
        "ranked": tmp_path / "ranked.jsonl",
    }
    assert (
        run_command(
            [
                "ingest",
                "--survey",
                str(fixtures_dir / "survey.csv"),
                "--conllu",
                str(fixtures_dir / "questions.conllu"),
                "--out",
                str(paths["bundle"]),
            ]
        )
        == 0
    )
    assert (
        run_command(
            ["extract", "--corpus", str(paths["bundle"]), "--out", str(paths["templates"])]
        )
        == 0
    )
    assert (
        run_command(
            [
                "rank",
                "--templates",
                str(paths["templates"]),
                "--out",
                str(paths["ranked"]),
                "--top-k",
                "5",
                "10",
            ]
        )
        == 0
    )
    return paths


def _generate(fixtures_dir, templates, out, *extra):
    return run_command(
        [
            "generate",
            "--story",
            str(fixtures_dir / "story.conllu"),
            "--templates",
            str(templates),
            "--out",
            str(out),
            "--config",
            str(fixtures_dir / "generate_config.yaml"),
            *extra,
        ]
    )


def _read_jsonl(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_pipeline_outputs(pipeline):
    bundle = json.loads(pipeline["bundle"].read_text(encoding="utf-8"))
    assert len(bundle["annotations"]) == 59
    ranked = _read_jsonl(pipeline["ranked"])
    assert [record["rank"] for record in ranked] == list(range(1, len(ranked) + 1))
    assert len(ranked) == len(_read_jsonl(pipeline["templates"]))


def test_generate_is_reproducible(pipeline, fixtures_dir, tmp_path):
    first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"
    assert _generate(fixtures_dir, pipeline["ranked"], first) == 0
    assert _generate(fixtures_dir, pipeline["ranked"], second) == 0
    assert first.read_bytes() == second.read_bytes()

    report = json.loads((tmp_path / "first.jsonl.report.json").read_text(encoding="utf-8"))
    assert all(report["per_car_code"][code] >= 1 for code in ("C", "A", "R"))
    questions = _read_jsonl(first)
    assert len(questions) == report["questions"]
    assert {q["stage"] for q in questions} == {"rule_fixed"}


def test_generate_from_unranked_store(pipeline, fixtures_dir, tmp_path):
    from_store = tmp_path / "from_store.jsonl"
    from_ranked = tmp_path / "from_ranked.jsonl"
    assert _generate(fixtures_dir, pipeline["templates"], from_store) == 0
    assert _generate(fixtures_dir, pipeline["ranked"], from_ranked) == 0
    assert from_store.read_bytes() == from_ranked.read_bytes()


def test_generate_with_unreachable_paraphraser(pipeline, fixtures_dir, tmp_path):
    out = tmp_path / "questions.jsonl"
    code = _generate(fixtures_dir, pipeline["ranked"], out, "--paraphrase-url", UNREACHABLE)
    assert code == 0
    questions = _read_jsonl(out)
    assert questions
    assert {q["stage"] for q in questions} == {"rule_fixed"}
    assert {q["paraphrase_status"] for q in questions} == {"failed"}
    report = json.loads((tmp_path / "questions.jsonl.report.json").read_text(encoding="utf-8"))
    assert report["paraphrase_failures"] == len(questions)


def test_generate_filters(pipeline, fixtures_dir, tmp_path):
    out = tmp_path / "relational.jsonl"
    assert _generate(fixtures_dir, pipeline["ranked"], out, "--car", "R") == 0
    assert {q["car_code"] for q in _read_jsonl(out)} == {"R"}


def test_kappa_prints_value(fixtures_dir, capsys):
    code = run_command(
        [
            "kappa",
            "--a",
            str(fixtures_dir / "labels_a.csv"),
            "--b",
            str(fixtures_dir / "labels_b.csv"),
        ]
    )
    assert code == 0
    assert capsys.readouterr().out.strip() == "0.636364"


def test_rank_reports_table(pipeline, capsys):
    capsys.readouterr()
    run_command(
        ["rank", "--templates", str(pipeline["templates"]), "--out", str(pipeline["ranked"])]
    )
    assert "latinx_caregiver" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["translate"],
        ["kappa", "--a", "x.csv"],
        ["kappa", "--a", "x.csv", "--b", "y.csv", "--bogus"],
        ["generate", "--story", "s", "--templates", "t", "--out", "o", "--car", "X"],
    ],
)
def test_usage_errors_exit_1(argv):
    assert run_command(argv) == 1


def test_non_positive_depth_is_usage_error(pipeline, tmp_path):
    argv = [
        "rank",
        "--templates",
        str(pipeline["templates"]),
        "--out",
        str(tmp_path / "r.jsonl"),
        "--top-k",
        "0",
    ]
    assert run_command(argv) == 1


def test_data_errors_exit_2(tmp_path, fixtures_dir, pipeline):
    short = tmp_path / "short.csv"
    short.write_text("label\nC\n", encoding="utf-8")
    labels_b = str(fixtures_dir / "labels_b.csv")
    assert run_command(["kappa", "--a", str(short), "--b", labels_b]) == 2

    missing = tmp_path / "missing.csv"
    out = str(tmp_path / "b.json")
    assert run_command(["ingest", "--survey", str(missing), "--out", out]) == 2

    huge = ["rank", "--templates", str(pipeline["templates"]), "--out", str(tmp_path / "r.jsonl")]
    assert run_command(huge + ["--top-k", "100000"]) == 2

    bad_config = tmp_path / "bad.yaml"
    bad_config.write_text("colour: blue\n", encoding="utf-8")
    assert run_command(huge + ["--config", str(bad_config)]) == 2

    assert run_command(
        [
            "extract",
            "--corpus",
            str(fixtures_dir / "malformed.conllu"),
            "--out",
            str(tmp_path / "t.jsonl"),
        ]
    ) == 2


def test_empty_label_file_exits_2(tmp_path, fixtures_dir):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    labels_b = str(fixtures_dir / "labels_b.csv")
    assert run_command(["kappa", "--a", str(empty), "--b", labels_b]) == 2


def test_analyze_writes_tables(pipeline, tmp_path):
    out_dir = tmp_path / "tables"
    argv = ["analyze", "--corpus", str(pipeline["bundle"]), "--out-dir", str(out_dir)]
    assert run_command(argv) == 0
    for name in ("group_counts", "story_contrast", "question_length"):
        assert (out_dir / f"{name}.csv").exists()


def test_report_includes_template_tables(pipeline, tmp_path):
    out = tmp_path / "report.txt"
    argv = [
        "report",
        "--corpus",
        str(pipeline["bundle"]),
        "--templates",
        str(pipeline["ranked"]),
        "--out",
        str(out),
    ]
    assert run_command(argv) == 0
    text = out.read_text(encoding="utf-8")
    sections = ("group_counts", "story_contrast", "template_proportions", "top_templates")
    for name in sections:
        section = f"== {name} =="
        assert section in text
