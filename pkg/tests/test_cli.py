import json

import pytest

from relsnip.cli import main

CORPUS_TEXT = (
    "Tickets are routed to the correct queue. Agents resolve tickets from queues. "
    "Every ticket carries a priority and a status. Queues group tickets by topic. "
    "Reports summarize ticket volume. Escalations move tickets between queues. "
    "Ticket queues support custom filters. Agents assign tickets quickly. "
    "Priorities order each ticket queue."
)

TONE_FIXTURE = {
    "How are tickets routed to queues?": {"tones": {"analytical": 0.78}},
    "Every ticket carries a priority.": {"tones": {"tentative": 0.8}},
}


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("corpus")
    (directory / "tickets.txt").write_text(CORPUS_TEXT, encoding="utf-8")
    return directory


@pytest.fixture(scope="module")
def archive(tmp_path_factory, corpus_dir, capsys=None):
    out = tmp_path_factory.mktemp("archive") / "repo"
    assert main(["build-lm", "--corpus", str(corpus_dir), "--out", str(out)]) == 0
    return out


def test_build_lm_writes_archive(archive, capsys):
    assert (archive / "manifest.json").exists()
    assert (archive / "documents.json").exists()
    manifest = json.loads((archive / "manifest.json").read_text("utf-8"))
    assert len(manifest["models"]) == 20


def test_build_lm_prints_repo_id(corpus_dir, tmp_path, capsys):
    out = tmp_path / "repo"
    main(["build-lm", "--corpus", str(corpus_dir), "--out", str(out)])
    printed = capsys.readouterr().out.strip()
    manifest = json.loads((out / "manifest.json").read_text("utf-8"))
    assert printed == manifest["corpus_fingerprint"]


def test_build_lm_missing_corpus_fails(tmp_path):
    with pytest.raises(SystemExit):
        main(["build-lm", "--corpus", str(tmp_path / "nope"), "--out",
              str(tmp_path / "repo")])


def test_extract_outputs_window_result(archive, capsys):
    assert main(["extract", "--repo", str(archive),
                 "--window", "How are tickets routed to queues?",
                 "--z", "4", "--mode", "auto"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["model"]["method"]
    assert result["terms"]
    assert len(result["terms"]) <= 4
    assert result["snippets"]


def test_extract_manual_mode_five_snippets(archive, capsys):
    assert main(["extract", "--repo", str(archive),
                 "--window", "ticket queues priority", "--mode", "manual"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert len(result["snippets"]) == 5


def test_replay_is_byte_identical_across_runs(archive, tmp_path, capsys):
    transcript = tmp_path / "talk.tsv"
    transcript.write_text(
        "A\tHow are tickets routed to queues?\n"
        "B\tEvery ticket carries a priority.\n",
        encoding="utf-8")
    fixture = tmp_path / "tones.json"
    fixture.write_text(json.dumps(TONE_FIXTURE), encoding="utf-8")

    out1 = tmp_path / "report1.json"
    out2 = tmp_path / "report2.json"
    for out in (out1, out2):
        assert main(["replay", "--repo", str(archive),
                     "--transcript", str(transcript),
                     "--out", str(out),
                     "--tone-fixture", str(fixture)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    data = json.loads(out1.read_text("utf-8"))
    assert len(data["windows"]) == 2
    assert data["windows"][0]["tones"]["analytical"] == 0.78
    # tentative 0.8 -> three snippets on the second window
    assert len(data["windows"][1]["snippets"]) == 3


def test_replay_rejects_bad_transcript(archive, tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("X no tab here\n", encoding="utf-8")
    with pytest.raises(ValueError):
        main(["replay", "--repo", str(archive), "--transcript", str(bad),
              "--out", str(tmp_path / "r.json")])
