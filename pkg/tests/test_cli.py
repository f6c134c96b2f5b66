"""End-to-end tests for the command-line interface.

Everything runs in-process through cli.run() so exit codes and stderr are
observable without subprocess overhead. Fixture inputs live in
tests/fixtures/ and are regenerated by scripts/build_fixtures.py.
"""

import json

import pytest

from seatok import load_corpus, load_vocab
from seatok.cli import SEED_ENV_VAR, run

from conftest import FIXTURES


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_vocab_extend_end_to_end(tmp_path, capsys):
    out = tmp_path / "v.json"
    report = tmp_path / "report.json"
    code, _, err = invoke(
        capsys,
        "vocab", "extend",
        "--base", str(FIXTURES / "base_vocab.json"),
        "--target", str(FIXTURES / "target_vocab.json"),
        "--corpus", str(FIXTURES / "corpus.jsonl"),
        "--min-freq", "2",
        "--out", str(out),
        "--report", str(report),
    )
    assert code == 0, err
    vocab = load_vocab(out)
    expected = json.loads((FIXTURES / "expected.json").read_text("utf-8"))
    assert list(vocab.extension_texts()) == expected["extension_texts"]
    rep = json.loads(report.read_text("utf-8"))
    assert rep["kept"] == expected["extension_texts"]
    assert rep["min_freq"] == 2


def test_missing_required_flag_is_usage_error(tmp_path, capsys):
    code, _, err = invoke(
        capsys,
        "vocab", "extend",
        "--base", str(FIXTURES / "base_vocab.json"),
        "--target", str(FIXTURES / "target_vocab.json"),
        "--corpus", str(FIXTURES / "corpus.jsonl"),
        "--out", str(tmp_path / "v.json"),
    )
    assert code == 1
    assert err.startswith("error: E_USAGE:")
    assert "--min-freq" in err


def test_metrics_ratio_on_empty_parallel_file(tmp_path, capsys):
    empty = tmp_path / "parallel.jsonl"
    empty.write_text("")
    code, _, err = invoke(
        capsys,
        "metrics", "ratio",
        "--subject", str(FIXTURES / "base_vocab.json"),
        "--baseline", str(FIXTURES / "baseline_vocab.json"),
        "--parallel", str(empty),
        "--out", str(tmp_path / "report.json"),
    )
    assert code == 1
    assert err.startswith("error: E_FORMAT:")


def test_metrics_ratio_matches_fixture(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, stdout, _ = invoke(
        capsys,
        "metrics", "ratio",
        "--subject", str(FIXTURES / "base_vocab.json"),
        "--baseline", str(FIXTURES / "baseline_vocab.json"),
        "--parallel", str(FIXTURES / "parallel.jsonl"),
        "--out", str(out),
    )
    assert code == 0
    expected = json.loads((FIXTURES / "expected.json").read_text("utf-8"))
    rep = json.loads(out.read_text("utf-8"))
    assert rep["per_language"]["agg"]["mean_ratio"] == pytest.approx(
        expected["before_mean_ratio"]
    )
    assert "agg" in stdout  # human-readable table on stdout


def test_missing_input_path(tmp_path, capsys):
    code, _, err = invoke(
        capsys,
        "vocab", "inspect", "--vocab", str(tmp_path / "nope.json"),
    )
    assert code == 1
    assert err.startswith("error: E_PATH:")


def test_unknown_subcommand(capsys):
    code, _, err = invoke(capsys, "vocab", "frobnicate")
    assert code == 1
    assert err.startswith("error: E_USAGE:")


def test_stderr_is_machine_parsable(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = invoke(capsys, "vocab", "inspect", "--vocab", str(bad))
    assert code == 1
    line = err.splitlines()[0]
    assert line.startswith("error: E_")
    prefix, _, _ = line.partition(": ")
    assert prefix == "error"


def test_vocab_inspect_encode_decode(capsys):
    code, stdout, _ = invoke(
        capsys,
        "vocab", "inspect",
        "--vocab", str(FIXTURES / "baseline_vocab.json"),
        "--encode", "the cat",
    )
    assert code == 0
    info = json.loads(stdout)
    ids = info["ids"]

    code, stdout, _ = invoke(
        capsys,
        "vocab", "inspect",
        "--vocab", str(FIXTURES / "baseline_vocab.json"),
        "--decode", ",".join(str(i) for i in ids),
    )
    assert code == 0
    assert json.loads(stdout)["text"] == "the cat"


def test_config_file_supplies_flags(tmp_path, capsys):
    config = tmp_path / "seatok.toml"
    out = tmp_path / "v.json"
    config.write_text(
        "[vocab.extend]\n"
        f'base = "{FIXTURES / "base_vocab.json"}"\n'
        f'target = "{FIXTURES / "target_vocab.json"}"\n'
        f'corpus = "{FIXTURES / "corpus.jsonl"}"\n'
        "min-freq = 2\n"
        f'out = "{out}"\n'
    )
    code, _, err = invoke(capsys, "vocab", "extend", "--config", str(config))
    assert code == 0, err
    assert out.exists()


def test_flag_overrides_config(tmp_path, capsys):
    config = tmp_path / "seatok.toml"
    config_out = tmp_path / "from_config.json"
    flag_out = tmp_path / "from_flag.json"
    config.write_text(
        "[vocab.extend]\n"
        f'base = "{FIXTURES / "base_vocab.json"}"\n'
        f'target = "{FIXTURES / "target_vocab.json"}"\n'
        f'corpus = "{FIXTURES / "corpus.jsonl"}"\n'
        "min-freq = 2\n"
        f'out = "{config_out}"\n'
    )
    code, _, _ = invoke(
        capsys,
        "vocab", "extend", "--config", str(config), "--out", str(flag_out),
    )
    assert code == 0
    assert flag_out.exists()
    assert not config_out.exists()


def test_unknown_config_key_rejected(tmp_path, capsys):
    config = tmp_path / "seatok.toml"
    config.write_text('[vocab.inspect]\nvocabulary = "typo.json"\n')
    code, _, err = invoke(
        capsys,
        "vocab", "inspect", "--config", str(config),
        "--vocab", str(FIXTURES / "base_vocab.json"),
    )
    assert code == 1
    assert err.startswith("error: E_CONFIG:")
    assert "vocabulary" in err


def test_print_effective_config_runs_nothing(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, stdout, _ = invoke(
        capsys,
        "vocab", "extend",
        "--base", str(FIXTURES / "base_vocab.json"),
        "--target", str(FIXTURES / "target_vocab.json"),
        "--corpus", str(FIXTURES / "corpus.jsonl"),
        "--min-freq", "2",
        "--out", str(out),
        "--print-effective-config",
    )
    assert code == 0
    effective = json.loads(stdout)
    assert effective["min_freq"] == 2
    assert not out.exists()


def test_seed_from_environment(tmp_path, capsys, monkeypatch):
    args = [
        "data", "join-multiturn",
        "--sft", str(FIXTURES / "sft.jsonl"),
        "--distribution", "2=1.0",
        "--out", str(tmp_path / "conv.jsonl"),
    ]
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    code, _, err = invoke(capsys, *args)
    assert code == 1
    assert SEED_ENV_VAR in err

    monkeypatch.setenv(SEED_ENV_VAR, "7")
    code, _, _ = invoke(capsys, *args)
    assert code == 0
    env_bytes = (tmp_path / "conv.jsonl").read_bytes()

    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    code, _, _ = invoke(capsys, *args, "--seed", "7")
    assert code == 0
    assert (tmp_path / "conv.jsonl").read_bytes() == env_bytes


def test_data_pack_round_trip(tmp_path, capsys):
    out = tmp_path / "packed.jsonl"
    code, _, err = invoke(
        capsys,
        "data", "pack",
        "--corpus", str(FIXTURES / "corpus.jsonl"),
        "--vocab", str(FIXTURES / "base_vocab.json"),
        "--max-len", "64",
        "--out", str(out),
    )
    assert code == 0, err
    lines = out.read_text("utf-8").splitlines()
    assert lines
    first = json.loads(lines[0])
    assert set(first) == {"ids", "mask", "boundaries"}
    assert len(first["ids"]) == 64


def test_data_pack_binary_output(tmp_path, capsys):
    out = tmp_path / "packed.jsonl"
    binary = tmp_path / "packed.bin"
    code, _, err = invoke(
        capsys,
        "data", "pack",
        "--corpus", str(FIXTURES / "corpus.jsonl"),
        "--vocab", str(FIXTURES / "base_vocab.json"),
        "--max-len", "32",
        "--out", str(out),
        "--binary", str(binary),
    )
    assert code == 0, err
    data = binary.read_bytes()
    count = int.from_bytes(data[:4], "little")
    assert count == 32  # first record length prefix


def test_data_filter_with_seed_texts(tmp_path, capsys):
    out = tmp_path / "kept.jsonl"
    code, _, err = invoke(
        capsys,
        "data", "filter",
        "--corpus", str(FIXTURES / "mixed_corpus.jsonl"),
        "--langid-seeds", str(FIXTURES / "langid_seeds.jsonl"),
        "--allowed", "agg",
        "--threshold", "0.1",
        "--out", str(out),
    )
    assert code == 0, err
    kept = load_corpus(out)
    assert 0 < len(kept) < 10
    # documents pass through unmodified; the kept half is the Thai-script one
    assert all("ก" <= d.text[0] <= "๛" for d in kept)


def test_data_sample_deterministic(tmp_path, capsys):
    outputs = []
    for name in ("one.jsonl", "two.jsonl"):
        out = tmp_path / name
        code, _, err = invoke(
            capsys,
            "data", "sample",
            "--stream", f"agg={FIXTURES / 'stream_agg.jsonl'}",
            "--stream", f"eng={FIXTURES / 'stream_eng.jsonl'}",
            "--schedule", str(FIXTURES / "schedule.json"),
            "--seed", "13",
            "--out", str(out),
        )
        assert code == 0, err
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 20  # phase lengths 15 + 5


def test_pref_generate_and_export(tmp_path, capsys):
    records = tmp_path / "records.jsonl"
    dropped = tmp_path / "dropped.jsonl"
    code, _, err = invoke(
        capsys,
        "pref", "generate",
        "--pairs", str(FIXTURES / "pairs.jsonl"),
        "--judge", "longer-wins",
        "--records", str(records),
        "--dropped", str(dropped),
    )
    assert code == 0, err

    dpo = tmp_path / "dpo.jsonl"
    code, _, err = invoke(
        capsys,
        "pref", "export",
        "--records", str(records),
        "--out", str(dpo),
    )
    assert code == 0, err
    for line in dpo.read_text("utf-8").splitlines():
        row = json.loads(line)
        assert set(row) == {"prompt", "chosen", "rejected"}
        assert len(row["chosen"]) > len(row["rejected"])


def test_reruns_are_byte_identical(tmp_path, capsys):
    digests = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.json"
        report = tmp_path / f"{name}_report.json"
        code, _, _ = invoke(
            capsys,
            "vocab", "extend",
            "--base", str(FIXTURES / "base_vocab.json"),
            "--target", str(FIXTURES / "target_vocab.json"),
            "--corpus", str(FIXTURES / "corpus.jsonl"),
            "--min-freq", "2",
            "--out", str(out),
            "--report", str(report),
        )
        assert code == 0
        digests.append(out.read_bytes() + report.read_bytes())
    assert digests[0] == digests[1]


def test_help_exits_zero(capsys):
    code, stdout, _ = invoke(capsys, "--help")
    assert code == 0
    assert stdout.startswith("usage:")
