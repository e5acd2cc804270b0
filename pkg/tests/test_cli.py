"""CLI surface: synth -> track -> eval -> plot, plus failure modes."""

import json

import pytest

from hypertrack.cli import main
from hypertrack.synth import GenSpec


def _write_spec(tmp_path, **overrides):
    spec = GenSpec(n_frames=6, seed=7, **overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()), encoding="utf-8")
    return path


def test_full_pipeline(tmp_path):
    spec = _write_spec(tmp_path)
    seq = tmp_path / "seq.jsonl"
    assert main(["synth", "--spec", str(spec), "--out", str(seq)]) == 0

    results = tmp_path / "results.csv"
    assert main(["track", "--seq", str(seq), "--out", str(results)]) == 0
    assert results.read_text().startswith("frame,cx,cy,w,h,score,n_reliable\n")

    metrics = tmp_path / "metrics.json"
    assert main(["eval", "--results", str(results), "--seq", str(seq), "--out", str(metrics)]) == 0
    payload = json.loads(metrics.read_text())
    assert 0.0 <= payload["success_auc"] <= 1.0
    curves = tmp_path / "metrics.curves.csv"
    assert curves.exists()

    plot = tmp_path / "plot.svg"
    assert main(["plot", "--out", str(plot), str(curves)]) == 0
    assert plot.read_text().startswith("<svg")


def test_track_with_config_and_dumps(tmp_path):
    spec = _write_spec(tmp_path)
    seq = tmp_path / "seq.jsonl"
    main(["synth", "--spec", str(spec), "--out", str(seq)])

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"order": 2, "rng_seed": 5}), encoding="utf-8")
    results = tmp_path / "r.csv"
    graph_dump = tmp_path / "graph.jsonl"
    mode_dump = tmp_path / "modes.jsonl"
    code = main(
        [
            "track",
            "--seq",
            str(seq),
            "--config",
            str(cfg),
            "--out",
            str(results),
            "--dump-graph",
            str(graph_dump),
            "--dump-modes",
            str(mode_dump),
        ]
    )
    assert code == 0
    lines = graph_dump.read_text().strip().splitlines()
    assert len(lines) == 5
    first = json.loads(lines[0])
    assert first["order"] == 2
    assert json.loads(mode_dump.read_text().splitlines()[0])["modes"]


def test_commands_are_byte_deterministic(tmp_path):
    spec = _write_spec(tmp_path)
    outs = []
    for tag in ("a", "b"):
        seq = tmp_path / f"seq_{tag}.jsonl"
        results = tmp_path / f"res_{tag}.csv"
        metrics = tmp_path / f"m_{tag}.json"
        plot = tmp_path / f"p_{tag}.svg"
        main(["synth", "--spec", str(spec), "--out", str(seq)])
        main(["track", "--seq", str(seq), "--out", str(results)])
        main(["eval", "--results", str(results), "--seq", str(seq), "--out", str(metrics)])
        main(["plot", "--out", str(plot), str(tmp_path / f"m_{tag}.curves.csv")])
        outs.append((seq.read_bytes(), results.read_bytes(), metrics.read_bytes(), plot.read_bytes()))
    assert outs[0][0] == outs[1][0]
    assert outs[0][1] == outs[1][1]
    assert outs[0][2] == outs[1][2]
    # plot bytes differ only in the legend label, which embeds the file stem
    assert outs[0][3].replace(b"m_a", b"m_x") == outs[1][3].replace(b"m_b", b"m_x")


def test_missing_file_exits_nonzero(tmp_path, capsys):
    assert main(["track", "--seq", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "r.csv")]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_sequence_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n", encoding="utf-8")
    assert main(["track", "--seq", str(bad), "--out", str(tmp_path / "r.csv")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_eval_frame_mismatch_exits_nonzero(tmp_path, capsys):
    spec = _write_spec(tmp_path)
    seq = tmp_path / "seq.jsonl"
    main(["synth", "--spec", str(spec), "--out", str(seq)])
    results = tmp_path / "r.csv"
    results.write_text("frame,cx,cy,w,h,score,n_reliable\n0,1,1,2,2,0,0\n", encoding="utf-8")
    assert main(["eval", "--results", str(results), "--seq", str(seq), "--out", str(tmp_path / "m.json")]) == 2
    assert "mismatch" in capsys.readouterr().err
