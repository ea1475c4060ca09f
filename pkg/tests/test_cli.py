import json

import pytest

from weylpat.claims import REGISTRY, VerifyOutcome, run_all
from weylpat.cli import parse_matrix, run
from weylpat.exactlin import RationalMatrix


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--json")
    data = json.loads(out)
    assert data["schema_version"] == 1
    return code, data


def test_info_bc3(capsys):
    code, out, _ = call(capsys, "info", "BC3")
    assert code == 0
    assert "hyperplanes: 9" in out and "Weyl order: 48" in out and "chambers: 48" in out
    code, data = call_json(capsys, "info", "bc3")
    assert (data["hyperplanes"], data["weyl_order"], data["chambers"]) == (9, 48, 48)


def test_embed_a4_d4_has_no_classes(capsys):
    code, out, _ = call(capsys, "embed", "A4", "D4", "--classes")
    assert code == 0 and "0 classes" in out
    code, data = call_json(capsys, "embed", "A4", "D4", "--classes")
    assert data["classes"] == []


def test_embed_json_classes(capsys):
    code, data = call_json(capsys, "embed", "A3", "BC3", "--classes")
    assert len(data["classes"]) == 3
    for c in data["classes"]:
        assert {"matrix", "assignment", "conformal", "distortion", "class_id"} <= set(c)
        assert {"lower", "upper"} <= set(c["distortion"])


def test_threads_do_not_change_output(capsys):
    _, one = call_json(capsys, "embed", "A3", "BC3", "--classes", "--threads", "1")
    _, two = call_json(capsys, "embed", "A3", "BC3", "--classes", "--threads", "2")
    assert one == two


def test_families_and_anmap(capsys):
    code, data = call_json(capsys, "families", "A4")
    assert code == 0 and sum(f["large"] for f in data["families"]) == 5
    code, data = call_json(capsys, "anmap", "A2", "C2")
    assert code == 0 and len(data["maps"]) == 2
    assert all("correspondence" in m and "matrix" in m for m in data["maps"])


def test_subdivide(capsys):
    code, data = call_json(capsys, "subdivide", "A2", "C2", "--map", "paper-t")
    assert code == 0
    assert data["report"]["total"] == 8 and data["report"]["average"] == "4/3"
    code, data = call_json(capsys, "subdivide", "BC2", "BC2", "--map", "1,1;1,-1")
    assert data["report"]["total"] == 8


def test_distortion(capsys):
    code, data = call_json(capsys, "distortion", "--map", "second-form", "--rank", "3")
    assert code == 0 and data["distortion"] == {"lower": "2", "upper": "2"}
    code, data = call_json(capsys, "distortion", "--map", "[[3, -4], [4, 3]]")
    assert data["conformal"] and data["distortion"]["conformal_scalar"] == "25"


@pytest.mark.parametrize(
    "argv",
    [
        ["info", "E6"],
        ["embed", "A2", "BC3"],
        ["embed", "A4", "BC4", "--rank-cap", "3"],
        ["distortion", "--map", "1,2;3"],
        ["distortion", "--map", "1,1;1,1"],
        ["distortion", "--map", "first-form"],
        ["subdivide", "A2", "C2"],
        ["frobnicate"],
        [],
        ["info", "A3", "--threads", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and "error" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "weylpat.toml"
    cfg.write_text("threads = 2\nrank_cap = 3\n")
    code, _, err = call(capsys, "embed", "A4", "BC4", "--config", str(cfg))
    assert code == 2 and "cap" in err
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 'blue'\n")
    assert call(capsys, "info", "A2", "--config", str(bad))[0] == 2


def test_parse_matrix():
    assert parse_matrix("1/2, 0; 0 1") == RationalMatrix([["1/2", 0], [0, 1]])
    assert parse_matrix('[["1/3", 2]]') == RationalMatrix([["1/3", 2]])


def test_verify_rank_max_4_passes(capsys):
    code, data = call_json(capsys, "verify", "--rank-max", "4")
    assert code == 0
    ids = [o["claim_id"] for o in data["outcomes"]]
    assert ids == [c.claim_id for c in REGISTRY]  # every claim exactly once
    assert all(o["status"] == "pass" for o in data["outcomes"])


def test_verify_skips_and_is_deterministic(capsys):
    code, data = call_json(capsys, "verify", "--rank-max", "2", "--claim", "3", "--claim", "9")
    assert code == 0
    assert [(o["claim_id"], o["status"]) for o in data["outcomes"]] == [(3, "skipped"), (9, "pass")]
    a = run_all(3, only={2, 6, 8})
    b = run_all(3, only={2, 6, 8})
    assert [(o.status, o.details) for o in a] == [(o.status, o.details) for o in b]


def test_verify_outcome_roundtrip():
    for o in run_all(3, only={1, 8}):
        back = VerifyOutcome.from_json(json.loads(json.dumps(o.to_json())))
        assert back == o and back.details == o.details
