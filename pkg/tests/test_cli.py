import json

import pytest

from pweikonal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_distance_validate_jumps(tmp_path, capsys):
    sol = tmp_path / "d.json"
    code, out, _ = run(capsys, "distance", "two-diamonds", "-o", str(sol))
    assert code == 0 and sol.exists()
    code, out, _ = run(capsys, "validate", "two-diamonds", str(sol))
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "jumps", str(sol))
    assert code == 0 and "F = 16 + 2 sqrt2 ~" in out


def test_examples(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "diamond:1", "--pitch", "1")
    assert code == 0 and out.startswith("2 solutions, min F = 4")
    code, out, _ = run(capsys, "oracle", "diamond:1", "--pitch", "1/2", "--count-only")
    assert code == 0 and out.strip() == "98 solutions"


def test_minimize_and_render(tmp_path, capsys):
    sol, trace, svg = tmp_path / "m.json", tmp_path / "t.csv", tmp_path / "m.svg"
    code, out, _ = run(capsys, "--seed", "1", "minimize", "diamond:1", "--pitch", "1/2", "--restarts", "0",
                       "-o", str(sol), "--trace", str(trace))
    assert code == 0 and out.startswith("F = 4")
    assert trace.read_text().startswith("iteration,")
    code, _, _ = run(capsys, "render", str(sol), "-o", str(svg), "--show-jumps", "--show-levels", "2")
    assert code == 0 and svg.read_text().startswith("<?xml")


def test_weight(tmp_path, capsys):
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "weight", "unit-square", "--shells", "2", "-o", str(w))
    assert code == 0 and "level 1: empty" in out and "F_h in" in out
    assert json.loads(w.read_text())["shells"]
    code, out, _ = run(capsys, "weight", "diamond:1/4", "--shells", "2")
    assert code == 0 and "no shells built" in out


def test_minimize_with_weight(tmp_path, capsys):
    w = tmp_path / "w.json"
    run(capsys, "weight", "unit-square", "--shells", "2", "-o", str(w))
    code, out, _ = run(capsys, "minimize", "unit-square", "--weight", str(w), "--restarts", "0", "--max-iters", "1")
    assert code == 0 and out.startswith("F_h enclosure")


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "sq.json"
    bad.write_text(json.dumps({"frame": "world", "loops": [[[0, 0], [1, 0], [1, 1], [0, 1]]]}))
    assert run(capsys, "distance", str(bad), "-o", str(tmp_path / "x.json"))[0] == 2
    assert run(capsys, "oracle", "diamond:2", "--pitch", "1/4", "--budget", "1000")[0] == 3
    empty = tmp_path / "e.json"
    run(capsys, "weight", "diamond:1/4", "--shells", "2", "-o", str(empty))
    assert run(capsys, "minimize", "diamond:1/4", "--weight", str(empty))[0] == 4
    assert run(capsys, "distance", "no-such-domain", "-o", "x")[0] == 1
    assert run(capsys)[0] == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1
