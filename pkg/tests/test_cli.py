import json

import numpy as np
import pytest

from frameperturb import io
from frameperturb.cli import main
from frameperturb.frames import FramePair, validate_frame
from frameperturb.generate import canonical_frame, mercedes_frame
from frameperturb.space import PNormSpace


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def candidate_doc(F, X=None, Y=None):
    X = F.vectors if X is None else X
    Y = F.functionals if Y is None else Y
    return {"base": F.to_json(), "candidate": [{"x": list(map(float, x)), "y": list(map(float, y))}
                                               for x, y in zip(X, Y)]}


@pytest.fixture
def tight_file(tmp_path, capsys):
    path = tmp_path / "tight.json"
    code, _, _ = run(["gen", "--dim", 2, "--count", 3, "--p", 2, "--kind", "tight", "--seed", 0,
                      "--output", path], capsys)
    assert code == 0
    return str(path)


def test_gen_then_validate(tight_file, capsys):
    code, out, _ = run(["validate", tight_file], capsys)
    report = json.loads(out)
    assert code == 0 and report["is_frame"] and report["residual"] <= 1e-10
    io.validate(json.loads(open(tight_file).read()), io.FRAME_SCHEMA)


def test_gen_is_deterministic(tmp_path, capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(["gen", "--dim", 3, "--count", 5, "--p", "inf", "--kind", "random", "--seed", 7], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["space"]["p"] == "inf"


def test_validate_rejects_non_frame(tmp_path, capsys):
    F = FramePair(PNormSpace(2, 2), np.eye(2), 2 * np.eye(2))
    code, out, _ = run(["validate", write(tmp_path / "f.json", F.to_json())], capsys)
    assert code == 2 and not json.loads(out)["is_frame"]


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "space": {"dim": 2, "p": 2},\n  "pairs": [,]\n}')
    code, _, err = run(["validate", bad], capsys)
    assert code == 1 and "line 3" in err and "column" in err


def test_schema_violation_reports_path(tmp_path, capsys):
    path = write(tmp_path / "f.json", {"space": {"dim": 2, "p": 0.5}, "pairs": [{"a": [1, 0], "b": [1, 0]}]})
    code, _, err = run(["validate", path], capsys)
    assert code == 1 and "space/p" in err


def test_dimension_mismatch_is_input_error(tmp_path, capsys):
    path = write(tmp_path / "f.json", {"space": {"dim": 2, "p": 2}, "pairs": [{"a": [1, 0, 0], "b": [1, 0]}]})
    code, _, _ = run(["validate", path], capsys)
    assert code == 1


def test_missing_file(capsys, tmp_path):
    code, _, err = run(["validate", tmp_path / "nope.json"], capsys)
    assert code == 1 and "nope.json" in err


def test_constants_mercedes(tmp_path, capsys):
    path = write(tmp_path / "m.json", mercedes_frame(2.0).to_json())
    code, out, _ = run(["constants", path, "--samples", 200], capsys)
    report = json.loads(out)
    io.validate(report, io.CONSTANTS_SCHEMA)
    assert code == 0
    assert report["K"]["lower"] == pytest.approx(1.0, abs=1e-9)
    assert report["L"]["upper"] == pytest.approx(1.0, abs=1e-9)


def test_check_identity_candidate(tight_file, tmp_path, capsys):
    F = FramePair.from_json(json.loads(open(tight_file).read()))
    path = write(tmp_path / "c.json", candidate_doc(F))
    code, out, _ = run(["check", path], capsys)
    report = json.loads(out)
    io.validate(report, io.CRITERION_SCHEMA)
    assert code == 0 and report["value"]["upper"] == 0.0 and report["satisfied"]


def test_check_all_criteria(tight_file, tmp_path, capsys):
    F = FramePair.from_json(json.loads(open(tight_file).read()))
    path = write(tmp_path / "c.json", candidate_doc(F, X=1.01 * F.vectors))
    code, out, _ = run(["check", path, "--criterion", "all"], capsys)
    reports = json.loads(out)["reports"]
    assert code == 0 and [r["criterion"] for r in reports] == ["thm31", "cor34", "thm33", "cor35", "cor36"]
    for r in reports:
        io.validate(r, io.CRITERION_SCHEMA)


def test_check_unsatisfied_exit_two(tight_file, tmp_path, capsys):
    F = FramePair.from_json(json.loads(open(tight_file).read()))
    path = write(tmp_path / "c.json", candidate_doc(F, X=3 * F.vectors))
    code, out, _ = run(["check", path], capsys)
    assert code == 2 and not json.loads(out)["satisfied"]


def test_perturb_canonical_shift(tmp_path, capsys):
    F = canonical_frame(PNormSpace(2, 2))
    X = F.vectors.copy()
    X[0] = [1.1, 0.0]
    path = write(tmp_path / "c.json", candidate_doc(F, X=X))
    code, out, _ = run(["perturb", path], capsys)
    cert = json.loads(out)
    io.validate(cert, io.CERTIFICATE_SCHEMA)
    assert code == 0 and cert["status"] == "CERTIFIED"
    # 2 K ||x_1 - a_1|| / ||a_1|| with K = 1
    assert cert["value"]["upper"] == pytest.approx(0.2, abs=1e-12)
    np.testing.assert_allclose(cert["T"], [[1.1, 0], [0, 1]], atol=1e-15)
    np.testing.assert_allclose(cert["R"], [[1 / 1.1, 0], [0, 1]], atol=1e-12)
    for key in ("frame_xz", "frame_wy"):
        G = FramePair.from_json(cert[key])
        assert validate_frame(G, tol=1e-8).is_frame


def test_perturb_besselian_certificate(tight_file, tmp_path, capsys):
    F = FramePair.from_json(json.loads(open(tight_file).read()))
    path = write(tmp_path / "c.json", candidate_doc(F, X=1.02 * F.vectors, Y=0.99 * F.functionals))
    code, out, _ = run(["perturb", path, "--criterion", "thm33"], capsys)
    cert = json.loads(out)
    assert code == 0 and cert["besselian"]["holds_xz"] and cert["besselian"]["holds_wy"]


def test_perturb_refuses_then_force(tmp_path, capsys):
    F = canonical_frame(PNormSpace(2, 2))
    # thm31 gives 2 > 1 although ||T - I|| = 0.5, so forcing still inverts
    path = write(tmp_path / "c.json", candidate_doc(F, X=1.5 * F.vectors))
    code, _, err = run(["perturb", path], capsys)
    assert code == 2 and "not < 1" in err
    code, out, _ = run(["perturb", path, "--force"], capsys)
    cert = json.loads(out)
    assert code == 2 and cert["status"] == "UNCERTIFIED"
    np.testing.assert_allclose(cert["R"], np.eye(2) / 1.5, atol=1e-12)


def test_perturb_force_without_contraction(tmp_path, capsys):
    F = canonical_frame(PNormSpace(2, 2))
    path = write(tmp_path / "c.json", candidate_doc(F, X=2.5 * F.vectors))
    code, _, err = run(["perturb", path, "--force"], capsys)
    assert code == 2 and "Neumann" in err


def test_dimension_commands(tmp_path, capsys):
    F = mercedes_frame(2.0)
    path = write(tmp_path / "m.json", F.to_json())
    for extra in ([], ["--sharp"]):
        code, out, _ = run(["dimension", path, *extra], capsys)
        cert = json.loads(out)
        io.validate(cert, io.DIMENSION_SCHEMA)
        assert code == 0 and cert["N"] == 2 and cert["valid"]
    rows = write(tmp_path / "x0.json", F.vectors[:2].tolist())
    code, out, _ = run(["dimension", path, "--replace-vectors", rows], capsys)
    assert code == 0 and json.loads(out)["method"] == "cor37a"
    code, out, _ = run(["dimension", path, "--replace-functionals", rows], capsys)
    assert json.loads(out)["method"] == "cor37b"


def test_construct(tmp_path, capsys):
    F = canonical_frame(PNormSpace(2, 2))
    fpath = write(tmp_path / "f.json", F.to_json())
    V = write(tmp_path / "V.json", {"basis": [[1, 0], [0, 1]]})
    W = write(tmp_path / "W.json", [[1, 1], [1, -1]])
    code, out, _ = run(["construct", "--frame", fpath, "--V", V, "--W", W, "--indices", "2,4"], capsys)
    report = json.loads(out)
    io.validate(report, io.CONSTRUCTION_SCHEMA)
    assert code == 0 and report["ok"]
    assert report["weighted_sum"] == pytest.approx(0.5 * (1 - 2 ** -2), abs=1e-12)


def test_construct_bad_indices(tmp_path, capsys):
    F = canonical_frame(PNormSpace(2, 2))
    fpath = write(tmp_path / "f.json", F.to_json())
    V = write(tmp_path / "V.json", [[1, 0]])
    code, _, _ = run(["construct", "--frame", fpath, "--V", V, "--W", V, "--indices", "a,b"], capsys)
    assert code == 1


def test_text_format_and_output_file(tight_file, tmp_path, capsys):
    out_path = tmp_path / "out.txt"
    code, out, _ = run(["validate", tight_file, "--format", "text", "--output", out_path], capsys)
    assert code == 0 and out == ""
    text = out_path.read_text()
    assert "is_frame: True" in text and "residual:" in text


def test_report_bytes_identical(tight_file, capsys):
    first = run(["constants", tight_file, "--samples", 100], capsys)[1]
    second = run(["constants", tight_file, "--samples", 100], capsys)[1]
    assert first == second
