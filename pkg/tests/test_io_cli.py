import io as stdio
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pptcone import catalog, io
from pptcone.cli import run_command, verify_paper
from pptcone.io import MatrixFileError, ParseErrorCode, parse_matrix_file
from pptcone.linalg import MatrixSubspace
from pptcone.states import tiles_state

from conftest import crandn

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*argv):
    buf = stdio.StringIO()
    code = run_command([str(a) for a in argv], buf)
    return code, json.loads(buf.getvalue())


# --- file format ---------------------------------------------------------------


def test_printed_example_document():
    kind, dims, A = io.load(FIXTURES / "paper_example.json")
    assert kind == "state" and tuple(dims) == (2, 2)
    assert np.array_equal(A, catalog.paper_example())
    doc = json.loads((FIXTURES / "paper_example.json").read_text())
    assert doc["data"][0][0] == [2, 0]


def test_rect_document():
    raw = '{"kind":"rect","m":2,"n":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}'
    kind, _, M = parse_matrix_file(raw)
    assert kind == "rect" and np.array_equal(M, np.eye(2))


@pytest.mark.parametrize("raw,code", [
    ('{"kind":"rect","m":2,"n":2,"data":[[[1,0],[0,0]],[[0,0],', ParseErrorCode.MALFORMED),
    (b"\xff\xfe", ParseErrorCode.MALFORMED),
    ('{"kind":"rect","m":2,"n":2,"data":[[[1,0],[0,0]]]}', ParseErrorCode.DIMENSION),
    ('{"kind":"rect","m":0,"n":2,"data":[]}', ParseErrorCode.DIMENSION),
    ('{"kind":"rect","m":1,"n":1,"data":[[[NaN,0]]]}', ParseErrorCode.NON_FINITE),
    ('{"kind":"rect","m":1,"n":1,"data":[[[1e999,0]]]}', ParseErrorCode.NON_FINITE),
    ('{"kind":"tensor","m":1,"n":1,"data":[]}', ParseErrorCode.SCHEMA),
    ('{"m":1,"n":1,"data":[]}', ParseErrorCode.SCHEMA),
    ('[1, 2]', ParseErrorCode.SCHEMA),
    ('{"kind":"rect","m":1,"n":1,"data":[[["a",0]]]}', ParseErrorCode.SCHEMA),
])
def test_parse_error_codes(raw, code):
    with pytest.raises(MatrixFileError) as err:
        parse_matrix_file(raw)
    assert err.value.code is code


def test_non_orthonormal_subspace_warns(caplog):
    raw = json.dumps({"kind": "subspace", "m": 1, "n": 2, "data": [[[[2, 0], [0, 0]]]]})
    _, _, S = parse_matrix_file(raw)
    assert S.dim == 1 and "orthonormal" in caplog.text


@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_round_trip(seed, dims):
    rng = np.random.default_rng(seed)
    N = dims[0] * dims[1]
    A = crandn(rng, N, N)
    assert np.array_equal(parse_matrix_file(io.dumps(A, "state", dims))[2], A)
    Z = crandn(rng, *dims)
    assert np.array_equal(parse_matrix_file(io.dumps(Z, "rect"))[2], Z)
    S = MatrixSubspace.from_matrices(dims, [crandn(rng, *dims) for _ in range(2)])
    assert parse_matrix_file(io.dumps(S, "subspace"))[2].equiv(S)


# --- command line --------------------------------------------------------------


def test_verify_paper():
    checks = verify_paper()
    assert checks["passed"] and checks["exact_match"]
    assert checks["rank"] == 3 and checks["rank_pt"] == 4
    code, report = run("verify-paper")
    assert code == 0 and report["passed"]


def test_check_ppt_maximally_entangled():
    code, report = run("check-ppt", FIXTURES / "maximally_entangled.json")
    assert code == 1 and report["min_eig_pt"] < 0 and report["in_psd"]


def test_check_ppt_printed_example():
    code, report = run("check-ppt", FIXTURES / "paper_example.json")
    assert code == 0 and report["in_T"]


def test_edge_tiles():
    code, report = run("edge", FIXTURES / "tiles.json", "--starts", 400)
    assert code == 0 and report["is_edge"] and report["best_hit"]["residual"] > 1e-3


def test_edge_with_few_starts_is_inconclusive():
    code, report = run("edge", FIXTURES / "tiles.json", "--starts", 20)
    assert code == 4 and report["verdict"] == "inconclusive"


def test_tiles_fixture_matches_builder():
    assert np.allclose(io.load(FIXTURES / "tiles.json")[2], tiles_state(), atol=1e-15)


def test_pt_face_and_dual_face():
    code, report = run("pt", FIXTURES / "paper_example.json")
    assert code == 0 and report["result"]["kind"] == "state"
    code, report = run("face", FIXTURES / "paper_example.json")
    assert code == 0 and (report["pair"]["dim_D"], report["pair"]["dim_E"]) == (3, 4)
    code, report = run("dual-face", FIXTURES / "paper_example.json")
    assert code == 0 and (report["pair"]["dim_D"], report["pair"]["dim_E"]) == (1, 0)


def test_pairing_command(tmp_path):
    kraus = tmp_path / "e11.json"
    io.save(kraus, np.array([[1, 0], [0, 0]]), "rect")
    code, report = run("pairing", FIXTURES / "paper_example.json", "--cp", kraus)
    assert code == 0 and report["pairing"] == pytest.approx(2)
    code, report = run("pairing", FIXTURES / "paper_example.json")
    assert code == 2


def test_separable_face_and_construct(tmp_path):
    D, E = tmp_path / "D.json", tmp_path / "E.json"
    io.save(D, MatrixSubspace.from_matrices((2, 2), [np.eye(2)]).perp(), "subspace")
    io.save(E, MatrixSubspace.full((2, 2)), "subspace")
    code, report = run("separable-face", D, E)
    assert code == 0 and report["found"] and report["hit"]["residual"] < 1e-7
    # a zero side makes the face zero
    code, report = run("separable-face", FIXTURES / "identity_span.json", FIXTURES / "zero_2x2.json")
    assert code == 1 and not report["found"]
    code, report = run("construct", FIXTURES / "identity_span.json", FIXTURES / "zero_2x2.json")
    assert code == 1 and report["entangled_claim"] == "none" and report["state"] is not None


def test_exposedness_command():
    code, report = run("exposedness-test", FIXTURES / "paper_example.json", "--samples", 20)
    assert code == 0 and report["passed"]


def test_catalog_command():
    code, report = run("catalog22", "--trials", 1)
    assert code == 0 and len(report["trials"]) == 6


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind":"state","m":2')
    code, report = run("check-ppt", bad)
    assert code == 2 and report["error"]["code"] == int(ParseErrorCode.MALFORMED)
    code, report = run("check-ppt", tmp_path / "missing.json")
    assert code == 2 and report["error"]["type"] == "input"
    code, report = run("check-ppt", FIXTURES / "identity_span.json")
    assert code == 2
    code, report = run("face", FIXTURES / "maximally_entangled.json")
    assert code == 2
    assert run_command(["no-such-command"], stdio.StringIO()) == 2


def test_reports_embed_tol_and_seed():
    _, report = run("edge", FIXTURES / "paper_example.json", "--seed", 9, "--tol", 1e-8)
    assert report["seed"] == 9 and report["tol"] == 1e-8


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PPTCONE_SEED", "123")
    _, report = run("edge", FIXTURES / "paper_example.json")
    assert report["seed"] == 123


def test_reports_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        buf = stdio.StringIO()
        run_command(["edge", str(FIXTURES / "tiles.json"), "--starts", "200", "--out", str(path)], buf)
        outs.append((buf.getvalue(), path.read_bytes()))
    assert outs[0] == outs[1]
    assert outs[0][1].decode() == outs[0][0]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pptcone", "verify-paper"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["exact_match"]
