"""Command-line entry point: ``pptcone <subcommand> [files] [options]``.

Every subcommand prints one JSON report on standard output.  Exit codes:
0 success or true verdict, 1 false verdict, 2 input error, 3 numerical
failure, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog, construct, faces, io, maps, states
from .linalg import DEFAULT_TOL, ContractError, MatrixSubspace, numerical_rank, partial_transpose, vectorize

OK, FALSE, INPUT_ERROR, NUMERICAL_FAILURE, INCONCLUSIVE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _default_seed() -> int:
    env = os.environ.get("PPTCONE_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError:
        return 42


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--starts", type=int, default=maps.DEFAULT_STARTS)
    p.add_argument("--max-iter", type=int, default=maps.DEFAULT_MAX_ITER)
    p.add_argument("--out", type=Path, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pptcone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, *files):
        sp = sub.add_parser(name, help=help, parents=[common])
        for f in files:
            sp.add_argument(f)
        return sp

    add("pt", "block transpose of a state file", "state")
    add("check-ppt", "membership in the PPT cone", "state")
    sp = add("pairing", "pairing of a state with a decomposable map", "state")
    sp.add_argument("--cp", help="rect or subspace file of CP Kraus matrices")
    sp.add_argument("--cocp", help="rect or subspace file of co-CP Kraus matrices")
    add("face", "intersection pair of the face containing the state", "state")
    add("dual-face", "decomposition pair of the dual face", "state")
    add("edge", "edge-state test", "state")
    add("separable-face", "product state inside the face of a pair", "D", "E")
    add("construct", "PPT state in the dual face of a decomposition pair", "D", "E")
    sp = add("catalog22", "validate the 2x2 face catalog")
    sp.add_argument("--trials", type=int, default=20)
    add("verify-paper", "rebuild and check the worked 2x2 example")
    sp = add("exposedness-test", "zero set of the dual face equals the face", "state")
    sp.add_argument("--samples", type=int, default=100)
    return parser


# --- loading helpers ----------------------------------------------------------


def _load(path, want: str, **kw):
    try:
        kind, dims, value = io.load(path, **kw)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if kind != want and not (want == "kraus" and kind in ("rect", "subspace")):
        raise InputError(f"{path}: expected a {want} file, got {kind}")
    return kind, dims, value


def _state(path, tol):
    _, dims, A = _load(path, "state")
    if not np.allclose(A, A.conj().T, atol=tol * max(1.0, np.abs(A).max())):
        raise InputError(f"{path}: state is not Hermitian")
    return dims, A


def _subspace(path):
    _, dims, S = _load(path, "subspace")
    return dims, S


def _kraus(path):
    kind, dims, value = _load(path, "kraus", orthonormalize_subspace=False)
    return dims, [value] if kind == "rect" else value


def _pair_files(a, b):
    dD, D = _subspace(a)
    dE, E = _subspace(b)
    if dD != dE:
        raise InputError("D and E have different dimensions")
    return D, E


def _subspace_doc(S: MatrixSubspace):
    return io.to_document(S, "subspace")


def _hit(hit):
    if hit is None:
        return None
    return {"x": io._encode(hit.x), "y": io._encode(hit.y), "residual": hit.residual, "starts": hit.starts}


def _pair_doc(pair):
    return {"kind": pair.kind.value, "dim_D": pair.D.dim, "dim_E": pair.E.dim,
            "D": _subspace_doc(pair.D), "E": _subspace_doc(pair.E), "rank_margin_flag": pair.marginal}


# --- subcommands ----------------------------------------------------------------


def cmd_pt(args):
    dims, A = _state(args.state, args.tol)
    return OK, {"result": io.to_document(partial_transpose(A, dims), "state", dims)}


def cmd_check_ppt(args):
    dims, A = _state(args.state, args.tol)
    mem = faces.in_T(A, dims, args.tol)
    return (OK if mem.in_T else FALSE), {"in_psd": mem.in_psd, "in_pt_psd": mem.in_pt_psd,
                                         "min_eig": mem.min_eig, "min_eig_pt": mem.min_eig_pt,
                                         "in_T": mem.in_T}


def cmd_pairing(args):
    dims, A = _state(args.state, args.tol)
    cp, cocp = [], []
    for path, target in ((args.cp, cp), (args.cocp, cocp)):
        if path:
            d, mats = _kraus(path)
            if d != dims:
                raise InputError(f"{path}: dimensions {tuple(d)} do not match the state {tuple(dims)}")
            target.extend(mats)
    if not cp and not cocp:
        raise InputError("give --cp and/or --cocp")
    phi = maps.DecomposableMap(dims, tuple(cp), tuple(cocp))
    return OK, {"pairing": maps.pairing(A, phi, args.tol),
                "closed_form": maps.pairing_closed_form(A, phi).real}


def _require_ppt(A, dims, tol):
    if not faces.in_T(A, dims, tol):
        raise InputError("state is not in the PPT cone")


def cmd_face(args):
    dims, A = _state(args.state, args.tol)
    _require_ppt(A, dims, args.tol)
    return OK, {"pair": _pair_doc(faces.face_of_state(A, dims, args.tol))}


def cmd_dual_face(args):
    dims, A = _state(args.state, args.tol)
    _require_ppt(A, dims, args.tol)
    return OK, {"pair": _pair_doc(faces.dual_face_of_state(A, dims, args.tol))}


def cmd_edge(args):
    dims, A = _state(args.state, args.tol)
    _require_ppt(A, dims, args.tol)
    rep = states.edge_check(A, dims, args.starts, args.max_iter, args.seed, args.tol)
    code = {"edge": OK, "not-edge": FALSE}.get(rep.verdict, INCONCLUSIVE)
    return code, {"is_edge": rep.is_edge, "verdict": rep.verdict, "best_hit": _hit(rep.best_hit),
                  "starts": rep.starts, "threshold": rep.threshold, "found_threshold": rep.found_threshold}


def cmd_separable_face(args):
    D, E = _pair_files(args.D, args.E)
    face = faces.FacePair(D, E, faces.PairKind.IntersectionPair)
    hit = states.separable_element_in_face(face, args.starts, args.max_iter, args.seed)
    return (OK if hit else FALSE), {"found": hit is not None, "hit": _hit(hit)}


def cmd_construct(args):
    D, E = _pair_files(args.D, args.E)
    opts = construct.FeasibilityOptions(tol=args.tol, seed=args.seed)
    cert = construct.construct_ppt_entangled(D, E, opts, starts=max(args.starts, states.EDGE_MIN_STARTS),
                                             max_iter=args.max_iter)
    body = {"entangled_claim": cert.entangled_claim.value, "edge_verdict": cert.edge_verdict,
            "interior_margin": cert.interior_margin.margin, "margin_verdict": cert.interior_margin.verdict,
            "margin_starts": cert.interior_margin.starts, "margin_converged": cert.interior_margin.converged,
            "state": None if cert.empty else io.to_document(cert.state, "state", D.dims)}
    return (OK if cert.entangled_claim is not construct.EntangledClaim.NoClaim else FALSE), body


def cmd_catalog22(args):
    rep = catalog.validate_catalog(args.seed, args.trials)
    rows = [{"class": t.cls.name, "trial": t.trial, "intersection": t.intersection, "recovered": t.recovered,
             "maximal": t.maximal, "dims": list(t.dims), "passed": t.passed} for t in rep.trials]
    return (OK if rep.passed else FALSE), {"passed": rep.passed, "trials": rows}


def verify_paper() -> dict:
    A = catalog.paper_example()
    exact = bool(np.array_equal(A, catalog.PRINTED_MATRIX))
    At = partial_transpose(A, catalog.DIMS)
    residual = float(np.linalg.norm(A @ vectorize(np.eye(2))))
    eig_pt = np.linalg.eigvalsh(At)
    checks = {
        "exact_match": exact,
        "rank": numerical_rank(A),
        "identity_residual": residual,
        "rank_pt": numerical_rank(At),
        "fourth_eigenvalue_pt": float(np.sort(np.abs(eig_pt))[0]),
    }
    checks["passed"] = (exact and checks["rank"] == 3 and residual < 1e-12 and checks["rank_pt"] == 4
                        and checks["fourth_eigenvalue_pt"] > 1e-6)
    return checks


def cmd_verify_paper(args):
    checks = verify_paper()
    checks["matrix"] = io.to_document(catalog.paper_example(), "state", catalog.DIMS)
    return (OK if checks["passed"] else FALSE), checks


def cmd_exposedness(args):
    dims, A = _state(args.state, args.tol)
    _require_ppt(A, dims, args.tol)
    rep = faces.exposedness_selftest(A, dims, args.samples, args.tol, args.seed)
    return (OK if rep.passed else FALSE), {"passed": rep.passed, "dual_zero_samples": rep.dual_zero_samples,
                                           "other_samples": rep.other_samples, "failures": rep.failures}


COMMANDS = {
    "pt": cmd_pt, "check-ppt": cmd_check_ppt, "pairing": cmd_pairing, "face": cmd_face,
    "dual-face": cmd_dual_face, "edge": cmd_edge, "separable-face": cmd_separable_face,
    "construct": cmd_construct, "catalog22": cmd_catalog22, "verify-paper": cmd_verify_paper,
    "exposedness-test": cmd_exposedness,
}


def _default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def run_command(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    report = {"command": args.command, "tol": args.tol, "seed": args.seed}
    try:
        code, body = COMMANDS[args.command](args)
        report.update(body)
    except io.MatrixFileError as exc:
        code = INPUT_ERROR
        report["error"] = {"type": "parse", "code": int(exc.code), "message": str(exc)}
    except (InputError, ContractError) as exc:
        code = INPUT_ERROR
        report["error"] = {"type": "input", "message": str(exc)}
    except (construct.NumericalFailure, ArithmeticError, np.linalg.LinAlgError) as exc:
        code = NUMERICAL_FAILURE
        report["error"] = {"type": "numerical", "message": str(exc)}
    report["exit_code"] = code
    text = json.dumps(report, sort_keys=True, indent=1, default=_default)
    if args.out is not None:
        args.out.write_text(text + "\n")
    stdout.write(text + "\n")
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
