"""Command-line front end.

Exit codes: 0 affirmative verdict, 1 negative verdict, 2 usage or data
error, 3 undecided. Reports go to stdout as sorted-key JSON (or a short
text summary with ``--format text``).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import channels, io, vector
from . import matrix as mm
from . import reproduce as rep
from .exceptions import DMajorError, PreconditionViolated
from .solver import SolverParams, Verdict
from .validation import DEFAULT_TOL

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2, 3


def _params(args) -> SolverParams:
    return SolverParams(max_iter=args.max_iter)


def _base(args, command: str) -> dict:
    return {"command": command, "seed": args.seed,
            "tolerances": {"tol": args.tol, "eps_feas": SolverParams.eps_feas,
                           "eps_infeas": SolverParams.eps_infeas, "max_iter": args.max_iter}}


def _verification(C: channels.ChoiMatrix, tol: float) -> dict:
    cp, tp = channels.is_cp(C, tol), channels.is_tp(C, tol)
    return {"cp": cp.ok, "choi_min_eigenvalue": cp.deviation, "tp": tp.ok, "tp_deviation": tp.deviation}


def cmd_check_sp(args) -> tuple[dict, int]:
    C = io.choi_from_json(io.read_json(args.map), args.in_dim)
    tol = args.tol
    rng = np.random.default_rng(args.seed)
    sp = channels.strict_positivity_check(C, tol)
    cp = channels.is_cp(C, tol)
    probes = [_random_pd(C.in_dim, rng) for _ in range(args.probes)]
    uk = channels.universal_kernel(C, probes, tol)
    report = _base(args, "check-sp")
    report.update({
        "verdict": "SP" if sp.strictly_positive else "non-SP",
        "strictly_positive": sp.strictly_positive,
        "m": sp.m,
        "min_eigenvalue_T_identity": sp.min_eigenvalue,
        "completely_positive": cp.ok,
        "universal_kernel": {"probes": args.probes, "consistent": uk.consistent, "max_angle": uk.max_angle,
                             "basis": uk.basis},
    })
    if not cp.ok:
        report["warning"] = "Choi matrix is not PSD; the verdict assumes a positive map"
    if not sp.strictly_positive:
        block = channels.block_form_decomposition(C, tol)
        report["block_form"] = {"U": block.U, "pi": block.pi, "max_leak": block.max_leak,
                                "verified": block.verified}
    return report, EXIT_YES if sp.strictly_positive else EXIT_NO


def _random_pd(n: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return G @ G.conj().T / n + 0.1 * np.eye(n)


def _read_weights_or_matrix(path) -> np.ndarray:
    obj = io.read_json(path)
    is_list = isinstance(obj, list) and all(isinstance(v, (int, float)) for v in obj)
    if is_list or isinstance(obj, dict) and ("diag" in obj or "vector" in obj):
        return io.vector_from_json(obj)
    return io.matrix_from_json(obj)


def _qubit_dict(q: mm.QubitCheckReport) -> dict:
    return {"b1": q.b1, "b2": q.b2, "trace_equal": q.trace_equal, "norm_ineqs": q.norm_ineqs,
            "norm_margins": q.norm_margins, "fidelity_ineq": q.fidelity_ineq,
            "fidelity_A": q.fidelity_a, "fidelity_B": q.fidelity_b, "degenerate": q.degenerate,
            "verdict": q.verdict}


def _feasibility_dict(r) -> dict:
    out = {"verdict": r.verdict.value, "iterations": r.iterations, "residual": r.residual,
           "residual_trace": r.residual_trace, "constraint_residuals": r.constraint_residuals,
           "notes": r.notes}
    if r.feasible:
        out["witness"] = r.witness
    return out


def cmd_check_dmaj(args) -> tuple[dict, int]:
    A, B = io.read_matrix(args.A), io.read_matrix(args.B)
    D = _read_weights_or_matrix(args.d)
    inst = mm.DMajInstance.create(A, B, D, tol=args.tol)
    decision = mm.decide(inst, args.method, _params(args), args.tol)
    curve = mm.trace_norm_curve_check(inst, tol=args.tol)
    report = _base(args, "check-dmaj")
    report.update({"method": args.method, "n": inst.n, "verdict": decision.verdict.value,
                   "trace_norm_curve": {"holds": curve.holds, "worst_margin": curve.worst_margin,
                                        "t_worst": curve.t_worst},
                   "notes": decision.notes})
    if decision.qubit is not None:
        report["qubit"] = _qubit_dict(decision.qubit)
    if decision.feasibility is not None:
        report["feasibility"] = _feasibility_dict(decision.feasibility)
        if decision.agree is not None:
            report["methods_agree"] = decision.agree
    code = {Verdict.FEASIBLE: EXIT_YES, Verdict.INFEASIBLE: EXIT_NO, Verdict.UNDECIDED: EXIT_UNDECIDED}
    return report, code[decision.verdict]


def cmd_check_dvec(args) -> tuple[dict, int]:
    x, y, d = io.read_vector(args.x), io.read_vector(args.y), io.read_vector(args.d)
    res = vector.d_majorization_check(x, y, d, args.tol)
    report = _base(args, "check-dvec")
    report.update({"verdict": res.verdict, "positive_part_criterion": res.positive_part_criterion,
                   "one_norm_criterion": res.one_norm_criterion, "sums_equal": res.sums_equal,
                   "worst_positive_part_margin": res.worst_positive_part_margin,
                   "worst_one_norm_margin": res.worst_one_norm_margin, "binding": res.binding})
    if args.witness and res.verdict:
        sol = vector.d_stochastic_witness(x, y, d, _params(args))
        report["witness"] = {"verdict": sol.verdict.value, "iterations": sol.iterations,
                             "residual": sol.residual,
                             "matrix": sol.witness.entries if sol.feasible else None}
    return report, EXIT_YES if res.verdict else EXIT_NO


def cmd_construct(args) -> tuple[dict, int]:
    A, B = io.read_matrix(args.A), io.read_matrix(args.B)
    omega = io.read_matrix(args.omega) if args.omega else None
    report = _base(args, "construct")
    try:
        C = mm.construct_channel_pair(A, B, omega, args.tol)
    except PreconditionViolated as exc:
        report.update({"verdict": False, "reason": str(exc)})
        return report, EXIT_NO
    check = _verification(C, args.tol)
    check["image_error_fro"] = float(np.linalg.norm(C(B) - A))
    report.update({"verdict": True, "witness": C, "verification": check})
    return report, EXIT_YES


def cmd_lift_diag(args) -> tuple[dict, int]:
    M = io.read_matrix(args.M)
    if np.abs(M.imag).max(initial=0.0) > 0:
        raise io.MalformedInput("a stochastic matrix must be real")
    d = io.read_vector(args.d)
    C = mm.lift_diagonal_channel(M.real, d, args.tol)
    check = _verification(C, args.tol)
    check["fixed_point_error_fro"] = float(np.linalg.norm(C(np.diag(d)) - np.diag(d)))
    report = _base(args, "lift-diag")
    report.update({"witness": C, "verification": check})
    return report, EXIT_YES


def cmd_minmax(args) -> tuple[dict, int]:
    d = io.read_vector(args.d)
    res = mm.minmax_elements(d, args.tie_tol)
    report = _base(args, "minmax")
    report.update({"minimal": res.minimal, "maximal": res.maximal, "maximal_indices": res.indices,
                   "unique_max": res.unique_max})
    return report, EXIT_YES


def cmd_iterate(args) -> tuple[dict, int]:
    x0, d = io.read_vector(args.x0), io.read_vector(args.d)
    res = mm.iterate_majorization(x0, d, args.steps)
    report = _base(args, "iterate")
    report.update({"q": res.q, "j": res.j, "mirrored": res.mirrored, "iterates": res.iterates,
                   "distances": res.distances, "closed_form_error": res.closed_form_error,
                   "step_matrix": res.step_matrix})
    return report, EXIT_YES


def cmd_reproduce(args) -> tuple[dict, int]:
    names = list(rep.CASES) if args.case == "all" else [args.case]
    if args.case != "all" and args.case not in rep.CASES:
        raise KeyError(f"unknown case {args.case!r}; choose from {', '.join(rep.CASES)} or all")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in names:
        r = rep.run_case(name, args.tol, args.seed, _params(args))
        (out / f"{name}.json").write_text(io.dumps_report(r))
        summary[name] = {"ok": r["ok"], "failed": [k for k, v in r["checks"].items() if not v["ok"]]}
    report = _base(args, "reproduce")
    report.update({"cases": summary, "ok": all(s["ok"] for s in summary.values()), "directory": str(out)})
    return report, EXIT_YES if report["ok"] else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random probes and searches")
    common.add_argument("--max-iter", type=int, default=SolverParams.max_iter, help="solver iteration budget")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", help="write the report to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="dmajor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-sp", parents=[common], help="strict positivity of a map given by its Choi matrix")
    p.add_argument("--map", required=True, help="Choi matrix JSON")
    p.add_argument("--in-dim", type=int, help="input dimension if not square or not in the file")
    p.add_argument("--probes", type=int, default=5, help="random positive definite probes for the kernel check")
    p.set_defaults(func=cmd_check_sp)

    p = sub.add_parser("check-dmaj", parents=[common], help="is A D-majorized by B?")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--d", required=True, help="weight vector or positive definite matrix D")
    p.add_argument("--method", choices=("auto", "qubit", "feasibility"), default="auto")
    p.set_defaults(func=cmd_check_dmaj)

    p = sub.add_parser("check-dvec", parents=[common], help="is x d-majorized by y?")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--witness", action="store_true", help="also search a d-stochastic witness")
    p.set_defaults(func=cmd_check_dvec)

    p = sub.add_parser("construct", parents=[common], help="channel T with T(B) = A")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--omega", help="state assigned to the kernel vector of a singular B")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("lift-diag", parents=[common], help="channel from a d-stochastic matrix")
    p.add_argument("--M", required=True)
    p.add_argument("--d", required=True)
    p.set_defaults(func=cmd_lift_diag)

    p = sub.add_parser("minmax", parents=[common], help="least and greatest elements for weights d")
    p.add_argument("--d", required=True)
    p.add_argument("--tie-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_minmax)

    p = sub.add_parser("iterate", parents=[common], help="alternating d- and e-stochastic iteration towards e_1")
    p.add_argument("--x0", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--steps", type=int, default=30)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate the built-in example reports")
    p.add_argument("--case", default="all", help=f"one of {', '.join(rep.CASES)} or all")
    p.add_argument("--out", default="reports", help="directory for the report files")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _text(report: dict) -> str:
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list, np.ndarray, channels.ChoiMatrix)):
            continue
        lines.append(f"{key}: {value}")
    if "cases" in report:
        for name, s in report["cases"].items():
            lines.append(f"  {name}: {'ok' if s['ok'] else 'FAILED ' + ', '.join(s['failed'])}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (DMajorError, KeyError, OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"dmajor {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_ERROR
    text = io.dumps_report(report) if args.format == "json" else _text(report)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
