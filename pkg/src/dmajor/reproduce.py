"""Regenerate the known examples and counterexamples as JSON reports.

Every case returns a dict with an overall ``ok`` flag and a ``checks``
mapping ``name -> {"value", "expected", "ok"}``.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import catalog, channels, linalg
from . import matrix as mm
from .solver import SolverParams, Verdict


def _check(value, expected, ok) -> dict:
    return {"value": value, "expected": expected, "ok": bool(ok)}


def _finish(name: str, checks: dict, **extra) -> dict:
    return {"case": name, "ok": all(c["ok"] for c in checks.values()), "checks": checks, **extra}


def superoperator(C: channels.ChoiMatrix) -> np.ndarray:
    """Matrix of ``vec(X) -> vec(T(X))`` (row-major ``vec``)."""
    n, k = C.in_dim, C.out_dim
    S = np.zeros((k * k, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            S[:, i * n + j] = C.block(i, j).ravel()
    return S


def fixed_point_space(C: channels.ChoiMatrix, tol: float = 1e-10) -> list:
    n = C.in_dim
    L = superoperator(C) - np.eye(n * n)
    basis = linalg.null_space(L, tol)
    return [basis[:, i].reshape(n, n) for i in range(basis.shape[1])]


def _rank(M, tol=1e-10) -> int:
    return int(np.sum(np.abs(linalg.eigvalsh(M)) > tol))


def case_leaky_qubit(tol: float, seed: int, params: SolverParams) -> dict:
    C = catalog.leaky_qubit_channel()
    sp = channels.strict_positivity_check(C, tol)
    fps = fixed_point_space(C)
    fp = fps[0] / np.trace(fps[0]) if len(fps) == 1 else None
    checks = {
        "cp": _check(channels.is_cp(C, tol).deviation, ">= 0", channels.is_cp(C, tol).ok),
        "tp": _check(channels.is_tp(C, tol).deviation, 0.0, channels.is_tp(C, tol).ok),
        "strictly_positive": _check(sp.strictly_positive, True, sp.strictly_positive),
        "fixed_point_dimension": _check(len(fps), 1, len(fps) == 1),
        "fixed_point_is_e1": _check(
            None if fp is None else fp, "diag(1, 0)",
            fp is not None and np.abs(fp - np.diag([1, 0])).max() <= tol),
        "fixed_point_rank": _check(None if fp is None else _rank(fp), 1, fp is not None and _rank(fp) == 1),
    }
    return _finish("example-b1", checks, choi=C)


def case_rank_changing(tol: float, seed: int, params: SolverParams) -> dict:
    C = catalog.rank_changing_channel()
    D = np.diag([2.0, 1.0, 1.0])
    e1 = np.diag([1.0, 0, 0])
    e23 = np.diag([0, 1.0, 1.0])
    sp = channels.strict_positivity_check(C, tol)
    fixed_err = float(np.abs(C(D) - D).max())
    checks = {
        "cp": _check(channels.is_cp(C, tol).deviation, ">= 0", channels.is_cp(C, tol).ok),
        "tp": _check(channels.is_tp(C, tol).deviation, 0.0, channels.is_tp(C, tol).ok),
        "fixed_point_diag_2_1_1": _check(fixed_err, 0.0, fixed_err <= tol),
        "strictly_positive": _check(sp.strictly_positive, True, sp.strictly_positive),
        "rank_T_e1": _check(_rank(C(e1)), 2, _rank(C(e1)) == 2),
        "rank_T_e2_plus_e3": _check(_rank(C(e23)), 1, _rank(C(e23)) == 1),
    }
    return _finish("example-b2", checks, choi=C)


def case_near_identity(tol: float, seed: int, params: SolverParams) -> dict:
    rows = []
    ok = True
    for m in range(1, 11):
        C = catalog.near_identity_nonpositive(m)
        img = C(np.diag([1.0, 0.0]))
        lowest = float(linalg.eigvalsh(img)[0])
        tp = channels.is_tp(C, tol)
        gap = float(np.abs(C.matrix - channels.identity_channel(2).matrix).max())
        row = {"m": m, "tp_deviation": tp.deviation, "min_eig_T_e1": lowest,
               "expected_min_eig": -1 / m, "choi_distance_to_identity": gap}
        ok &= tp.ok and abs(lowest + 1 / m) <= tol and lowest < 0
        rows.append(row)
    checks = {
        "trace_preserving_not_positive": _check(len(rows), 10, ok),
        "tends_to_identity": _check(rows[-1]["choi_distance_to_identity"], "decreasing",
                                    all(a["choi_distance_to_identity"] > b["choi_distance_to_identity"]
                                        for a, b in zip(rows, rows[1:]))),
    }
    return _finish("example-b3", checks, table=rows)


def case_compressing_qutrit(tol: float, seed: int, params: SolverParams) -> dict:
    rng = np.random.default_rng(seed)
    C = catalog.compressing_qutrit_channel()
    spec = linalg.eigvalsh(C.matrix)
    expected = np.array([0.0] * 7 + [1.0, 2.0])
    spec_err = float(np.abs(np.sort(spec) - expected).max())
    sp = channels.strict_positivity_check(C, tol)
    images = [C(np.diag(v)) for v in np.eye(3)]
    is_trace_projection = all(np.abs(X - images[0]).max() <= tol for X in images[1:])
    block = channels.block_form_decomposition(C, tol)

    dual = channels.dual_map(C)
    dual_hand = catalog.compressing_qutrit_dual()
    dual_err = float(np.abs(dual.matrix - dual_hand.matrix).max())
    pairing = 0.0
    subalgebra = 0.0
    for _ in range(20):
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        pairing = max(pairing, abs(np.trace(C(A) @ B) - np.trace(A @ dual_hand(B))))
        Bc = B.copy()
        Bc[2, :] = 0
        Bc[:, 2] = 0
        subalgebra = max(subalgebra, float(np.abs(dual_hand(B) - dual_hand(Bc)).max()))
    checks = {
        "choi_spectrum_2_1_0x7": _check(np.sort(spec), expected, spec_err <= 1e-9),
        "cp": _check(channels.is_cp(C, tol).deviation, ">= 0", channels.is_cp(C, tol).ok),
        "tp": _check(channels.is_tp(C, tol).deviation, 0.0, channels.is_tp(C, tol).ok),
        "not_strictly_positive": _check(sp.strictly_positive, False, not sp.strictly_positive),
        "kernel_dimension": _check(sp.m, 1, sp.m == 1),
        "not_a_trace_projection": _check(is_trace_projection, False, not is_trace_projection),
        "block_form_verified": _check(block.max_leak, 0.0, block.verified),
        "dual_matches_hand_formula": _check(dual_err, 0.0, dual_err <= 1e-12),
        "duality_pairing": _check(float(pairing), 0.0, pairing <= 1e-12),
        "dual_ignores_third_row_and_column": _check(subalgebra, 0.0, subalgebra <= 1e-12),
    }
    return _finish("example-b4", checks, choi=C, block_form={"m": block.m, "U": block.U, "pi": block.pi})


def case_swap(tol: float, seed: int, params: SolverParams) -> dict:
    C = catalog.swap_channel()
    est = channels.distance_to_identity(C, seed=seed)
    e1 = np.diag([1.0, 0.0]).astype(complex)
    direct = linalg.trace_norm(C(e1) - e1)
    sp = channels.strict_positivity_check(C, tol)
    checks = {
        "strictly_positive": _check(sp.strictly_positive, True, sp.strictly_positive),
        "unital": _check(float(np.abs(C(np.eye(2)) - np.eye(2)).max()), 0.0,
                         np.abs(C(np.eye(2)) - np.eye(2)).max() <= tol),
        "distance_on_e1": _check(direct, 2.0, abs(direct - 2) <= 1e-6),
        "distance_estimate": _check([est.lower, est.upper], 2.0,
                                    abs(est.lower - 2) <= 1e-6 and abs(est.upper - 2) <= 1e-6),
    }
    return _finish("example-b5", checks)


def case_heinosaari(tol: float, seed: int, params: SolverParams) -> dict:
    A, B, D = catalog.heinosaari_triple()
    inst = mm.DMajInstance.create(A, B, D)
    curve = mm.trace_norm_curve_check(inst)
    convex = mm.matrix_convex_necessary_check(inst, ("square", ("inverse", 1.0)))
    report = mm.d_maj_feasibility(inst, params)
    checks = {
        "trace_norm_inequalities": _check(curve.worst_margin, ">= -1e-10", curve.worst_margin >= -1e-10),
        "square_equality": _check([convex[0].lhs, convex[0].rhs], "equal",
                                  abs(convex[0].lhs - convex[0].rhs) <= 1e-10),
        "inverse_equality": _check([convex[1].lhs, convex[1].rhs], "equal",
                                   abs(convex[1].lhs - convex[1].rhs) <= 1e-10),
        "no_channel": _check(report.verdict.value, Verdict.INFEASIBLE.value,
                             report.verdict is Verdict.INFEASIBLE and report.residual > 1e-4),
    }
    return _finish("heinosaari", checks, residual=report.residual, iterations=report.iterations,
                   residual_trace=report.residual_trace[-20:])


def case_iteration(tol: float, seed: int, params: SolverParams, steps: int = 30) -> dict:
    runs = []
    ok_closed = ok_ratio = True
    for d, x0 in (([2.0, 1.0], [0.5, 0.5]), ([3.0, 1.0, 2.0], [0.2, 0.3, 0.5]),
                  ([1.0, 2.0, 4.0], [0.25, 0.25, 0.5])):
        d = np.array(d) / sum(d)
        res = mm.iterate_majorization(x0, d, steps)
        ratios = res.distances[1:] / res.distances[:-1]
        ratio_err = float(np.abs(ratios / res.q - 1).max())
        ok_closed &= res.closed_form_error <= 1e-12
        ok_ratio &= ratio_err < 1e-10
        runs.append({"d": d, "x0": x0, "q": res.q, "j": res.j, "mirrored": res.mirrored,
                     "distances": res.distances, "closed_form_error": res.closed_form_error,
                     "ratio_relative_error": ratio_err})
    checks = {
        "closed_form": _check(max(r["closed_form_error"] for r in runs), "<= 1e-12", ok_closed),
        "geometric_decay": _check(max(r["ratio_relative_error"] for r in runs), "< 1e-10", ok_ratio),
    }
    return _finish("iteration", checks, runs=runs)


def case_trace_projection(tol: float, seed: int, params: SolverParams) -> dict:
    """The trace projection onto ``D / tr D`` sends every matrix with trace ``tr D`` to ``D``."""
    rng = np.random.default_rng(seed)
    d = np.array([3.0, 2.0, 1.0])
    W = mm.minimal_witness(d)
    worst = 0.0
    for _ in range(10):
        S = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        S = S + S.conj().T
        S += (d.sum() - np.trace(S).real) / 3 * np.eye(3)
        worst = max(worst, float(np.abs(W(S) - np.diag(d)).max()))
    mm_el = mm.minmax_elements(d)
    checks = {
        "cptp": _check(channels.is_tp(W, tol).deviation, 0.0, channels.is_tp(W, tol).ok and channels.is_cp(W, tol).ok),
        "maps_to_D": _check(worst, 0.0, worst <= 1e-12),
        "unique_maximal": _check(mm_el.indices, [2], mm_el.unique_max and mm_el.indices == [2]),
    }
    return _finish("trace-projection", checks)


CASES: dict[str, Callable[..., dict]] = {
    "example-b1": case_leaky_qubit,
    "example-b2": case_rank_changing,
    "example-b3": case_near_identity,
    "example-b4": case_compressing_qutrit,
    "example-b5": case_swap,
    "heinosaari": case_heinosaari,
    "iteration": case_iteration,
    "trace-projection": case_trace_projection,
}


def run_case(name: str, tol: float = 1e-9, seed: int = 0, params: SolverParams = SolverParams()) -> dict:
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; choose from {', '.join(CASES)} or all")
    report = CASES[name](tol, seed, params)
    report["seed"] = seed
    report["tolerances"] = {"tol": tol, "eps_feas": params.eps_feas, "eps_infeas": params.eps_infeas,
                            "max_iter": params.max_iter}
    return report
