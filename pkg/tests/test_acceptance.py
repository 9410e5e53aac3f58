"""Acceptance criteria; each test prints one PASS/FAIL line via ``report_criterion``."""
import json
import time

import numpy as np

from dmajor import catalog, channels, cli, linalg, vector
from dmajor import matrix as mm
from dmajor.sampling import (
    random_diagonal_pair,
    random_dmaj_pair,
    random_hermitian,
    random_non_sp_map,
    random_pd,
    random_state,
    random_weights,
)
from dmajor.solver import Verdict


def test_criterion_1_heinosaari_counterexample(report_criterion):
    start = time.perf_counter()
    inst = mm.DMajInstance.create(*catalog.heinosaari_triple())
    curve = mm.trace_norm_curve_check(inst)
    square = mm.matrix_convex_necessary_check(inst, ("square",))[0]
    rep = mm.d_maj_feasibility(inst)
    elapsed = time.perf_counter() - start
    ok = (curve.worst_margin >= -1e-10 and abs(square.lhs - square.rhs) <= 1e-10
          and rep.verdict is Verdict.INFEASIBLE and rep.residual > 1e-4 and rep.iterations <= 50_000
          and elapsed < 60)
    report_criterion(1, "counterexample", ok,
                     f"curve margin {curve.worst_margin:.2e}, x^2 gap {abs(square.lhs - square.rhs):.1e}, "
                     f"{rep.verdict.value} residual {rep.residual:.2e} after {rep.iterations} it, {elapsed:.1f}s")
    assert ok


def test_criterion_2_qubit_oracle(report_criterion):
    rng = np.random.default_rng(2)
    total, undecided, disagree = 500, 0, 0
    for i in range(total):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        inst = mm.DMajInstance.create(A, B, d)
        rep = mm.d_maj_feasibility(inst)
        if not rep.decided:
            undecided += 1
        elif rep.feasible != mm.qubit_check(inst).verdict:
            disagree += 1
    ok = disagree == 0 and undecided / total < 0.02
    report_criterion(2, "qubit oracle", ok,
                     f"{total} instances, {disagree} disagreements, undecided {undecided / total:.1%}")
    assert ok


def test_criterion_3_diagonal_bridge(report_criterion):
    rng = np.random.default_rng(3)
    total, mismatch = 510, 0
    for i in range(total):
        n = 2 + i % 3
        d = random_weights(n, rng)
        x, y = random_diagonal_pair(d, rng, feasible=(i // 3) % 2 == 0)
        dec = mm.decide(mm.DMajInstance.create(np.diag(x), np.diag(y), d))
        expected = vector.d_majorization_check(x, y, d).verdict
        if dec.verdict is not (Verdict.FEASIBLE if expected else Verdict.INFEASIBLE):
            mismatch += 1
    ok = mismatch == 0
    report_criterion(3, "diagonal bridge", ok, f"{total} instances (n = 2..4), {mismatch} mismatches")
    assert ok


def test_criterion_4_universal_kernel(report_criterion):
    rng = np.random.default_rng(4)
    worst, bad = 0.0, 0
    for i in range(100):
        n = 2 + i % 3
        m = int(rng.integers(1, n))
        C, _ = random_non_sp_map(n, n, m, rng)
        probes = [random_pd(n, rng) for _ in range(20)]
        uk = channels.universal_kernel(C, probes)
        worst = max(worst, uk.max_angle)
        bad += not (uk.consistent and uk.basis.shape[1] == m)
    ok = bad == 0 and worst < 1e-7
    report_criterion(4, "universal kernel", ok, f"100 maps x 20 probes, max angle {worst:.1e}, {bad} failures")
    assert ok


def test_criterion_5_distance_dichotomy(report_criterion):
    rng = np.random.default_rng(5)
    lows = []
    for i in range(50):
        n = 2 + i % 3
        C, _ = random_non_sp_map(n, n, int(rng.integers(1, n)), rng, trace_preserving=True)
        lows.append(channels.distance_to_identity(C, seed=i).lower)
    swap = channels.distance_to_identity(catalog.swap_channel()).lower
    near = []
    for i in range(50):
        n = 2 + i % 3
        eps = rng.uniform(0.01, 0.3)
        C = (1 - eps) * channels.identity_channel(n) + eps * channels.depolarizing_channel(n, 1.0)
        near.append(channels.distance_to_identity(C, seed=i).lower)
    ok = (min(lows) >= 2 - 1e-4 and max(lows) <= 2 + 1e-9 and abs(swap - 2) <= 1e-6 and max(near) < 1)
    report_criterion(5, "distance dichotomy", ok,
                     f"non-SP lower in [{min(lows):.10f}, {max(lows):.10f}], swap {swap:.10f}, "
                     f"near-identity max {max(near):.3f}")
    assert ok


def _precondition_pair(n, rng):
    B = random_hermitian(n, rng)
    omega = None
    if rng.uniform() < 0.25:
        w, V = np.linalg.eigh(B)
        w[np.argmin(np.abs(w))] = 0.0
        B = (V * w) @ V.conj().T
        omega = random_state(n, rng)
    A0 = random_hermitian(n, rng)
    center = np.trace(B).real / n * np.eye(n)
    A = center + (A0 - np.trace(A0).real / n * np.eye(n))
    s = 1.0
    while linalg.trace_norm(center + s * (A - center)) > linalg.trace_norm(B):
        s *= 0.7
    return center + s * (A - center), B, omega


def test_criterion_6_channel_construction(report_criterion):
    rng = np.random.default_rng(6)
    worst_cp, worst_tp, worst_img = 0.0, 0.0, 0.0
    for i in range(210):
        A, B, omega = _precondition_pair(2 + i % 3, rng)
        C = mm.construct_channel_pair(A, B, omega)
        scale = max(1.0, np.linalg.norm(A), np.linalg.norm(B))
        worst_cp = min(worst_cp, float(np.linalg.eigvalsh(C.matrix)[0]))
        worst_tp = max(worst_tp, channels.is_tp(C).deviation)
        worst_img = max(worst_img, float(np.linalg.norm(C(B) - A)) / scale)
    ok = worst_cp >= -1e-9 and worst_tp <= 1e-10 and worst_img <= 1e-9
    report_criterion(6, "channel construction", ok,
                     f"210 pairs, min Choi eig {worst_cp:.1e}, TP dev {worst_tp:.1e}, image err/scale {worst_img:.1e}")
    assert ok


def test_criterion_7_minmax_elements(report_criterion):
    rng = np.random.default_rng(7)
    failures = []
    for i in range(20):
        n = 1 + i % 4
        d = random_weights(n, rng)
        if n > 1 and i % 3 == 0:
            d[rng.choice(n, size=2, replace=False)] = d.min()
        total = d.sum()
        D = np.diag(d)
        res = mm.minmax_elements(d)
        ties = int(np.sum(d == d.min()))
        if res.unique_max != (ties == 1) or len(res.indices) != ties:
            failures.append(f"uniqueness for d={d}")
        k = res.indices[0]
        E = np.zeros((n, n))
        E[k, k] = total
        Dproj = channels.trace_projection(D / total)
        for _ in range(20):
            rho = random_state(n, rng)
            gap = linalg.psd_check(D - d[k] * rho)
            pure = mm.pure_state_majorization(rho, k, d)
            C = pure.witness
            ok_channel = (C is not None and channels.is_cp(C).ok and channels.is_tp(C).ok
                          and np.abs(C(E) - total * rho).max() <= 1e-9
                          and np.abs(C(D) - D).max() <= 1e-9)
            if not (gap.is_psd and pure.verdict and ok_channel):
                failures.append(f"max element for d={d}")
            sigma = random_hermitian(n, rng)
            sigma += (total - np.trace(sigma).real) / n * np.eye(n)
            if not (np.abs(Dproj(sigma) - D).max() <= 1e-9 and np.abs(Dproj(D) - D).max() <= 1e-9
                    and channels.is_cp(Dproj).ok and channels.is_tp(Dproj).ok):
                failures.append(f"min element for d={d}")
    ok = not failures
    report_criterion(7, "least and greatest elements", ok,
                     f"20 weight vectors x 20 states, {len(failures)} failures")
    assert ok, failures[:5]


def test_criterion_8_iteration(report_criterion):
    rng = np.random.default_rng(8)
    worst_closed, worst_ratio = 0.0, 0.0
    for i in range(20):
        n = 2 + i % 3
        d = random_weights(n, rng)
        while np.ptp(d) < 1e-3:
            d = random_weights(n, rng)
        x0 = rng.dirichlet(np.ones(n))
        res = mm.iterate_majorization(x0, d, 30)
        worst_closed = max(worst_closed, res.closed_form_error)
        ratios = res.distances[1:] / res.distances[:-1]
        worst_ratio = max(worst_ratio, float(np.abs(ratios / res.q - 1).max()))
    ok = worst_closed <= 1e-12 and worst_ratio < 1e-10
    report_criterion(8, "iteration", ok,
                     f"20 runs x 30 steps, closed-form err {worst_closed:.1e}, ratio rel err {worst_ratio:.1e}")
    assert ok


def test_criterion_9_example_regression(report_criterion, tmp_path, capsys):
    code = cli.main(["reproduce", "--case", "all", "--out", str(tmp_path)])
    capsys.readouterr()
    reports = {p.stem: json.loads(p.read_text()) for p in tmp_path.glob("*.json")}
    b4 = reports["example-b4"]["checks"]
    b3 = reports["example-b3"]
    sp = {name: reports[name]["checks"]["strictly_positive"]["value"]
          for name in ("example-b1", "example-b2", "example-b5")}
    ok = (code == 0 and all(r["ok"] for r in reports.values())
          and b4["choi_spectrum_2_1_0x7"]["ok"] and b4["dual_matches_hand_formula"]["ok"]
          and b4["not_strictly_positive"]["ok"]
          and [row["m"] for row in b3["table"]] == list(range(1, 11))
          and all(row["min_eig_T_e1"] < 0 for row in b3["table"])
          and all(sp.values()))
    report_criterion(9, "example regression", ok,
                     f"exit {code}, {sum(r['ok'] for r in reports.values())}/{len(reports)} reports ok")
    assert ok
