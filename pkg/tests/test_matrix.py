import numpy as np
import pytest

from dmajor import catalog, channels, linalg, vector
from dmajor import matrix as mm
from dmajor.exceptions import (
    ConstantWeights,
    DomainViolation,
    IndexOutOfRange,
    NonHermitian,
    NotAState,
    NotDStochastic,
    PreconditionViolated,
    ShapeMismatch,
    WrongDimension,
)
from dmajor.sampling import (
    random_diagonal_pair,
    random_dmaj_pair,
    random_fixed_point_channel,
    random_hermitian,
    random_state,
    random_unitary,
    random_weights,
)
from dmajor.solver import Verdict


def _heinosaari():
    return mm.DMajInstance.create(*catalog.heinosaari_triple())


def _assert_valid_witness(C, A, B, D, tol=1e-7):
    assert channels.is_cp(C, tol).ok
    assert channels.is_tp(C, tol).ok
    scale = max(1.0, np.linalg.norm(A), np.linalg.norm(D))
    assert np.linalg.norm(C(B) - A) <= tol * scale
    assert np.linalg.norm(C(D) - D) <= tol * scale


# -- instances ---------------------------------------------------------------

def test_instance_diagonalises_non_diagonal_d():
    inst = _heinosaari()
    assert inst.basis is not None
    assert np.allclose(np.sort(inst.d), [2 - np.sqrt(2), 2, 2 + np.sqrt(2)])
    A, B, D = catalog.heinosaari_triple()
    W = inst.basis
    assert np.allclose(W @ inst.A @ W.conj().T, A)
    assert np.allclose(W @ inst.D @ W.conj().T, D)


def test_instance_validation():
    with pytest.raises(ShapeMismatch):
        mm.DMajInstance.create(np.eye(2), np.eye(3), [1, 1])
    with pytest.raises(ShapeMismatch):
        mm.DMajInstance.create(np.eye(2), np.eye(2), [1, 1, 1])
    with pytest.raises(NonHermitian):
        mm.DMajInstance.create(np.array([[0, 1], [0, 0]]), np.eye(2), [1, 1])


# -- qubit test --------------------------------------------------------------

def test_qubit_reflexive():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = random_weights(2, rng)
        B = random_hermitian(2, rng)
        rep = mm.qubit_check(mm.DMajInstance.create(B, B, d))
        assert rep.verdict
        assert rep.fidelity_a == pytest.approx(rep.fidelity_b)


def test_qubit_minimal_element():
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = random_weights(2, rng)
        B = random_hermitian(2, rng)
        A = np.diag(d) * np.trace(B).real / d.sum()
        inst = mm.DMajInstance.create(A, B, d)
        assert mm.qubit_check(inst).verdict
        assert mm.d_maj_feasibility(inst).verdict is Verdict.FEASIBLE


def test_qubit_matches_vector_check_on_diagonals():
    rng = np.random.default_rng(2)
    for i in range(200):
        d = random_weights(2, rng)
        x, y = random_diagonal_pair(d, rng, feasible=i % 2 == 0)
        inst = mm.DMajInstance.create(np.diag(x), np.diag(y), d)
        assert mm.qubit_check(inst).verdict == vector.d_majorization_check(x, y, d).verdict


def test_qubit_errors_and_degenerate_flag():
    with pytest.raises(WrongDimension):
        mm.qubit_check(mm.DMajInstance.create(np.eye(3), np.eye(3), [1, 1, 1]))
    d = np.array([1.0, 3.0])
    rep = mm.qubit_check(mm.DMajInstance.create(np.diag(d) * 2, np.diag(d) * 2, d))
    assert rep.degenerate and rep.verdict


def test_qubit_verdict_is_conjunction():
    rng = np.random.default_rng(3)
    for i in range(100):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        rep = mm.qubit_check(mm.DMajInstance.create(A, B, d))
        assert rep.b1 <= rep.b2
        assert rep.verdict == (rep.trace_equal and all(rep.norm_ineqs) and rep.fidelity_ineq)
        assert rep.verdict == (i % 2 == 0)


def test_qubit_check_does_not_depend_on_the_normalising_shift():
    rng = np.random.default_rng(4)
    for i in range(60):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        inst = mm.DMajInstance.create(A, B, d)
        s = float(mm.spectral_breakpoints(inst).min())
        verdicts = {mm.qubit_check(mm.normalize_to_states(inst, t0)).verdict
                    for t0 in (None, s - 0.1, s - 10.0)}
        assert verdicts == {mm.qubit_check(inst).verdict}
        tilde = mm.normalize_to_states(inst)
        assert np.trace(tilde.A).real == pytest.approx(1.0)
        assert linalg.psd_check(tilde.A).is_pd and linalg.psd_check(tilde.B).is_pd
    with pytest.raises(PreconditionViolated):
        mm.normalize_to_states(inst, s + 1)


# -- trace-norm curve --------------------------------------------------------

def test_curve_heinosaari_and_reflexive():
    res = mm.trace_norm_curve_check(_heinosaari())
    assert res.holds and res.worst_margin >= -1e-10
    rng = np.random.default_rng(5)
    B = random_hermitian(3, rng)
    res = mm.trace_norm_curve_check(mm.DMajInstance.create(B, B, [1, 2, 3]))
    assert res.holds and res.worst_margin == pytest.approx(0.0, abs=1e-12)


def test_curve_is_necessary_for_qubits():
    rng = np.random.default_rng(6)
    for i in range(100):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        inst = mm.DMajInstance.create(A, B, d)
        q = mm.qubit_check(inst)
        curve = mm.trace_norm_curve_check(inst)
        if q.verdict:
            assert curve.holds
        if not curve.holds:
            assert not q.verdict


# -- feasibility -------------------------------------------------------------

def test_feasibility_heinosaari_is_infeasible():
    rep = mm.d_maj_feasibility(_heinosaari())
    assert rep.verdict is Verdict.INFEASIBLE
    assert rep.residual > 1e-4


def test_feasibility_identity_witness():
    d = np.array([1.0, 2.0, 3.0])
    D = np.diag(d)
    rep = mm.d_maj_feasibility(mm.DMajInstance.create(D, D, d))
    assert rep.feasible and rep.iterations == 0
    assert np.allclose(rep.witness.matrix, channels.identity_channel(3).matrix)


def test_feasibility_witness_in_original_basis():
    rng = np.random.default_rng(7)
    W = random_unitary(3, rng)
    d = np.array([1.0, 2.0, 4.0])
    T = random_fixed_point_channel(d, rng)
    B = random_hermitian(3, rng)
    A = T(B)
    D = W @ np.diag(d) @ W.conj().T
    Ar, Br = W @ A @ W.conj().T, W @ B @ W.conj().T
    rep = mm.d_maj_feasibility(mm.DMajInstance.create(Ar, Br, D))
    assert rep.feasible
    _assert_valid_witness(rep.witness, Ar, Br, D)
    assert rep.constraint_residuals["image_error_fro"] < 1e-7


def test_feasibility_agrees_with_qubit_check():
    rng = np.random.default_rng(8)
    undecided = 0
    for i in range(60):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        inst = mm.DMajInstance.create(A, B, d)
        rep = mm.d_maj_feasibility(inst)
        if not rep.decided:
            undecided += 1
            continue
        assert rep.feasible == mm.qubit_check(inst).verdict
        if rep.feasible:
            _assert_valid_witness(rep.witness, A, B, np.diag(d))
    assert undecided <= 1


def test_feasibility_accepts_non_hermitian_inputs():
    rng = np.random.default_rng(9)
    d = np.array([1.0, 2.0])
    T = random_fixed_point_channel(d, rng)
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    inst = mm.DMajInstance.create(T(B), B, d, hermitian=False)
    assert mm.d_maj_feasibility(inst).feasible


def test_convexity_of_the_majorized_set():
    rng = np.random.default_rng(10)
    d = np.array([1.0, 2.0, 3.0])
    C = random_hermitian(3, rng)
    A1 = random_fixed_point_channel(d, rng)(C)
    A2 = random_fixed_point_channel(d, rng)(C)
    for A in (A1, A2, (A1 + A2) / 2):
        assert mm.d_maj_feasibility(mm.DMajInstance.create(A, C, d)).feasible


def test_full_rank_is_preserved():
    rng = np.random.default_rng(11)
    d = np.array([1.0, 2.0, 3.0])
    for _ in range(5):
        rho = random_state(3, rng)
        A = random_fixed_point_channel(d, rng)(rho)
        rep = mm.d_maj_feasibility(mm.DMajInstance.create(A, rho, d))
        assert rep.feasible
        assert linalg.psd_check(rep.witness(rho)).is_pd


def test_unitary_covariance():
    rng = np.random.default_rng(12)
    for i in range(10):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=i % 2 == 0)
        U = random_unitary(2, rng)
        before = mm.d_maj_feasibility(mm.DMajInstance.create(A, B, d)).verdict
        rotated = mm.DMajInstance.create(U @ A @ U.conj().T, U @ B @ U.conj().T, U @ np.diag(d) @ U.conj().T)
        assert mm.d_maj_feasibility(rotated).verdict is before


def test_witness_composition():
    rng = np.random.default_rng(13)
    d = np.array([2.0, 1.0, 1.0])
    D = np.diag(d)
    C = random_hermitian(3, rng)
    B = random_fixed_point_channel(d, rng)(C)
    A = random_fixed_point_channel(d, rng)(B)
    r1 = mm.d_maj_feasibility(mm.DMajInstance.create(B, C, d))
    r2 = mm.d_maj_feasibility(mm.DMajInstance.create(A, B, d))
    assert r1.feasible and r2.feasible
    composed = channels.compose(r2.witness, r1.witness)
    _assert_valid_witness(composed, A, C, D, tol=1e-6)


def test_decide_methods():
    rng = np.random.default_rng(14)
    d = np.array([1.0, 2.0])
    A, B = random_dmaj_pair(d, rng, feasible=True)
    inst = mm.DMajInstance.create(A, B, d)
    dec = mm.decide(inst)
    assert dec.verdict is Verdict.FEASIBLE and dec.agree
    assert mm.decide(inst, "qubit").feasibility is None
    assert mm.decide(inst, "feasibility").qubit is None
    with pytest.raises(ValueError):
        mm.decide(inst, "magic")


# -- constructions -----------------------------------------------------------

def test_lift_diagonal_channel():
    d = np.array([1.0, 2.0, 3.0])
    L = mm.lift_diagonal_channel(np.eye(3), d)
    X = random_hermitian(3, np.random.default_rng(15))
    assert np.allclose(L(X), np.diag(np.diag(X)))
    assert np.allclose(L(np.diag(d)), np.diag(d))

    L = mm.lift_diagonal_channel(np.outer(d, np.ones(3)) / d.sum(), d)
    y = np.array([0.4, -1.0, 2.0])
    assert np.allclose(L(np.diag(y)), y.sum() * np.diag(d) / d.sum())

    rng = np.random.default_rng(16)
    for _ in range(10):
        x, y = random_diagonal_pair(d, rng, feasible=True)
        rep = vector.d_stochastic_witness(x, y, d)
        assert rep.feasible
        C = mm.lift_diagonal_channel(rep.witness, d, tol=1e-7)
        assert channels.is_cp(C).ok and channels.is_tp(C, 1e-7).ok
        assert np.allclose(C(np.diag(y)), np.diag(x), atol=1e-6)
        assert np.allclose(np.diag(C.matrix).imag, 0) and np.diag(C.matrix).real.min() >= -1e-9
        assert np.count_nonzero(C.matrix - np.diag(np.diag(C.matrix))) == 0

    with pytest.raises(NotDStochastic):
        mm.lift_diagonal_channel(np.array([[0.0, 1.0], [1.0, 0.0]]), [1.0, 2.0])


def test_construct_channel_pair_examples():
    rng = np.random.default_rng(17)
    B = random_hermitian(3, rng)
    C = mm.construct_channel_pair(B, B)
    _assert_valid_witness(C, B, B, np.eye(3) * 0)

    A, B = np.diag([0.5, 0.5]), np.diag([1.0, 0.0])
    C = mm.construct_channel_pair(A, B)
    assert channels.is_cp(C).ok and channels.is_tp(C).ok
    assert np.allclose(C(B), A)

    V = random_unitary(2, rng)
    Bs = V @ B @ V.conj().T
    omega = np.diag([1.0, 0.0])
    C = mm.construct_channel_pair(A, Bs, omega=omega)
    psi = V[:, 1]
    assert np.allclose(C(np.outer(psi, psi.conj())), omega)
    assert np.allclose(C(Bs), A)
    assert channels.is_cp(C).ok and channels.is_tp(C).ok


def test_construct_channel_pair_preconditions():
    with pytest.raises(PreconditionViolated, match="traces"):
        mm.construct_channel_pair(np.eye(2), np.diag([1.0, 0.0]))
    with pytest.raises(PreconditionViolated, match="exceeds"):
        mm.construct_channel_pair(np.diag([2.0, -2.0]), np.diag([0.5, -0.5]))
    with pytest.raises(PreconditionViolated, match="zero eigenvalue"):
        mm.construct_channel_pair(np.eye(2), np.eye(2), omega=np.diag([1.0, 0.0]))
    with pytest.raises(NotAState):
        mm.construct_channel_pair(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), omega=np.eye(2))


def test_pure_state_majorization():
    rng = np.random.default_rng(18)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        rho = random_state(n, rng)
        j = int(rng.integers(0, n))
        assert mm.pure_state_majorization(rho, j, np.ones(n)).verdict
        d = random_weights(n, rng)
        k = int(np.argmin(d))
        res = mm.pure_state_majorization(rho, k, d)
        assert res.verdict
        C = res.witness
        E = np.zeros((n, n))
        E[k, k] = 1
        assert channels.is_cp(C).ok and channels.is_tp(C).ok
        assert np.allclose(C(E), rho) and np.allclose(C(np.diag(d)), np.diag(d))

    d = np.array([3.0, 1.0]) / 4
    res = mm.pure_state_majorization(np.diag([0.0, 1.0]), 0, d)
    gap = np.linalg.eigvalsh(np.diag(d) - d[0] * np.diag([0.0, 1.0]))
    assert not res.verdict and res.witness is None
    assert res.min_eigenvalue == pytest.approx(gap.min())

    with pytest.raises(IndexOutOfRange):
        mm.pure_state_majorization(np.eye(2) / 2, 2, [1, 1])
    with pytest.raises(NotAState):
        mm.pure_state_majorization(np.eye(2), 0, [1, 1])


def test_minmax_elements():
    res = mm.minmax_elements([2, 1, 1])
    assert not res.unique_max and res.indices == [1, 2] and len(res.maximal) == 2
    res = mm.minmax_elements([3, 2, 1])
    assert res.unique_max and res.indices == [2]
    assert np.allclose(res.maximal[0], np.diag([0, 0, 6]))
    assert np.allclose(res.minimal, np.diag([3, 2, 1]))


def test_minmax_elements_via_feasibility():
    rng = np.random.default_rng(19)
    d = np.array([3.0, 2.0, 1.0])
    D = np.diag(d)
    top = mm.minmax_elements(d).maximal[0]
    for _ in range(20):
        rho = random_state(3, rng) * d.sum()
        assert mm.d_maj_feasibility(mm.DMajInstance.create(rho, top, d)).feasible
        sigma = random_hermitian(3, rng)
        sigma += (d.sum() - np.trace(sigma).real) / 3 * np.eye(3)
        assert mm.d_maj_feasibility(mm.DMajInstance.create(D, sigma, d)).feasible


def test_matrix_convex_check():
    res = mm.matrix_convex_necessary_check(_heinosaari(), ("square", ("inverse", 1.0)))
    for r in res:
        assert r.lhs == pytest.approx(r.rhs, abs=1e-10)
    rng = np.random.default_rng(20)
    B = random_hermitian(2, rng)
    for r in mm.matrix_convex_necessary_check(mm.DMajInstance.create(B, B, [1, 2])):
        assert r.lhs == pytest.approx(r.rhs)
    for i in range(100):
        d = random_weights(2, rng)
        A, B = random_dmaj_pair(d, rng, feasible=True)
        inst = mm.DMajInstance.create(A, B, d)
        assert mm.qubit_check(inst).verdict
        assert mm.matrix_convex_necessary_check(inst)[0].holds
    with pytest.raises(DomainViolation):
        mm.matrix_convex_necessary_check(mm.DMajInstance.create(-5 * np.eye(2), -5 * np.eye(2), [1, 1]),
                                         (("inverse", 1.0),))
    with pytest.raises(ValueError):
        mm.matrix_convex_necessary_check(_heinosaari(), ("cube",))


# -- iteration ---------------------------------------------------------------

def test_iteration_halves_distance():
    res = mm.iterate_majorization([0.5, 0.5], np.array([2.0, 1.0]) / 3, 10)
    assert res.q == pytest.approx(0.5)
    assert np.allclose(res.distances[1:] / res.distances[:-1], 0.5, rtol=1e-14)


def test_iteration_near_e1_stays_near():
    x0 = np.array([1 - 2e-9, 1e-9, 1e-9])
    res = mm.iterate_majorization(x0, np.array([3.0, 2.0, 1.0]), 5)
    assert np.abs(res.iterates - np.eye(3)[0]).max() < 3e-9


@pytest.mark.parametrize("d", [[3, 1, 2], [1, 2, 3], [1, 1, 2, 5], [4, 4, 1], [2, 1]])
def test_iteration_factors_are_stochastic(d):
    d = np.array(d, dtype=float)
    rng = np.random.default_rng(int(d.sum()))
    x0 = rng.dirichlet(np.ones(d.size))
    res = mm.iterate_majorization(x0, d, 30)
    for kind, F in res.factors:
        assert vector.is_d_stochastic(F, d if kind == "d" else np.ones(d.size), 1e-14)
    assert res.closed_form_error <= 1e-12
    ratios = res.distances[1:] / res.distances[:-1]
    assert np.abs(ratios / res.q - 1).max() < 1e-10


def test_iteration_errors():
    with pytest.raises(ConstantWeights):
        mm.iterate_majorization([0.5, 0.5], [2, 2], 3)
    with pytest.raises(PreconditionViolated):
        mm.iterate_majorization([1.0, 0.0], [2, 1], 3)
