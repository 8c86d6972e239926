import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import degenerate_instance, random_hpd, random_instance, random_psd
from sdrbeam.array_model import ArrayGeometry
from sdrbeam.errors import BoundaryFeasibleError, InconsistencyError, InfeasibleError
from sdrbeam.linalg import phase_distance
from sdrbeam.oracle import grid_dual_oracle
from sdrbeam.sector import AngularSector, SectorModel
from sdrbeam.sim import Scenario, generate_snapshots, make_rng, sample_covariance
from sdrbeam.svest import (RelaxedSolution, dual_objective, estimate_steering,
                           extraction_matrix, kkt_check, rank_one_extract, recover_primal,
                           relaxed_to_feasible_point, solve_dual)


def principal(r_inv):
    _, V = np.linalg.eigh(r_inv)
    return np.sqrt(r_inv.shape[0]) * V[:, 0]


def test_dual_objective_vacuous_constraint(rng):
    ri = random_hpd(rng, 5)
    lam = np.linalg.eigvalsh(ri)[0]
    for g2 in (0.0, 0.5, 3.0):
        val, g1, _, _ = dual_objective(g2, ri, np.zeros((5, 5)), 2.0, 5)
        assert g1 == pytest.approx(lam, rel=1e-12)
        assert val == pytest.approx(5 * lam - 2.0 * g2, rel=1e-12)
    assert solve_dual(ri, np.zeros((5, 5)), 2.0, 5).gamma2 == 0.0


def test_dual_objective_identity_constraint(rng):
    ri = random_hpd(rng, 5)
    lam = np.linalg.eigvalsh(ri)[0]
    val, _, sub, _ = dual_objective(1.5, ri, np.eye(5), 10.0, 5)
    assert val == pytest.approx(5 * lam + 1.5 * 5 - 1.5 * 10, rel=1e-12)
    assert sub == pytest.approx(5 - 10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0, 10), st.floats(0, 10))
def test_dual_midpoint_concavity(seed, ga, gb):
    r = np.random.default_rng(seed)
    ri, ct = random_hpd(r, 5), random_psd(r, 5)
    f = lambda x: dual_objective(x, ri, ct, 3.0, 5)[0]
    assert f(0.5 * (ga + gb)) >= 0.5 * (f(ga) + f(gb)) - 1e-10


def test_boundary_and_infeasible(rng):
    ri = random_hpd(rng, 4)
    with pytest.raises(BoundaryFeasibleError, match="enumerate"):
        solve_dual(ri, np.eye(4), 4.0, 4)
    with pytest.raises(InfeasibleError):
        solve_dual(ri, np.eye(4), 2.0, 4)


def test_inactive_identity_constraint(rng):
    ri = random_hpd(rng, 6)
    est = estimate_steering(ri, np.eye(6), 8.0, 6)
    assert est.dual.gamma2 == 0.0
    assert est.dual.gamma1 == pytest.approx(np.linalg.eigvalsh(ri)[0], rel=1e-12)
    assert phase_distance(est.a_hat, principal(ri)) < 1e-10
    assert est.constraint_inactive


def test_dual_matches_grid_oracle():
    r = np.random.default_rng(6)
    ri, ct, d0 = random_instance(r, 6, active_bias=1.0)
    dual = solve_dual(ri, ct, d0, 6)
    assert dual.gamma2 > 0
    g2, val = grid_dual_oracle(ri, ct, d0, 6, (0.0, 2 * dual.gamma2 + 1e-3), 1e-4)
    assert abs(val - dual.dual_value) <= 1e-6
    assert val <= dual.dual_value + 1e-12


def test_recovery_aligns_with_true_steering_high_snr():
    sc = Scenario(interferers=(), snr_db=30.0, num_snapshots=200)
    a = sc.presumed_steering
    R = sample_covariance(generate_snapshots(sc, a, make_rng(0, 0, 1)))
    model = SectorModel.build(sc.geometry, sc.sector)
    est = estimate_steering(R.inverse, model.c_tilde, model.delta0, 10)
    assert est.dual.gamma2 == 0.0 and est.case in ("single", "degenerate-inactive")
    assert abs(np.vdot(est.a_hat, a)) / 10 > 0.99


@pytest.mark.parametrize("M", [4, 6, 10])
def test_degenerate_two_path_instance(M):
    ri, model, p, b = degenerate_instance(M)
    est = estimate_steering(ri, model.c_tilde, model.delta0, M)
    assert est.dual.null_dim == 2
    assert est.case == "degenerate-inactive"
    assert est.kkt_residuals.ok(1e-6, model.delta0)
    assert est.objective == pytest.approx(M * np.linalg.eigvalsh(ri)[0], rel=1e-9)
    # p and b are themselves optimal
    for v in (p, b):
        assert np.real(np.vdot(v, ri @ v)) == pytest.approx(est.objective, rel=1e-9)
        assert np.real(np.vdot(v, model.c_tilde @ v)) <= model.delta0


def crossing_instance(seed=0):
    """Active constraint with a two-dimensional certificate null space.

    In a random unitary basis, Ri = diag(1, 2, 5, 7), Ct = diag(2, 0, 1, 3)
    and Delta0 = 4 (M = 4). The dual optimum sits where the first two
    eigenvalues of Ri + g Ct cross (g = 1/2), and the optimal vector is an
    equal blend of both basis directions.
    """
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((4, 4))
                        + 1j * np.random.default_rng(seed + 1).standard_normal((4, 4)))
    ri = (Q * np.array([1.0, 2.0, 5.0, 7.0])) @ Q.conj().T
    ct = (Q * np.array([2.0, 0.0, 1.0, 3.0])) @ Q.conj().T
    return ri, ct, 4.0, Q


def test_active_degenerate_case():
    ri, ct, d0, Q = crossing_instance()
    est = estimate_steering(ri, ct, d0, 4)
    assert est.case == "degenerate-active"
    assert est.dual.null_dim == 2
    assert est.dual.gamma2 == pytest.approx(0.5, abs=1e-10)
    assert est.dual.gamma1 == pytest.approx(2.0, abs=1e-10)
    assert est.objective == pytest.approx(6.0, rel=1e-9)  # 4 * (1/2 * 1 + 1/2 * 2)
    assert est.duality_gap < 1e-8
    coef = np.abs(Q.conj().T @ est.a_hat) ** 2
    np.testing.assert_allclose(coef, [2.0, 2.0, 0.0, 0.0], atol=1e-8)
    assert est.kkt_residuals.ok(1e-6, d0)


def test_inconsistent_null_space_reported():
    ri, ct, _, _ = crossing_instance()
    dual = solve_dual(ri, ct, 4.0, 4)
    # claim a threshold the null space cannot reach (mu range is [0, 2])
    with pytest.raises(InconsistencyError) as err:
        recover_primal(dual, ri, ct, 12.0, 4)
    assert err.value.diagnostics["mu_max"] == pytest.approx(2.0, abs=1e-8)


def test_kkt_flags_non_optimal_point():
    M = 4
    a = np.sqrt(M) * np.eye(M)[0]
    res = kkt_check(a, 0.0, 0.0, np.eye(M), np.zeros((M, M)), 1.0, M)
    assert res.stationarity == pytest.approx(1.0)
    assert not res.ok()


def test_kkt_phase_invariance(rng):
    ri, ct, d0 = random_instance(rng, 7)
    est = estimate_steering(ri, ct, d0, 7)
    d = est.dual
    r1 = kkt_check(est.a_hat, d.gamma1, d.gamma2, ri, ct, d0, 7)
    r2 = kkt_check(est.a_hat * np.exp(0.7j), d.gamma1, d.gamma2, ri, ct, d0, 7)
    for f in ("stationarity", "norm_gap", "slackness", "constraint_margin"):
        assert getattr(r2, f) == pytest.approx(getattr(r1, f), rel=1e-9, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 10))
def test_strong_duality_and_kkt(seed, M):
    ri, ct, d0 = random_instance(np.random.default_rng(seed), M)
    est = estimate_steering(ri, ct, d0, M)
    assert est.duality_gap <= 1e-6 * max(1.0, est.objective)
    assert est.kkt_residuals.ok(1e-6, d0)
    assert abs(np.linalg.norm(est.a_hat) ** 2 - M) <= 1e-8 * M
    assert est.dual.gamma1 > 0 and est.dual.gamma2 >= 0 and est.dual.null_dim >= 1


def test_rank_one_extract_rank_one(rng):
    a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    a *= np.sqrt(5) / np.linalg.norm(a)
    x = rank_one_extract(RelaxedSolution.from_matrix(np.outer(a, a.conj())), random_psd(rng, 5), 5)
    assert phase_distance(x, a) < 1e-10


def test_rank_one_extract_on_blend():
    M = 10
    ri, model, p, b = degenerate_instance(M)
    ct = model.c_tilde
    lam = 0.3
    A = lam * np.outer(p, p.conj()) + (1 - lam) * np.outer(b, b.conj())
    relaxed = RelaxedSolution.from_matrix(A)
    assert relaxed.rank == 2
    D = extraction_matrix(relaxed.factor, ct, M)
    assert abs(np.trace(D)) <= 1e-10
    x = rank_one_extract(relaxed, ct, M)
    assert np.linalg.norm(x) ** 2 == pytest.approx(M, rel=1e-6)
    assert np.real(np.vdot(x, ct @ x)) == pytest.approx(np.real(np.trace(ct @ A)), rel=1e-6)
    assert np.real(np.vdot(x, ri @ x)) == pytest.approx(np.real(np.trace(ri @ A)), rel=1e-6)


def test_self_consistency_when_unique(rng):
    for _ in range(20):
        ri, ct, d0 = random_instance(rng, 6)
        est = estimate_steering(ri, ct, d0, 6)
        if est.dual.null_dim != 1:
            continue
        x = rank_one_extract(RelaxedSolution.from_factor(est.a_hat), ct, 6)
        assert phase_distance(x, est.a_hat) < 1e-10


def test_feasible_point_from_identity(rng):
    ct = random_psd(rng, 5)
    a = relaxed_to_feasible_point(np.eye(5), ct, 5)
    _, V = np.linalg.eigh(ct)
    assert phase_distance(a, np.sqrt(5) * V[:, 0]) < 1e-8


def test_feasible_point_rank_one(rng):
    a = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    a *= np.sqrt(6) / np.linalg.norm(a)
    out = relaxed_to_feasible_point(np.outer(a, a.conj()), random_psd(rng, 6), 6)
    assert phase_distance(out, a) < 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 10))
def test_feasible_point_random(seed, M):
    r = np.random.default_rng(seed)
    ct = random_psd(r, M)
    A = random_psd(r, M, rank=int(r.integers(1, M + 1)))
    A *= M / np.real(np.trace(A))
    d0 = float(np.real(np.trace(ct @ A)))
    a = relaxed_to_feasible_point(A, ct, M)
    assert abs(np.vdot(a, a).real - M) <= 1e-10
    assert np.real(np.vdot(a, ct @ a)) <= d0 + 1e-8
    # and the lifted matrix of any feasible vector is relaxed-feasible
    L = np.outer(a, a.conj())
    assert np.trace(L).real == pytest.approx(M) and np.linalg.eigvalsh(L)[0] >= -1e-10


def test_phase_invariant_objective():
    g = ArrayGeometry(8)
    m = SectorModel.build(g, AngularSector.around(0.0, 10.0))
    ri = random_hpd(np.random.default_rng(9), 8)
    est = estimate_steering(ri, m.c_tilde, m.delta0, 8)
    rot = est.a_hat * np.exp(2.1j)
    assert np.real(np.vdot(rot, ri @ rot)) == pytest.approx(est.objective, rel=1e-12)
