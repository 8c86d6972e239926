import numpy as np
import pytest

from conftest import degenerate_instance, random_hpd, random_instance
from sdrbeam.errors import DomainError
from sdrbeam.linalg import phase_distance
from sdrbeam.oracle import grid_dual_oracle, multistart_primal_oracle
from sdrbeam.svest import estimate_steering, solve_dual


def test_grid_inactive_identity(rng):
    ri = random_hpd(rng, 5)
    g2, _ = grid_dual_oracle(ri, np.eye(5), 8.0, 5, (0.0, 5.0), 0.01)
    assert g2 == 0.0


def test_grid_sandwich_and_refinement():
    r = np.random.default_rng(21)
    for _ in range(5):
        ri, ct, d0 = random_instance(r, 5, active_bias=1.0)
        dual = solve_dual(ri, ct, d0, 5)
        # window around gamma2*, step relative to its size
        scale = 1.0 + dual.gamma2
        br = (max(0.0, dual.gamma2 - 0.05 * scale), dual.gamma2 + 0.05 * scale)
        step = 1e-4 * scale
        g2, val = grid_dual_oracle(ri, ct, d0, 5, br, step)
        assert val <= dual.dual_value + 1e-6
        # the two grid neighbours of gamma2* bound the grid maximum from below
        k = np.floor((dual.gamma2 - br[0]) / step)
        for x in (br[0] + k * step, br[0] + (k + 1) * step):
            _, v2 = grid_dual_oracle(ri, ct, d0, 5, (x, x), 1.0)
            assert val >= v2 - 1e-15
        _, val_half = grid_dual_oracle(ri, ct, d0, 5, br, step / 2)
        assert abs(val_half - val) < 1e-8


def test_grid_rejects_bad_bracket():
    with pytest.raises(DomainError):
        grid_dual_oracle(np.eye(2), np.eye(2), 4.0, 2, (1.0, 0.0), 0.1)


def test_primal_inactive_matches_principal(rng):
    ri = random_hpd(rng, 4)
    a, f = multistart_primal_oracle(ri, np.eye(4), 6.0, 4, starts=4)
    _, V = np.linalg.eigh(ri)
    assert phase_distance(a, 2 * V[:, 0]) < 1e-6
    assert f == pytest.approx(4 * np.linalg.eigvalsh(ri)[0], rel=1e-9)


def test_primal_random_instances():
    r = np.random.default_rng(4)
    for _ in range(15):
        ri, ct, d0 = random_instance(r, 4)
        est = estimate_steering(ri, ct, d0, 4)
        _, f = multistart_primal_oracle(ri, ct, d0, 4, starts=8)
        assert f >= est.dual.dual_value - 1e-5          # weak duality
        assert f <= est.objective + 1e-5 * (1 + est.objective)


def test_primal_degenerate_instance():
    ri, model, _, _ = degenerate_instance(6)
    est = estimate_steering(ri, model.c_tilde, model.delta0, 6)
    _, f = multistart_primal_oracle(ri, model.c_tilde, model.delta0, 6, starts=8)
    assert abs(f - est.objective) <= 1e-5 * (1 + est.objective)


def test_primal_dimension_limit():
    with pytest.raises(DomainError):
        multistart_primal_oracle(np.eye(7), np.eye(7), 14.0, 7)
