import json

import numpy as np
import pytest

from histarch import BudgetExhaustedError, DomainError, ParameterError, make_suite
from histarch.benchmarks import (BudgetedEvaluator, ellipsoid_weights,
                                 make_ellipsoid_problem, random_rotation,
                                 rastrigin, sphere, suite_manifest)

SUITE_NAMES = ["sphere", "rot_ellipsoid", "rosenbrock", "rastrigin", "sr_rastrigin",
               "ackley", "griewank", "schwefel", "hybrid", "composition"]


def suite10():
    return make_suite(10, seed=123)


def test_suite_contents_and_unsupported_dim():
    problems = suite10()
    assert [p.name for p in problems] == SUITE_NAMES
    with pytest.raises(ParameterError):
        make_suite(5, seed=1)


def test_sphere_zero_at_origin():
    assert sphere(np.zeros(10)) == 0.0


def test_rastrigin_spot_values():
    assert rastrigin(np.zeros(10)) == pytest.approx(0.0, abs=1e-12)
    x = np.zeros(10)
    x[0] = 1.0
    assert rastrigin(x) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("dim", [2, 10, 30])
def test_every_optimum_evaluates_to_f_opt(dim):
    for p in make_suite(dim, seed=5):
        assert p.x_opt is not None
        assert p.f(p.x_opt) == pytest.approx(p.f_opt, abs=1e-9)


def test_shifted_rotated_rastrigin_zero_at_stored_shift():
    p = next(q for q in suite10() if q.name == "sr_rastrigin")
    assert abs(p.f(p.x_opt) - 0.0) <= 1e-9


def test_multimodal_strictly_above_optimum_elsewhere():
    rng = np.random.default_rng(77)
    for p in suite10():
        if p.category not in ("multimodal", "hybrid", "composition"):
            continue
        for _ in range(1000):
            x = p.domain.uniform_point(rng)
            if np.abs(x - p.x_opt).max() < 1e-6:
                continue
            assert p.f(x) > p.f_opt


def test_rotations_orthonormal():
    rng = np.random.default_rng(3)
    for dim in (2, 10, 30):
        r = random_rotation(dim, rng)
        assert np.abs(r @ r.T - np.eye(dim)).max() <= 1e-12


def test_determinism_bit_identical():
    a = make_suite(10, seed=42)
    b = make_suite(10, seed=42)
    rng = np.random.default_rng(0)
    xs = [a[0].domain.uniform_point(rng) for _ in range(20)]
    for pa, pb in zip(a, b):
        dom_rng = np.random.default_rng(1)
        for _ in range(20):
            x = pa.domain.uniform_point(dom_rng)
            assert pa.f(x) == pb.f(x)


def test_ellipsoid_weights_span_squared_axis_ratio():
    w = ellipsoid_weights(10, 1e3)
    assert w[0] == 1.0
    assert w[-1] == pytest.approx(1e6)
    assert ellipsoid_weights(1, 1e3).tolist() == [1.0]


def test_custom_ellipsoid_problem():
    p = make_ellipsoid_problem(10, 1e2)
    assert p.f(np.zeros(10)) == 0.0
    e = np.zeros(10)
    e[-1] = 1.0
    assert p.f(e) == pytest.approx(1e4)


def test_budget_counter_and_exhaustion():
    p = suite10()[0]
    ev = BudgetedEvaluator(p, budget=1)
    ev(np.zeros(10))
    assert ev.used == 1
    with pytest.raises(BudgetExhaustedError):
        ev(np.zeros(10))


def test_budget_counts_every_call():
    p = suite10()[0]
    ev = BudgetedEvaluator(p, budget=50)
    rng = np.random.default_rng(4)
    for n in range(1, 21):
        ev(p.domain.uniform_point(rng))
        assert ev.used == n
    assert ev.remaining == 30


def test_separate_evaluators_do_not_interfere():
    p = suite10()[0]
    ev1 = BudgetedEvaluator(p, budget=10)
    ev2 = BudgetedEvaluator(p, budget=10)
    ev1(np.zeros(10))
    assert ev1.used == 1 and ev2.used == 0


def test_out_of_domain_evaluation_rejected():
    p = suite10()[0]
    ev = BudgetedEvaluator(p, budget=10)
    with pytest.raises(DomainError):
        ev(np.full(10, 200.0))
    assert ev.used == 0


def test_manifest_is_json_ready():
    problems = suite10()
    manifest = suite_manifest(problems)
    text = json.dumps(manifest)
    loaded = json.loads(text)
    assert [m["name"] for m in loaded] == SUITE_NAMES
    assert all(m["dim"] == 10 for m in loaded)
    schwefel = next(m for m in loaded if m["name"] == "schwefel")
    assert schwefel["lower"][0] == -500.0 and schwefel["upper"][0] == 500.0
