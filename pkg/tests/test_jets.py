import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerab.dsl import eval_component
from finslerab.jets import Jet, JetError, arith, elem, fd_oracle, jexp, jlog, jsqrt, seed


def test_seed_single_direction():
    (j,) = seed([3.0], {0})
    assert j.val == 3.0
    assert j.grad.tolist() == [1.0]
    assert j.hess.tolist() == [0.0]


def test_seed_constant():
    a, b = seed([5.0, 2.0], {1})
    assert a.val == 5.0 and not a.grad.any()
    assert b.grad.tolist() == [0.0, 1.0]


def test_seed_duplicate_direction_rejected():
    with pytest.raises(JetError):
        seed([1.0, 2.0], [0, 0])


def test_square_at_three():
    (x,) = seed([3.0], {0})
    f = x * x
    assert f.val == 9.0 and f.grad[0] == 6.0 and f.hess_entry(0, 0) == 2.0


def test_reciprocal():
    (x,) = seed([2.0], {0})
    f = 1.0 / x
    assert f.val == 0.5
    assert f.grad[0] == -0.25
    assert f.hess_entry(0, 0) == 0.25  # d2(1/x)/dx2 = 2/x^3


def test_pow_matches_div_route():
    (x,) = seed([4.0], {0})
    via_pow = x**-1.0
    via_div = arith(Jet.constant(1.0, 1), x, "div")
    assert abs(via_pow.val - via_div.val) < 1e-15
    assert abs(via_pow.grad[0] - via_div.grad[0]) < 1e-15
    assert abs(via_pow.hess_entry(0, 0) - via_div.hess_entry(0, 0)) < 1e-15


def test_sqrt_at_four():
    (x,) = seed([4.0], {0})
    f = jsqrt(x)
    assert f.val == 2.0
    assert abs(f.grad[0] - 0.25) < 1e-16
    assert abs(f.hess_entry(0, 0) + 1.0 / 32.0) < 1e-16


def test_exp_at_zero():
    f = elem(Jet.variable(0.0, 0, 1), "exp")
    assert f.val == 1.0 and f.grad[0] == 1.0 and f.hess_entry(0, 0) == 1.0


def test_log_exp_identity():
    (x,) = seed([1.3], {0})
    f = jlog(jexp(x))
    assert abs(f.val - 1.3) < 1e-14
    assert abs(f.grad[0] - 1.0) < 1e-14
    assert abs(f.hess_entry(0, 0)) < 1e-14


def test_trig_composition():
    (x,) = seed([0.7], {0})
    f = elem(x, "sin") * elem(x, "cos")  # = sin(2x)/2
    assert abs(f.val - 0.5 * math.sin(1.4)) < 1e-15
    assert abs(f.grad[0] - math.cos(1.4)) < 1e-14
    assert abs(f.hess_entry(0, 0) + 2.0 * math.sin(1.4)) < 1e-14


def test_fd_oracle_square():
    d = fd_oracle(lambda x: x[0] ** 2, [3.0], 0, 1e-5)
    assert abs(d - 6.0) < 1e-9


def test_fd_oracle_sin():
    d = fd_oracle(lambda x: math.sin(x[0]), [0.0], 0, 1e-5)
    assert abs(d - 1.0) < 1e-10


def test_domain_errors():
    (x,) = seed([-1.0], {0})
    with pytest.raises(JetError):
        jsqrt(x)
    with pytest.raises(JetError):
        jlog(x)
    with pytest.raises(JetError):
        x**0.5
    with pytest.raises(JetError):
        x / Jet.constant(0.0, 1)


def test_deriv_shift():
    # f = x0^2 x1: deriv along 0 must carry value 2 x0 x1 and gradient (2 x1, 2 x0)
    x0, x1 = seed([1.5, -2.0], {0, 1})
    f = x0 * x0 * x1
    g = f.deriv(0)
    assert abs(g.val - 2 * 1.5 * -2.0) < 1e-15
    assert abs(g.grad[0] - 2 * -2.0) < 1e-15
    assert abs(g.grad[1] - 2 * 1.5) < 1e-15


finite = st.floats(min_value=-100, max_value=100, allow_nan=False)


@given(finite, finite, finite, finite, finite, finite)
@settings(max_examples=200, deadline=None)
def test_linearity_exact(av, ag, bv, bg, ca, cb):
    a = Jet(av, np.array([ag]), np.array([0.5 * ag]))
    b = Jet(bv, np.array([bg]), np.array([0.25 * bg]))
    lhs = ca * a + cb * b
    assert lhs.val == ca * av + cb * bv
    assert lhs.grad[0] == ca * ag + cb * bg
    assert lhs.hess[0] == ca * a.hess[0] + cb * b.hess[0]


@given(finite, finite, finite, finite)
@settings(max_examples=200, deadline=None)
def test_product_rule_exact(av, ag, bv, bg):
    a = Jet(av, np.array([ag]), np.array([0.0]))
    b = Jet(bv, np.array([bg]), np.array([0.0]))
    p = a * b
    # no truncation error at order <= 2: the rule holds in exact float arithmetic
    assert p.grad[0] == av * bg + bv * ag


def _all_expressions(spec):
    n = spec.dim
    for i in range(n):
        for j in range(i, n):
            yield spec.a_expr(i, j)
        yield spec.b_expr(i)


@pytest.mark.parametrize("name", ["matsumoto_example", "sphere_round", "euclidean_homothetic"])
def test_jets_match_fd_on_metric_expressions(name):
    from finslerab import testmetrics

    spec = testmetrics.shipped_metric(name)
    rng = np.random.default_rng(7)
    n = spec.dim
    lo = np.array([d[0] for d in spec.domain])
    hi = np.array([d[1] for d in spec.domain])
    h = 1e-5
    for _ in range(5):
        x = rng.uniform(lo + 2 * h, hi - 2 * h)
        env = spec.chart_jets(x)
        for expr in _all_expressions(spec):
            jet = eval_component(expr, env)

            def plain(pt, expr=expr):
                e = [Jet.constant(float(v), 1) for v in pt]
                return eval_component(expr, e).val

            for k in range(n):
                d_fd = fd_oracle(plain, x, k, h)
                tol = max(1e-6, 1e-6 * abs(jet.val))
                assert abs(jet.grad[k] - d_fd) < tol
                # second derivative via central difference of the jet gradient
                xp, xm = x.copy(), x.copy()
                xp[k] += h
                xm[k] -= h
                gp = eval_component(expr, spec.chart_jets(xp)).grad[k]
                gm = eval_component(expr, spec.chart_jets(xm)).grad[k]
                h2_fd = (gp - gm) / (2 * h)
                tol2 = max(1e-4, 1e-4 * abs(jet.val))
                assert abs(jet.hess_entry(k, k) - h2_fd) < tol2
