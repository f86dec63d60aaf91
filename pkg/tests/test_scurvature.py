import math

import numpy as np
import pytest

from finslerab import testmetrics
from finslerab.dsl import parse_metric
from finslerab.riemann import build_bundle
from finslerab.scurvature import (
    _MEMO,
    constant_killing_verdict,
    s_curvature_closed,
    s_curvature_def,
    volume_factor,
)
from .conftest import example_point, unit_y


@pytest.mark.parametrize("form", ["bh", "ht"])
@pytest.mark.parametrize("n", range(2, 9))
def test_volume_factor_normalized_at_zero(n, form):
    assert abs(volume_factor(n, 0.0, form).f - 1.0) <= 1e-10


def test_volume_factor_closed_form_check():
    # n = 2, BH: denominator integral is pi (1 + b^2/2), so f(0.3) = 1/1.045
    vf = volume_factor(2, 0.3, "bh")
    assert abs(vf.f - 1.0 / 1.045) <= 1e-8


@pytest.mark.parametrize("form", ["bh", "ht"])
@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_fprime_matches_fd(n, form):
    b, h = 0.27, 1e-5
    fd = (volume_factor(n, b + h, form).f - volume_factor(n, b - h, form).f) / (2 * h)
    assert abs(volume_factor(n, b, form).fprime - fd) <= 1e-7


def test_lambda_small_b_limit():
    # Lambda = f'(b)/(b f(b)) tends to f''(0)/f(0); the guard must join smoothly
    lam0 = volume_factor(3, 0.0, "bh").Lambda
    lam1 = volume_factor(3, 2e-4, "bh").Lambda  # ratio branch
    assert abs(lam0 - lam1) <= 1e-6
    assert math.isfinite(lam0)


def test_volume_factor_memoized():
    volume_factor(4, 0.123456, "ht")
    key = (4, "ht", int(round(0.123456 * 1e12)))
    assert key in _MEMO
    again = volume_factor(4, 0.123456, "ht")
    assert again is _MEMO[key]


def test_volume_factor_domain_errors():
    with pytest.raises(ValueError):
        volume_factor(3, 0.5, "bh")
    with pytest.raises(ValueError):
        volume_factor(1, 0.1, "bh")
    with pytest.raises(ValueError):
        volume_factor(3, 0.1, "euclidean")


def test_dual_route_agreement(generic3d):
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(10):
        bu = build_bundle(generic3d, rng.uniform(-0.8, 0.8, 3))
        for _ in range(4):
            y = unit_y(bu, rng)
            for form in ("bh", "ht"):
                a = s_curvature_closed(bu, y, form)
                b = s_curvature_def(bu, y, form)
                worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    assert worst <= 1e-7


def test_homogeneity_degree_one(generic_bundle):
    y = np.array([0.4, -0.6, 0.3])
    assert abs(
        s_curvature_closed(generic_bundle, 2 * y, "bh")
        - 2 * s_curvature_closed(generic_bundle, y, "bh")
    ) <= 1e-12


def test_example_vanishing_s(example_spec):
    rng = np.random.default_rng(2)
    for _ in range(3):
        bu = build_bundle(example_spec, example_point(rng))
        y = unit_y(bu, rng)
        assert abs(s_curvature_closed(bu, y, "bh")) <= 1e-10
        assert abs(s_curvature_def(bu, y, "bh")) <= 1e-9


def test_constant_killing_forms_have_zero_s():
    # beta = 0 and beta = const Killing both give S = 0 exactly in closed form
    spec = parse_metric("dim = 3\na 1 1 = 1\na 2 2 = 1\na 3 3 = 1\nb 1 = 0.2")
    bu = build_bundle(spec, np.array([0.1, 0.4, -0.3]))
    rng = np.random.default_rng(3)
    y = unit_y(bu, rng)
    assert s_curvature_closed(bu, y, "bh") == 0.0
    assert abs(s_curvature_def(bu, y, "bh")) <= 1e-12
    ok, resid = constant_killing_verdict([bu])
    assert ok and resid["max_r"] <= 1e-15


def test_conformal_beta_nonzero_s(homothetic_spec):
    bu = build_bundle(homothetic_spec, np.array([0.4, -0.2, 0.6]))
    rng = np.random.default_rng(4)
    vals = [abs(s_curvature_def(bu, unit_y(bu, rng), "bh")) for _ in range(6)]
    assert max(vals) > 1e-3


def test_killing_with_varying_norm_nonzero_s(rotational_spec):
    # Killing but s_i != 0: the verdict machinery must compute, not assume
    bu = build_bundle(rotational_spec, np.array([0.5, 0.3]))
    ok, resid = constant_killing_verdict([bu])
    assert not ok
    assert resid["max_r"] <= 1e-15 and resid["max_s_i"] > 0.01
    rng = np.random.default_rng(5)
    vals = [abs(s_curvature_def(bu, unit_y(bu, rng), "bh")) for _ in range(6)]
    assert max(vals) > 1e-3


def test_example_verdict(example_spec):
    rng = np.random.default_rng(6)
    bundles = [build_bundle(example_spec, example_point(rng)) for _ in range(4)]
    ok, _ = constant_killing_verdict(bundles)
    assert ok
