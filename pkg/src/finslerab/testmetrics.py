"""Reproducible metric families for tests, demos and dimension sweeps.

The random family is a bounded perturbation of the Euclidean metric with a
small polynomial 1-form: coefficients are drawn from a seeded generator and
scaled so that, at sampled points, the matrix stays uniformly positive
definite (min eigenvalue >= 0.2) and b^2 stays <= 0.2, comfortably inside
the b < 1/2 validity region.  Everything is emitted as metric-file text and
parsed through the normal front end, so generated metrics exercise the same
code path as shipped ones.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .dsl import MetricSpec, parse_metric

__all__ = [
    "shipped_metric_path",
    "shipped_metric",
    "list_shipped",
    "euclidean",
    "euclidean_linear_beta",
    "random_metric_text",
    "random_metric",
]


def shipped_metric_path(name: str):
    """Filesystem path of a shipped .metric file (name with or without suffix)."""
    if not name.endswith(".metric"):
        name += ".metric"
    path = resources.files("finslerab").joinpath("metrics").joinpath(name)
    if not path.is_file():
        raise FileNotFoundError(f"no shipped metric {name!r}; have {list_shipped()}")
    return path


def shipped_metric(name: str) -> MetricSpec:
    path = shipped_metric_path(name)
    return parse_metric(path.read_text(), name=name.removesuffix(".metric"))


def list_shipped() -> list[str]:
    folder = resources.files("finslerab").joinpath("metrics")
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".metric"))


def euclidean(n: int) -> MetricSpec:
    lines = [f"dim = {n}"] + [f"a {i} {i} = 1" for i in range(1, n + 1)]
    return parse_metric("\n".join(lines), name=f"euclid{n}")


def euclidean_linear_beta(n: int, k: float = 0.1) -> MetricSpec:
    """Flat metric with the radial form b_i = k x_i (conformal, c = k)."""
    lines = [f"dim = {n}"]
    lines += [f"a {i} {i} = 1" for i in range(1, n + 1)]
    lines += [f"b {i} = {k!r} * x{i}" for i in range(1, n + 1)]
    return parse_metric("\n".join(lines), name=f"euclid{n}_radial")


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def random_metric_text(n: int, seed: int, eps: float = 0.15, beta_scale: float = 0.25) -> str:
    """Metric-file text for a seeded random perturbed metric of dimension n."""
    rng = np.random.default_rng(seed)

    def poly(scale, allow_const=True):
        terms = []
        if allow_const and rng.random() < 0.5:
            terms.append(_fmt(scale * rng.uniform(-1, 1)))
        k = int(rng.integers(1, n + 1))
        terms.append(f"{_fmt(scale * rng.uniform(-1, 1))}*x{k}")
        l = int(rng.integers(1, n + 1))
        m = int(rng.integers(1, n + 1))
        terms.append(f"{_fmt(scale * rng.uniform(-1, 1))}*x{l}*x{m}")
        return " + ".join(terms).replace("+ -", "- ")

    lines = [f"dim = {n}"]
    for i in range(1, n + 1):
        lines.append(f"a {i} {i} = 1 + {poly(eps, allow_const=False)}")
        for j in range(i + 1, n + 1):
            lines.append(f"a {i} {j} = {poly(0.5 * eps)}")
    for i in range(1, n + 1):
        lines.append(f"b {i} = {poly(beta_scale)}")
    return "\n".join(lines) + "\n"


def random_metric(n: int, seed: int, samples: int = 60) -> MetricSpec:
    """Seeded random metric, rescaled until the sampled eigenvalue/b^2 bounds hold."""
    eps, bscale = 0.15, 0.25
    for _ in range(8):
        spec = parse_metric(random_metric_text(n, seed, eps, bscale), name=f"rand{n}_{seed}")
        rng = np.random.default_rng(seed + 991)
        pts = rng.uniform(-1, 1, size=(samples, n))
        min_eig = np.inf
        max_bsq = 0.0
        for x in pts:
            a = spec.a_values(x)
            min_eig = min(min_eig, float(np.linalg.eigvalsh(a)[0]))
            b = spec.b_values(x)
            max_bsq = max(max_bsq, float(b @ np.linalg.solve(a, b)))
        if min_eig >= 0.2 and max_bsq <= 0.2:
            return spec
        if min_eig < 0.2:
            eps *= 0.6
        if max_bsq > 0.2:
            bscale *= 0.6
    raise RuntimeError(f"could not scale random metric n={n} seed={seed} into bounds")
