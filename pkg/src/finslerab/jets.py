"""Truncated Taylor (jet) arithmetic of total order 2.

A Jet carries the value of a quantity together with its exact first and
second partial derivatives with respect to a fixed set of ``d`` seed
directions.  Arithmetic on jets propagates those derivatives through the
chain/product rule with no truncation error at order <= 2, which is what
every curvature formula downstream consumes.

The Hessian is stored as the packed upper triangle (row-major, i <= j),
so symmetry is structural rather than asserted.

Jets are immutable values and every operation is pure, so evaluation can be
fanned out across workers with no coordination.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Jet",
    "JetError",
    "seed",
    "arith",
    "elem",
    "fd_oracle",
    "jsqrt",
    "jsin",
    "jcos",
    "jexp",
    "jlog",
]

# Denominators smaller than this are treated as singular instead of being
# allowed to overflow into inf/NaN silently.
_TINY = 1e-300


class JetError(ValueError):
    """Domain violation in jet arithmetic (division by zero, log of <= 0, ...)."""


# Per-dimension index caches: triu index pair arrays for packing symmetric
# outer products, and a (d, d) lookup table mapping (i, j) -> packed slot.
_IDX_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _indices(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return _IDX_CACHE[d]
    except KeyError:
        iu, ju = np.triu_indices(d)
        table = np.empty((d, d), dtype=np.intp)
        table[iu, ju] = np.arange(iu.size)
        table[ju, iu] = table[iu, ju]
        _IDX_CACHE[d] = (iu, ju, table)
        return _IDX_CACHE[d]


class Jet:
    """Order-2 jet: value, gradient (d,), packed symmetric Hessian (d(d+1)/2,)."""

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val: float, grad: np.ndarray, hess: np.ndarray):
        self.val = float(val)
        self.grad = grad
        self.hess = hess

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(v: float, d: int) -> "Jet":
        return Jet(v, np.zeros(d), np.zeros(d * (d + 1) // 2))

    @staticmethod
    def variable(v: float, direction: int, d: int) -> "Jet":
        if not 0 <= direction < d:
            raise JetError(f"direction {direction} out of range for {d} directions")
        g = np.zeros(d)
        g[direction] = 1.0
        return Jet(v, g, np.zeros(d * (d + 1) // 2))

    @property
    def d(self) -> int:
        return self.grad.shape[0]

    # -- accessors ----------------------------------------------------------

    def hess_entry(self, i: int, j: int) -> float:
        _, _, table = _indices(self.d)
        return float(self.hess[table[i, j]])

    def hess_matrix(self) -> np.ndarray:
        iu, ju, _ = _indices(self.d)
        m = np.zeros((self.d, self.d))
        m[iu, ju] = self.hess
        m[ju, iu] = self.hess
        return m

    def deriv(self, k: int) -> "Jet":
        """Order-reduced partial derivative along direction k.

        The result's value and gradient are exact; its Hessian would need
        third derivatives of self and is set to zero.  Safe wherever the
        consumer never reads second derivatives of the derived quantity.
        """
        _, _, table = _indices(self.d)
        return Jet(self.grad[k], self.hess[table[k]].copy(), np.zeros_like(self.hess))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.grad - other.grad, self.hess - other.hess)
        return Jet(self.val - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet):
            iu, ju, _ = _indices(self.d)
            g1, g2 = self.grad, other.grad
            hess = (
                self.val * other.hess
                + other.val * self.hess
                + g1[iu] * g2[ju]
                + g1[ju] * g2[iu]
            )
            return Jet(self.val * other.val, self.val * g2 + other.val * g1, hess)
        return Jet(self.val * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        if abs(other) < _TINY:
            raise JetError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return other * self._reciprocal()

    def _reciprocal(self) -> "Jet":
        v = self.val
        if abs(v) < _TINY:
            raise JetError("division by zero jet")
        inv = 1.0 / v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __pow__(self, expo):
        if isinstance(expo, Jet):
            raise JetError("exponent must be a real constant")
        p = float(expo)
        v = self.val
        if p == 0.0:
            return Jet.constant(1.0, self.d)
        if p != int(p) and v <= 0.0:
            raise JetError(f"fractional power of non-positive base {v}")
        if p < 0 and abs(v) < _TINY:
            raise JetError("negative power of zero")
        c0 = v**p
        c1 = p * v ** (p - 1.0)
        c2 = p * (p - 1.0) * v ** (p - 2.0)
        return self._chain(c0, c1, c2)

    def _chain(self, c0: float, c1: float, c2: float) -> "Jet":
        """Compose with a scalar function given its value and derivatives at self.val."""
        iu, ju, _ = _indices(self.d)
        g = self.grad
        return Jet(c0, c1 * g, c1 * self.hess + c2 * (g[iu] * g[ju]))

    def __repr__(self):
        return f"Jet({self.val!r}, grad={self.grad!r})"


# -- elementary functions ---------------------------------------------------


def jsqrt(a: Jet) -> Jet:
    if a.val <= _TINY:
        raise JetError(f"sqrt of non-positive value {a.val}")
    r = math.sqrt(a.val)
    return a._chain(r, 0.5 / r, -0.25 / (r * a.val))


def jexp(a: Jet) -> Jet:
    e = math.exp(a.val)
    return a._chain(e, e, e)


def jlog(a: Jet) -> Jet:
    if a.val <= _TINY:
        raise JetError(f"log of non-positive value {a.val}")
    inv = 1.0 / a.val
    return a._chain(math.log(a.val), inv, -inv * inv)


def jsin(a: Jet) -> Jet:
    s, c = math.sin(a.val), math.cos(a.val)
    return a._chain(s, c, -s)


def jcos(a: Jet) -> Jet:
    s, c = math.sin(a.val), math.cos(a.val)
    return a._chain(c, -s, -c)


_ELEM = {"sqrt": jsqrt, "sin": jsin, "cos": jcos, "exp": jexp, "log": jlog}
_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": lambda a, p: a**p,
}


def seed(values, active) -> list[Jet]:
    """Seed a tuple of input values as jets.

    ``values[i]`` becomes the i-th coordinate; it carries a unit gradient in
    direction i when ``i in active`` and is a constant jet otherwise.
    """
    active = list(active)
    if len(set(active)) != len(active):
        raise JetError("duplicate direction index in seed")
    d = len(values)
    if d < 1:
        raise JetError("need at least one direction")
    out = []
    for i, v in enumerate(values):
        if i in active:
            out.append(Jet.variable(v, i, d))
        else:
            out.append(Jet.constant(v, d))
    return out


def arith(a: Jet, b, op: str) -> Jet:
    """Named binary operation, one of add/sub/mul/div/pow."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise JetError(f"unknown operation {op!r}") from None
    return fn(a, b)


def elem(a: Jet, name: str) -> Jet:
    """Named elementary function, one of sqrt/sin/cos/exp/log."""
    try:
        fn = _ELEM[name]
    except KeyError:
        raise JetError(f"unknown function {name!r}") from None
    return fn(a)


def fd_oracle(f, x, i: int, h: float = 1e-5) -> float:
    """Central-difference first derivative of a plain scalar field.

    Independent of the jet machinery on purpose: every jet gradient in the
    test suite is checked against this.
    """
    xp = np.array(x, dtype=float)
    xm = xp.copy()
    xp[i] += h
    xm[i] -= h
    return (f(xp) - f(xm)) / (2.0 * h)
