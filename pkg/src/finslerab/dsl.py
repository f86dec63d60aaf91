"""Metric definition files: parsing, evaluation over jets, validation.

A metric file declares an n-dimensional chart with a symmetric matrix of
closed-form entries a_ij(x), a 1-form b_i(x), and a per-coordinate domain
box.  Line format (``#`` starts a comment)::

    dim = 3
    domain x1 = [0.5, 2]        # optional, default [-1, 1]
    a 1 1 = x1^2
    a 1 2 = sin(x2) * 0.1
    b 3 = 0.4

Expression grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := base ("^" signed-number)?
    base   := number | "x" digits | "(" expr ")" | "-" base | func "(" expr ")"
    func   := "sin" | "cos" | "exp" | "log" | "sqrt"

Exponents are literal (possibly signed, possibly fractional) numbers, so
every expression is an explicit rational/power/trig form; there are no
conditionals and no user-defined functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jets import Jet, elem, seed

__all__ = [
    "MetricFileError",
    "MetricSpec",
    "ValidationReport",
    "parse_metric",
    "parse_expression",
    "eval_component",
    "expr_to_text",
    "validate_spec",
]

_FUNCS = ("sin", "cos", "exp", "log", "sqrt")


class MetricFileError(ValueError):
    """Syntax or consistency error in a metric file, with line/column info."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(msg + loc)
        self.line = line
        self.col = col


# -- expression AST ----------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based coordinate index


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    expo: float


@dataclass(frozen=True)
class Fun:
    name: str
    child: object


def eval_component(expr, env: list[Jet]) -> Jet:
    """Evaluate an expression over a jet environment (one jet per coordinate)."""
    if isinstance(expr, Const):
        return Jet.constant(expr.value, env[0].d)
    if isinstance(expr, Var):
        return env[expr.index]
    if isinstance(expr, Neg):
        return -eval_component(expr.child, env)
    if isinstance(expr, Bin):
        a = eval_component(expr.left, env)
        b = eval_component(expr.right, env)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        return a / b
    if isinstance(expr, Pow):
        return eval_component(expr.base, env) ** expr.expo
    if isinstance(expr, Fun):
        return elem(eval_component(expr.child, env), expr.name)
    raise TypeError(f"not an expression node: {expr!r}")


def _num_repr(v: float) -> str:
    return repr(int(v)) if v == int(v) and abs(v) < 1e15 else repr(v)


def expr_to_text(expr) -> str:
    """Serialize an expression; parse(expr_to_text(e)) evaluates identically to e."""
    if isinstance(expr, Const):
        return _num_repr(expr.value)
    if isinstance(expr, Var):
        return f"x{expr.index + 1}"
    if isinstance(expr, Neg):
        return f"(-{expr_to_text(expr.child)})"
    if isinstance(expr, Bin):
        return f"({expr_to_text(expr.left)} {expr.op} {expr_to_text(expr.right)})"
    if isinstance(expr, Pow):
        return f"{expr_to_text(expr.base)}^{_num_repr(expr.expo)}"
    if isinstance(expr, Fun):
        return f"{expr.name}({expr_to_text(expr.child)})"
    raise TypeError(f"not an expression node: {expr!r}")


# -- tokenizer / recursive-descent parser ------------------------------------


def _tokenize(text: str, line_no: int):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch in "+-*/^()=[],":
            toks.append((ch, ch, col))
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            try:
                val = float(text[i:j])
            except ValueError:
                raise MetricFileError(f"bad number {text[i:j]!r}", line_no, col)
            toks.append(("num", val, col))
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], col))
            i = j
        else:
            raise MetricFileError(f"unexpected character {ch!r}", line_no, col)
    toks.append(("end", None, n + 1))
    return toks


class _Parser:
    def __init__(self, toks, line_no: int, dim: int):
        self.toks = toks
        self.pos = 0
        self.line = line_no
        self.dim = dim

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise MetricFileError(f"expected {kind!r}, found {tok[1]!r}", self.line, tok[2])
        self.pos += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in "*/":
            op = self.take()[0]
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "^":
            self.take()
            sign = 1.0
            if self.peek()[0] in "+-":
                if self.take()[0] == "-":
                    sign = -1.0
            tok = self.take("num")
            return Pow(node, sign * tok[1])
        return node

    def base(self):
        kind, val, col = self.peek()
        if kind == "num":
            self.take()
            return Const(val)
        if kind == "-":
            self.take()
            return Neg(self.base())
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "name":
            self.take()
            if val in _FUNCS:
                self.take("(")
                node = self.expr()
                self.take(")")
                return Fun(val, node)
            if val.startswith("x") and val[1:].isdigit():
                k = int(val[1:])
                if not 1 <= k <= self.dim:
                    raise MetricFileError(
                        f"variable x{k} out of range 1..{self.dim}", self.line, col
                    )
                return Var(k - 1)
            raise MetricFileError(f"unknown name {val!r}", self.line, col)
        raise MetricFileError(f"unexpected token {val!r}", self.line, col)


def parse_expression(text: str, dim: int, line_no: int = 1):
    p = _Parser(_tokenize(text, line_no), line_no, dim)
    node = p.expr()
    p.take("end")
    return node


# -- metric spec --------------------------------------------------------------


@dataclass
class MetricSpec:
    """Parsed analytic metric: symmetric a_ij(x), 1-form b_i(x), domain box."""

    dim: int
    a_entries: dict = field(default_factory=dict)  # (i, j) with i <= j -> AST
    b_entries: dict = field(default_factory=dict)  # i -> AST
    domain: list = field(default_factory=list)  # per-coordinate (lo, hi)
    name: str = "metric"

    _ZERO = Const(0.0)

    def a_expr(self, i: int, j: int):
        return self.a_entries.get((min(i, j), max(i, j)), self._ZERO)

    def b_expr(self, i: int):
        return self.b_entries.get(i, self._ZERO)

    def chart_jets(self, x, total_dirs: int | None = None) -> list[Jet]:
        """Lift a chart point to jets with x-coordinates in directions 0..dim-1."""
        d = self.dim if total_dirs is None else total_dirs
        env = [Jet.variable(float(x[k]), k, d) for k in range(self.dim)]
        return env

    def eval_a_jets(self, env: list[Jet]):
        n = self.dim
        return [[eval_component(self.a_expr(i, j), env) for j in range(n)] for i in range(n)]

    def eval_b_jets(self, env: list[Jet]):
        return [eval_component(self.b_expr(i), env) for i in range(self.dim)]

    def a_values(self, x) -> np.ndarray:
        env = [Jet.constant(float(x[k]), 1) for k in range(self.dim)]
        n = self.dim
        out = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = eval_component(self.a_expr(i, j), env).val
        return out

    def b_values(self, x) -> np.ndarray:
        env = [Jet.constant(float(x[k]), 1) for k in range(self.dim)]
        return np.array([eval_component(self.b_expr(i), env).val for i in range(self.dim)])

    def to_text(self) -> str:
        lines = [f"# {self.name}", f"dim = {self.dim}"]
        for k, (lo, hi) in enumerate(self.domain):
            if (lo, hi) != (-1.0, 1.0):
                lines.append(f"domain x{k + 1} = [{_num_repr(lo)}, {_num_repr(hi)}]")
        for (i, j), expr in sorted(self.a_entries.items()):
            lines.append(f"a {i + 1} {j + 1} = {expr_to_text(expr)}")
        for i, expr in sorted(self.b_entries.items()):
            lines.append(f"b {i + 1} = {expr_to_text(expr)}")
        return "\n".join(lines) + "\n"


def parse_metric(text: str, name: str = "metric") -> MetricSpec:
    """Parse a metric definition file into a MetricSpec.

    ``a i j`` lines fill both (i, j) and (j, i); assigning the same unordered
    pair twice is an error unless the expressions are structurally identical.
    """
    dim = None
    a_entries: dict = {}
    b_entries: dict = {}
    domain_over: dict = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = _tokenize(line, line_no)
        head = toks[0]
        if head[0] != "name":
            raise MetricFileError(f"unexpected {head[1]!r}", line_no, head[2])

        if head[1] == "dim":
            if dim is not None:
                raise MetricFileError("duplicate dim", line_no)
            if toks[1][0] != "=" or toks[2][0] != "num":
                raise MetricFileError("expected 'dim = <n>'", line_no)
            dim = int(toks[2][1])
            if dim < 2 or dim != toks[2][1]:
                raise MetricFileError(f"dim must be an integer >= 2, got {toks[2][1]}", line_no)
            continue

        if dim is None:
            raise MetricFileError("dim must be declared first", line_no)

        if head[1] == "domain":
            # domain x<k> = [lo, hi]
            if toks[1][0] != "name" or not toks[1][1].startswith("x"):
                raise MetricFileError("expected 'domain x<k> = [lo, hi]'", line_no)
            k = int(toks[1][1][1:])
            if not 1 <= k <= dim:
                raise MetricFileError(f"domain coordinate x{k} out of range", line_no)
            rest = line.split("=", 1)
            if len(rest) != 2:
                raise MetricFileError("expected '=' in domain line", line_no)
            body = rest[1].strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise MetricFileError("domain must be '[lo, hi]'", line_no)
            parts = body[1:-1].split(",")
            if len(parts) != 2:
                raise MetricFileError("domain must be '[lo, hi]'", line_no)
            try:
                lo, hi = float(parts[0]), float(parts[1])
            except ValueError:
                raise MetricFileError("bad domain bounds", line_no)
            if not lo < hi:
                raise MetricFileError("domain must have lo < hi", line_no)
            domain_over[k - 1] = (lo, hi)
            continue

        if head[1] in ("a", "b"):
            idx = []
            pos = 1
            while toks[pos][0] == "num":
                v = toks[pos][1]
                if v != int(v):
                    raise MetricFileError("indices must be integers", line_no, toks[pos][2])
                idx.append(int(v))
                pos += 1
            want = 2 if head[1] == "a" else 1
            if len(idx) != want:
                raise MetricFileError(
                    f"'{head[1]}' takes {want} index(es), got {len(idx)}", line_no
                )
            if toks[pos][0] != "=":
                raise MetricFileError("expected '='", line_no, toks[pos][2])
            for k in idx:
                if not 1 <= k <= dim:
                    raise MetricFileError(f"index {k} out of range 1..{dim}", line_no)
            body = line.split("=", 1)[1]
            expr = parse_expression(body, dim, line_no)
            if head[1] == "a":
                key = (min(idx) - 1, max(idx) - 1)
                if key in a_entries and a_entries[key] != expr:
                    raise MetricFileError(
                        f"conflicting duplicate entry a {key[0] + 1} {key[1] + 1}", line_no
                    )
                a_entries[key] = expr
            else:
                key = idx[0] - 1
                if key in b_entries and b_entries[key] != expr:
                    raise MetricFileError(f"conflicting duplicate entry b {idx[0]}", line_no)
                b_entries[key] = expr
            continue

        raise MetricFileError(f"unknown directive {head[1]!r}", line_no, head[2])

    if dim is None:
        raise MetricFileError("missing dim")
    domain = [domain_over.get(k, (-1.0, 1.0)) for k in range(dim)]
    return MetricSpec(dim=dim, a_entries=a_entries, b_entries=b_entries, domain=domain, name=name)


# -- validation ---------------------------------------------------------------


@dataclass
class ValidationReport:
    spec_name: str
    samples: int
    violations: list

    @property
    def valid(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.valid:
            return f"{self.spec_name}: valid at {self.samples} sampled points"
        lines = [f"{self.spec_name}: {len(self.violations)} violation(s)"]
        for x, kind, detail in self.violations[:10]:
            lines.append(f"  at x={np.array2string(np.asarray(x), precision=4)}: {kind} ({detail})")
        if len(self.violations) > 10:
            lines.append(f"  ... {len(self.violations) - 10} more")
        return "\n".join(lines)


def sample_domain(spec: MetricSpec, count: int, rng, shrink: float = 0.0) -> np.ndarray:
    """Uniform samples from the domain box, optionally shrunk per side."""
    lo = np.array([d[0] for d in spec.domain])
    hi = np.array([d[1] for d in spec.domain])
    margin = shrink * (hi - lo)
    return rng.uniform(lo + margin, hi - margin, size=(count, spec.dim))


def validate_spec(spec: MetricSpec, samples: int = 200, seed: int = 0) -> ValidationReport:
    """Check positive-definiteness of a(x) and b^2(x) < 1/4 at sampled points.

    The 1/4 bound is the validity condition for the slope-type metric
    F = alpha^2/(alpha - beta): it needs |beta|_alpha < 1/2 pointwise.
    Violations are reported as data, not raised.
    """
    rng = np.random.default_rng(seed)
    pts = sample_domain(spec, samples, rng)
    violations = []
    for x in pts:
        a = spec.a_values(x)
        try:
            np.linalg.cholesky(a)
        except np.linalg.LinAlgError:
            violations.append((x.copy(), "not positive definite", f"min eig {np.linalg.eigvalsh(a)[0]:.3g}"))
            continue
        b = spec.b_values(x)
        bsq = float(b @ np.linalg.solve(a, b))
        if bsq >= 0.25:
            violations.append((x.copy(), "b^2 >= 1/4", f"b^2 = {bsq:.6g}"))
    return ValidationReport(spec.name, samples, violations)
