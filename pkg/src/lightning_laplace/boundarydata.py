"""Dirichlet boundary data: one scalar function per boundary arc.

Each arc's data is a function of the arc parameter ``t`` in [0, 1] and of the
boundary point ``(x, y)``.  Data can be given as a small infix expression
language (parsed with :mod:`ast`, never ``eval``), a seeded smooth random
function, or any Python callable ``f(t, x, y)`` when used from code.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError
from .geometry import Domain

_FUNCTIONS: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "pow": np.power,
}
_CONSTANTS = {"pi": math.pi, "e": math.e}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class RandomSmooth:
    """Seeded random trigonometric series in t that vanishes at both ends of the arc.

    ``t (1 - t) / sqrt(2K + 1) * sum_{k=0..K} (a_k cos 2 pi k t + b_k sin 2 pi k t)``
    with standard-normal ``a_k, b_k`` and ``K = floor(1 / wavelength)``.
    """

    def __init__(self, seed: int, wavelength: float = 0.5):
        if not wavelength > 0:
            raise DataError("wavelength must be positive")
        self.seed = int(seed)
        self.wavelength = float(wavelength)
        self.max_frequency = int(math.floor(1.0 / self.wavelength))
        rng = np.random.default_rng(self.seed)
        K = self.max_frequency
        self.cos_coeffs = rng.standard_normal(K + 1)
        self.sin_coeffs = rng.standard_normal(K + 1)
        self.sin_coeffs[0] = 0.0
        self._norm = 1.0 / math.sqrt(2 * K + 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.max_frequency + 1)
        ang = 2 * np.pi * np.multiply.outer(t, k)
        series = np.cos(ang) @ self.cos_coeffs + np.sin(ang) @ self.sin_coeffs
        return t * (1 - t) * self._norm * series

    def __repr__(self):
        return f"RandomSmooth(seed={self.seed}, wavelength={self.wavelength})"


def _compile(node: ast.AST, source: str):
    """Turn an expression AST into a function of the variable dict."""
    if isinstance(node, ast.Expression):
        return _compile(node.body, source)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        val = float(node.value)
        return lambda v: val
    if isinstance(node, ast.Name):
        name = node.id
        if name in ("t", "x", "y"):
            return lambda v: v[name]
        if name in _CONSTANTS:
            val = _CONSTANTS[name]
            return lambda v: val
        raise DataError(f"unknown variable {name!r} in {source!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left, source), _compile(node.right, source)
        return lambda v: op(left(v), right(v))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand, source)
        if isinstance(node.op, ast.USub):
            return lambda v: np.negative(inner(v))
        return inner
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        fname = node.func.id
        if fname == "randnfun":
            if len(node.args) not in (1, 2) or not all(isinstance(a, ast.Constant) for a in node.args):
                raise DataError(f"randnfun takes literal (seed[, wavelength]) in {source!r}")
            rs = RandomSmooth(*[a.value for a in node.args])
            return lambda v: rs(v["t"])
        if fname not in _FUNCTIONS:
            raise DataError(f"unknown function {fname!r} in {source!r}")
        fn = _FUNCTIONS[fname]
        args = [_compile(a, source) for a in node.args]
        return lambda v: fn(*(a(v) for a in args))
    raise DataError(f"unsupported syntax in {source!r}: {ast.dump(node)[:60]}")


@dataclass(frozen=True)
class Expression:
    """Infix expression in t, x, y, e.g. ``"exp(x)*sin(3*y) * t*(1-t)"``."""

    source: str
    _fn: Callable = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        text = self.source.replace("^", "**")
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise DataError(f"cannot parse expression {self.source!r}: {exc.msg}") from None
        object.__setattr__(self, "_fn", _compile(tree, self.source))

    def __call__(self, t, x, y):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = self._fn({"t": t, "x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float)})
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape)


def random_smooth(seed: int, wavelength: float = 0.5) -> Expression:
    return Expression(f"randnfun({int(seed)}, {float(wavelength)!r})")


def _as_arc_function(item):
    if isinstance(item, str):
        return Expression(item)
    if isinstance(item, dict) and "randnfun" in item:
        p = item["randnfun"]
        return random_smooth(p.get("seed", 0), p.get("wavelength", 0.5))
    if isinstance(item, (int, float)):
        return Expression(repr(float(item)))
    if callable(item):
        return item
    raise DataError(f"cannot interpret boundary data entry {item!r}")


class BoundarySpec:
    """Per-arc boundary data attached to a domain."""

    def __init__(self, domain: Domain, arcs, check: bool = True):
        self.domain = domain
        if not isinstance(arcs, (list, tuple)):
            arcs = [arcs] * len(domain.arcs)
        if len(arcs) != len(domain.arcs):
            raise DataError(f"domain has {len(domain.arcs)} arcs but {len(arcs)} data entries were given")
        self.arcs = tuple(_as_arc_function(a) for a in arcs)
        if check:
            # guard against log/division blowups anywhere along the arcs
            t = np.linspace(0.0, 1.0, 1000)
            for k in range(len(self.arcs)):
                self.eval_arc(k, t)

    def eval_arc(self, arc_index: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        z = self.domain.arcs[arc_index].point(t)
        with np.errstate(all="ignore"):
            vals = np.asarray(self.arcs[arc_index](t, np.real(z), np.imag(z)), dtype=float)
        vals = np.broadcast_to(vals, t.shape)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            tb = float(np.ravel(t)[np.flatnonzero(np.ravel(bad))[0]])
            raise DataError(f"boundary data on arc {arc_index} is not finite at t = {tb!r}")
        return vals

    def evaluate(self, arc_index, t) -> np.ndarray:
        """Vectorized evaluation at (arc index, parameter) pairs."""
        arc_index = np.asarray(arc_index, dtype=int)
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape)
        for k in np.unique(arc_index):
            sel = arc_index == k
            out[sel] = self.eval_arc(int(k), t[sel])
        return out

    def corner_jumps(self) -> np.ndarray:
        """|h_prev(corner) - h_next(corner)| at every corner."""
        m = len(self.arcs)
        return np.array(
            [abs(float(self.eval_arc((k - 1) % m, 1.0)) - float(self.eval_arc(k, 0.0))) for k in range(m)]
        )

    def scale(self) -> float:
        t = np.linspace(0.0, 1.0, 201)
        vmax = max(float(np.max(np.abs(self.eval_arc(k, t)))) for k in range(len(self.arcs)))
        return vmax if vmax > 0 else 1.0

    @property
    def continuous(self) -> bool:
        return bool(np.all(self.corner_jumps() <= 1e-10 * self.scale()))

    def pullback(self, domain: Domain, inverse_map: Callable) -> "BoundarySpec":
        """Data on an image domain: h'(t, z) = h(t, inverse_map(z)).

        Meant for rigid motions (:meth:`Domain.transformed`), which keep the arc
        numbering and parametrization.
        """

        def wrap(f):
            def g(t, x, y):
                z = inverse_map(np.asarray(x) + 1j * np.asarray(y))
                return f(t, np.real(z), np.imag(z))

            return g

        return BoundarySpec(domain, [wrap(f) for f in self.arcs])


def eval_h(spec: BoundarySpec, arc_index: int, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise DataError(f"arc parameter {t} outside [0, 1]")
    return float(spec.eval_arc(arc_index, t))


def bc_from_json(data: dict, domain: Domain) -> BoundarySpec:
    if "all" in data:
        return BoundarySpec(domain, [data["all"]] * len(domain.arcs))
    if "arcs" in data:
        return BoundarySpec(domain, list(data["arcs"]))
    raise DataError('boundary data needs an "arcs" list or an "all" entry')
