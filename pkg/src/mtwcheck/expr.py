"""Scalar fields on a chart as exact, differentiable expression trees.

Fields are built from a deliberately small primitive set — addition,
subtraction, multiplication, non-negative integer powers, ``exp``,
``sin`` and ``cos`` — which is closed under differentiation.  Partial
derivatives of any order are therefore produced symbolically (no
finite-difference truncation): differentiating a tree yields another
tree in the same primitive set.

Two construction routes exist: :func:`parse_field` for textual input
(grammar below) and the small combinator helpers (:func:`const`,
:func:`var`, :func:`add`, ...) for programmatic assembly.

Grammar (whitespace-insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := number | ident | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'sin' | 'cos'

Identifiers name chart variables (``x``/``y``/``z`` or ``x1``..``xn``)
or constants supplied at parse time, which are bound to their decimal
values immediately.  There is no division, no unary minus and no
non-integer power; negative constants enter through bindings or as
``0 - ...``.

Mixed partials commute bit-exactly because every derivative request is
canonicalized to a fixed differentiation order (variable 0 first) and
memoized per field.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DerivativeOrderError, DimensionError, FieldSyntaxError
from .jets import JetSpace

# Highest total derivative order served by eval_partial.  The tensor
# pipeline needs order 4; a little headroom is allowed before refusing,
# since very deep derivative trees grow combinatorially.
MAX_PARTIAL_ORDER = 8

# ---------------------------------------------------------------------------
# Expression trees: immutable nested tuples.
#   ('c', value)   constant
#   ('x', index)   chart variable
#   ('+', a, b) | ('-', a, b) | ('*', a, b)
#   ('^', a, k)    integer power, k >= 2
#   ('neg', a) | ('exp', a) | ('sin', a) | ('cos', a)
# Smart constructors fold constants and drop algebraic no-ops so that
# derivative trees stay small.
# ---------------------------------------------------------------------------

Node = tuple

_ZERO = ("c", 0.0)
_ONE = ("c", 1.0)


def _is_const(n: Node, v: float | None = None) -> bool:
    return n[0] == "c" and (v is None or n[1] == v)


def _mk_add(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return ("c", a[1] + b[1])
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return ("+", a, b)


def _mk_sub(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return ("c", a[1] - b[1])
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _mk_neg(b)
    return ("-", a, b)


def _mk_neg(a: Node) -> Node:
    if _is_const(a):
        return ("c", -a[1])
    if a[0] == "neg":
        return a[1]
    return ("neg", a)


def _mk_mul(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return ("c", a[1] * b[1])
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return ("*", a, b)


def _mk_pow(a: Node, k: int) -> Node:
    if k == 0:
        return _ONE
    if k == 1:
        return a
    if _is_const(a):
        return ("c", a[1] ** k)
    return ("^", a, k)


def _diff(node: Node, v: int) -> Node:
    kind = node[0]
    if kind == "c":
        return _ZERO
    if kind == "x":
        return _ONE if node[1] == v else _ZERO
    if kind == "+":
        return _mk_add(_diff(node[1], v), _diff(node[2], v))
    if kind == "-":
        return _mk_sub(_diff(node[1], v), _diff(node[2], v))
    if kind == "neg":
        return _mk_neg(_diff(node[1], v))
    if kind == "*":
        a, b = node[1], node[2]
        return _mk_add(_mk_mul(_diff(a, v), b), _mk_mul(a, _diff(b, v)))
    if kind == "^":
        a, k = node[1], node[2]
        return _mk_mul(_mk_mul(("c", float(k)), _mk_pow(a, k - 1)), _diff(a, v))
    if kind == "exp":
        return _mk_mul(node, _diff(node[1], v))
    if kind == "sin":
        return _mk_mul(("cos", node[1]), _diff(node[1], v))
    if kind == "cos":
        return _mk_mul(_mk_neg(("sin", node[1])), _diff(node[1], v))
    raise AssertionError(f"unknown node kind {kind!r}")


def _codegen(node: Node) -> str:
    kind = node[0]
    if kind == "c":
        return repr(node[1])
    if kind == "x":
        return f"c[{node[1]}]"
    if kind == "+":
        return f"({_codegen(node[1])}+{_codegen(node[2])})"
    if kind == "-":
        return f"({_codegen(node[1])}-{_codegen(node[2])})"
    if kind == "neg":
        return f"(-{_codegen(node[1])})"
    if kind == "*":
        return f"({_codegen(node[1])}*{_codegen(node[2])})"
    if kind == "^":
        return f"({_codegen(node[1])}**{node[2]})"
    if kind in ("exp", "sin", "cos"):
        return f"_{kind}({_codegen(node[1])})"
    raise AssertionError(f"unknown node kind {kind!r}")


_EVAL_GLOBALS = {"_exp": math.exp, "_sin": math.sin, "_cos": math.cos}


@dataclass(frozen=True)
class ScalarField:
    """A smooth scalar function of ``dim`` chart coordinates.

    Instances are immutable and hashable; derivative fields and the
    compiled evaluator are memoized on first use.
    """

    tree: Node
    dim: int
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"field dimension must be >= 1, got {self.dim}")

    # -- evaluation --------------------------------------------------------

    def _fn(self) -> Callable:
        fn = self._cache.get("fn")
        if fn is None:
            src = f"lambda c: {_codegen(self.tree)}"
            fn = eval(compile(src, "<scalar-field>", "eval"), dict(_EVAL_GLOBALS))
            self._cache["fn"] = fn
        return fn

    def __call__(self, point: Sequence[float]) -> float:
        if len(point) != self.dim:
            raise DimensionError(
                f"point has {len(point)} coordinates, field expects {self.dim}"
            )
        return self._fn()(tuple(point))

    # -- differentiation ---------------------------------------------------

    def diff(self, v: int) -> "ScalarField":
        """Exact partial derivative with respect to coordinate ``v``."""
        if not 0 <= v < self.dim:
            raise DimensionError(f"variable index {v} out of range for dim {self.dim}")
        key = ("d", v)
        out = self._cache.get(key)
        if out is None:
            out = ScalarField(_diff(self.tree, v), self.dim)
            self._cache[key] = out
        return out

    def partial(self, counts: Sequence[int]) -> "ScalarField":
        """Derivative field for a multi-index of per-variable counts.

        The differentiation order is canonicalized (variable 0 first),
        so any route to the same multi-index yields the identical field
        object and bit-identical values.
        """
        counts = tuple(int(k) for k in counts)
        if len(counts) != self.dim:
            raise DimensionError(
                f"multi-index has {len(counts)} entries, field dimension is {self.dim}"
            )
        if any(k < 0 for k in counts):
            raise DerivativeOrderError(f"negative derivative count in {counts}")
        order = sum(counts)
        if order > MAX_PARTIAL_ORDER:
            raise DerivativeOrderError(
                f"derivative order {order} exceeds supported maximum {MAX_PARTIAL_ORDER}"
            )
        key = ("p", counts)
        out = self._cache.get(key)
        if out is None:
            out = self
            for v, k in enumerate(counts):
                for _ in range(k):
                    out = out.diff(v)
            self._cache[key] = out
        return out


def eval_partial(f: ScalarField, point: Sequence[float], idx: Sequence[int]) -> float:
    """Exact mixed partial of ``f`` at ``point``.

    ``idx`` gives per-variable derivative counts, e.g. ``(3, 1)`` for
    three derivatives in the first coordinate and one in the second.
    """
    return f.partial(idx)(point)


def eval_partial_seq(f: ScalarField, point: Sequence[float], dirs: Iterable[int]) -> float:
    """Mixed partial specified as a sequence of variable indices.

    ``dirs=(0, 0, 1)`` differentiates twice in variable 0 and once in
    variable 1.  The sequence is canonicalized to per-variable counts,
    so permutations of ``dirs`` return bit-identical values.
    """
    counts = [0] * f.dim
    for d in dirs:
        if not 0 <= d < f.dim:
            raise DimensionError(f"direction {d} out of range for dim {f.dim}")
        counts[d] += 1
    return eval_partial(f, point, counts)


def taylor_coefficients(f: ScalarField, point: Sequence[float], space: JetSpace) -> np.ndarray:
    """Jet (Taylor coefficient vector) of ``f`` about ``point``.

    Coefficients are exact partial derivatives divided by multi-index
    factorials, so downstream jet arithmetic is free of truncation
    error through the space's degree.
    """
    if space.nvars != f.dim:
        raise DimensionError(
            f"jet space has {space.nvars} variables, field dimension is {f.dim}"
        )
    out = np.empty(space.size)
    for i, mono in enumerate(space.monomials):
        out[i] = eval_partial(f, point, mono) / space.factorials[i]
    return out


# ---------------------------------------------------------------------------
# Programmatic constructors
# ---------------------------------------------------------------------------


def const(value: float, dim: int) -> ScalarField:
    return ScalarField(("c", float(value)), dim)


def var(index: int, dim: int) -> ScalarField:
    if not 0 <= index < dim:
        raise DimensionError(f"variable index {index} out of range for dim {dim}")
    return ScalarField(("x", index), dim)


def _binary(op, a: ScalarField, b: ScalarField) -> ScalarField:
    if a.dim != b.dim:
        raise DimensionError(f"operand dimensions differ: {a.dim} vs {b.dim}")
    return ScalarField(op(a.tree, b.tree), a.dim)


def add(a: ScalarField, b: ScalarField) -> ScalarField:
    return _binary(_mk_add, a, b)


def sub(a: ScalarField, b: ScalarField) -> ScalarField:
    return _binary(_mk_sub, a, b)


def mul(a: ScalarField, b: ScalarField) -> ScalarField:
    return _binary(_mk_mul, a, b)


def scale(k: float, a: ScalarField) -> ScalarField:
    return ScalarField(_mk_mul(("c", float(k)), a.tree), a.dim)


def power(a: ScalarField, k: int) -> ScalarField:
    if k < 0:
        raise DerivativeOrderError("negative powers are not in the primitive set")
    return ScalarField(_mk_pow(a.tree, int(k)), a.dim)


def exp(a: ScalarField) -> ScalarField:
    return ScalarField(("exp", a.tree), a.dim)


def sin(a: ScalarField) -> ScalarField:
    return ScalarField(("sin", a.tree), a.dim)


def cos(a: ScalarField) -> ScalarField:
    return ScalarField(("cos", a.tree), a.dim)


def fsum(terms: Iterable[ScalarField], dim: int) -> ScalarField:
    """Sum of a (possibly empty) iterable of fields."""
    total = const(0.0, dim)
    for t in terms:
        total = add(total, t)
    return total


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)

_FUNCS = ("exp", "sin", "cos")
_XYZ = {"x": 0, "y": 1, "z": 2}


class _Parser:
    def __init__(self, text: str, dim: int, constants: dict[str, float]):
        self.text = text
        self.dim = dim
        self.constants = constants
        self.tokens: list[tuple[str, str, int]] = []  # (kind, value, position)
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise FieldSyntaxError(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None:
            raise FieldSyntaxError("unexpected end of expression", len(self.text))
        self.i += 1
        return tok

    def _expect_op(self, op: str):
        tok = self._peek()
        if tok is None or tok[0] != "op" or tok[1] != op:
            pos = tok[2] if tok else len(self.text)
            raise FieldSyntaxError(f"expected {op!r}", pos)
        self.i += 1

    def parse(self) -> Node:
        node = self._expr()
        tok = self._peek()
        if tok is not None:
            raise FieldSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def _expr(self) -> Node:
        node = self._term()
        while True:
            tok = self._peek()
            if tok is not None and tok[0] == "op" and tok[1] in "+-":
                self.i += 1
                rhs = self._term()
                node = _mk_add(node, rhs) if tok[1] == "+" else _mk_sub(node, rhs)
            else:
                return node

    def _term(self) -> Node:
        node = self._factor()
        while True:
            tok = self._peek()
            if tok is not None and tok[0] == "op" and tok[1] == "*":
                self.i += 1
                node = _mk_mul(node, self._factor())
            else:
                return node

    def _factor(self) -> Node:
        node = self._base()
        tok = self._peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.i += 1
            exp_tok = self._peek()
            if exp_tok is None or exp_tok[0] != "number" or not exp_tok[1].isdigit():
                pos = exp_tok[2] if exp_tok else len(self.text)
                raise FieldSyntaxError("exponent must be an unsigned integer", pos)
            self.i += 1
            node = _mk_pow(node, int(exp_tok[1]))
        return node

    def _base(self) -> Node:
        kind, value, pos = self._next()
        if kind == "number":
            return ("c", float(value))
        if kind == "ident":
            if value in _FUNCS:
                self._expect_op("(")
                inner = self._expr()
                self._expect_op(")")
                return (value, inner)
            idx = self._var_index(value)
            if idx is not None:
                if idx >= self.dim:
                    raise FieldSyntaxError(
                        f"variable {value!r} out of range for dimension {self.dim}", pos
                    )
                return ("x", idx)
            if value in self.constants:
                return ("c", float(self.constants[value]))
            raise FieldSyntaxError(f"unknown identifier {value!r}", pos)
        if kind == "op" and value == "(":
            inner = self._expr()
            self._expect_op(")")
            return inner
        raise FieldSyntaxError(f"unexpected token {value!r}", pos)

    @staticmethod
    def _var_index(name: str) -> int | None:
        if name in _XYZ:
            return _XYZ[name]
        m = re.fullmatch(r"x([1-9]\d*)", name)
        if m:
            return int(m.group(1)) - 1
        return None


def parse_field(
    text: str, dim: int, constants: dict[str, float] | None = None
) -> ScalarField:
    """Parse an expression into a :class:`ScalarField` of dimension ``dim``.

    ``constants`` maps identifier names to decimal values bound at parse
    time.  Syntax errors carry the character offset of the failure.
    """
    if dim < 1:
        raise DimensionError(f"dimension must be >= 1, got {dim}")
    tree = _Parser(text, dim, dict(constants or {})).parse()
    return ScalarField(tree, dim)
