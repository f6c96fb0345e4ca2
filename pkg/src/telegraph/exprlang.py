"""A small arithmetic expression language for problem data.

Grammar::

    expr    := term (("+"|"-") term)* ;
    term    := factor (("*"|"/") factor)* ;
    factor  := "-" factor | power ;
    power   := atom ("^" factor)? ;
    atom    := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")" ;

``^`` is right-associative and binds tighter than unary minus, so ``-2^2``
is ``-(2^2)``.  Builtins: sin cos tan exp ln sqrt abs sign tanh (one
argument), min max pow (two), bump (three).  Constants: pi, e.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DomainError, ParseError
from .problem import ScalarFn

BUILTINS = {
    "sin": 1, "cos": 1, "tan": 1, "exp": 1, "ln": 1, "sqrt": 1,
    "abs": 1, "sign": 1, "tanh": 1,
    "min": 2, "max": 2, "pow": 2,
    "bump": 3,
}
CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: int = field(default=0, compare=False)


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "ident", "op" or "end"
    text: str
    pos: int


def _tokenize(src: str) -> list:
    toks = []
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", i)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), i))
        i = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, variables: frozenset):
        self.toks = _tokenize(src)
        self.i = 0
        self.vars = variables

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind != "op":
            raise self.unexpected(f"expected {text!r}")
        return self.advance()

    def unexpected(self, what: str = "") -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        return ParseError(f"{what + ', ' if what else ''}unexpected {found}", t.pos)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.unexpected()
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            left = BinOp(op.text, left, self.term(), op.pos)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            left = BinOp(op.text, left, self.factor(), op.pos)
        return left

    def factor(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            op = self.advance()
            return Neg(self.factor(), op.pos)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self.advance()
            return BinOp("^", base, self.factor(), op.pos)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {t.text!r} out of range", t.pos)
            return Num(value, t.pos)
        if t.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(t)
            if t.text in self.vars:
                return Var(t.text, t.pos)
            if t.text in CONSTANTS:
                return Const(t.text, t.pos)
            raise ParseError(f"unknown variable {t.text!r}", t.pos)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise self.unexpected()

    def call(self, name: _Tok) -> Expr:
        if name.text not in BUILTINS:
            raise ParseError(f"unknown function {name.text!r}", name.pos)
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        want = BUILTINS[name.text]
        if len(args) != want:
            raise ParseError(
                f"{name.text} takes {want} argument{'s' if want > 1 else ''}, got {len(args)}",
                name.pos,
            )
        return Call(name.text, tuple(args), name.pos)


def parse(src: str, variables: Iterable[str] = ()) -> Expr:
    """Parse ``src`` allowing only the names in ``variables``.

    Declared variables shadow the constants ``pi`` and ``e``.
    """
    return _Parser(src, frozenset(variables)).parse()


def variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return set().union(*(variables(a) for a in e.args))
    return set()


# --------------------------------------------------------------------------
# pretty printer

def _level(e: Expr) -> int:
    if isinstance(e, BinOp):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[e.op]
    if isinstance(e, Neg):
        return 3
    return 5


def to_source(e: Expr) -> str:
    """Render ``e`` with the minimal parentheses needed to re-parse it identically."""

    def wrap(node, min_level):
        s = to_source(node)
        return f"({s})" if _level(node) < min_level else s

    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return "-" + wrap(e.operand, 3)
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_source(a) for a in e.args)})"
    if e.op == "^":
        return f"{wrap(e.left, 5)}^{wrap(e.right, 3)}"
    lv = _level(e)
    return f"{wrap(e.left, lv)} {e.op} {wrap(e.right, lv + 1)}"


# --------------------------------------------------------------------------
# scalar evaluation

def _bump(x: float, c: float, w: float) -> float:
    if w <= 0:
        raise DomainError(f"bump width must be positive, got {w}")
    r = (x - c) / w
    if abs(r) >= 1.0:
        return 0.0
    return math.exp(1.0 - 1.0 / (1.0 - r * r))


def _pow(base: float, expo: float) -> float:
    if base == 0.0 and expo < 0:
        raise DomainError("0 raised to a negative power")
    if base < 0.0 and expo != math.floor(expo):
        raise DomainError(f"negative base {base} with non-integer exponent {expo}")
    return math.pow(base, expo)


def _ln(x: float) -> float:
    if x <= 0.0:
        raise DomainError(f"ln of non-positive value {x}")
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise DomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


def _sign(x: float) -> float:
    return float((x > 0) - (x < 0))


_SCALAR_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "ln": _ln, "sqrt": _sqrt, "abs": abs, "sign": _sign, "tanh": math.tanh,
    "min": min, "max": max, "pow": _pow, "bump": _bump,
}


def _eval(e: Expr, env: Mapping[str, float]) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        return _SCALAR_FUNCS[e.name](*(_eval(a, env) for a in e.args))
    left = _eval(e.left, env)
    right = _eval(e.right, env)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        if right == 0.0:
            raise DomainError("division by zero")
        return left / right
    return _pow(left, right)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Real value of ``e``; raises DomainError instead of returning inf/nan."""
    missing = variables(e) - set(bindings)
    if missing:
        raise KeyError(f"unbound variables: {sorted(missing)}")
    try:
        value = _eval(e, bindings)
    except OverflowError:
        raise DomainError("overflow", dict(bindings)) from None
    except ValueError as exc:  # includes DomainError and math domain errors
        raise DomainError(str(exc), dict(bindings)) from None
    if not math.isfinite(value):
        raise DomainError(f"non-finite result {value}", dict(bindings))
    return value


# --------------------------------------------------------------------------
# array evaluation (elementwise, same semantics)

def _fail_where(mask: np.ndarray, message: str):
    if np.any(mask):
        idx = int(np.flatnonzero(np.ravel(mask))[0])
        raise DomainError(message, f"element {idx}")


def _eval_array(e: Expr, env) -> np.ndarray:
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Const):
        return np.float64(CONSTANTS[e.name])
    if isinstance(e, Neg):
        return -_eval_array(e.operand, env)
    if isinstance(e, Call):
        args = [_eval_array(a, env) for a in e.args]
        name = e.name
        if name == "ln":
            _fail_where(args[0] <= 0, "ln of non-positive value")
            return np.log(args[0])
        if name == "sqrt":
            _fail_where(args[0] < 0, "sqrt of negative value")
            return np.sqrt(args[0])
        if name == "pow":
            return _pow_array(*args)
        if name == "bump":
            x, c, w = np.broadcast_arrays(*args)
            _fail_where(w <= 0, "bump width must be positive")
            r = (x - c) / w
            inside = np.abs(r) < 1.0
            rr = np.where(inside, r, 0.0)
            return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - rr * rr)), 0.0)
        func = {
            "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
            "abs": np.abs, "sign": np.sign, "tanh": np.tanh,
            "min": np.minimum, "max": np.maximum,
        }[name]
        return func(*args)
    left = _eval_array(e.left, env)
    right = _eval_array(e.right, env)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        _fail_where(right == 0.0, "division by zero")
        return left / right
    return _pow_array(left, right)


def _pow_array(base, expo):
    _fail_where((base == 0.0) & (expo < 0), "0 raised to a negative power")
    _fail_where((base < 0.0) & (expo != np.floor(expo)), "negative base with non-integer exponent")
    return np.power(base, expo)


def evaluate_array(e: Expr, bindings: Mapping[str, np.ndarray]) -> np.ndarray:
    with np.errstate(all="ignore"):
        env = {k: np.asarray(v, dtype=float) for k, v in bindings.items()}
        out = np.asarray(_eval_array(e, env), dtype=float)
    _fail_where(~np.isfinite(out), "non-finite result")
    return out


def to_scalarfn(e: Expr, var_order: Sequence[str], name: str = "") -> ScalarFn:
    """Wrap ``e`` as a positional ScalarFn over ``var_order`` (no derivative handles)."""
    order = tuple(var_order)
    extra = variables(e) - set(order)
    if extra:
        raise ValueError(f"expression uses {sorted(extra)} not in {order}")
    label = name or to_source(e)

    def func(*args):
        return evaluate(e, dict(zip(order, args)))

    def vectorized(*arrays):
        return evaluate_array(e, dict(zip(order, arrays)))

    return ScalarFn(func, len(order), vectorized=vectorized, name=label)


def compile_fn(src: str, var_order: Sequence[str], name: str = "") -> ScalarFn:
    """Parse ``src`` over ``var_order`` and wrap it as a ScalarFn."""
    return to_scalarfn(parse(src, var_order), var_order, name=name or src)
